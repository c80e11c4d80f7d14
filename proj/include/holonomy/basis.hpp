#pragma once

// Index bookkeeping for alternating forms. A basis element e^{i1...ik} with
// i1 < ... < ik is stored as a bit mask (bit i-1 set for index i); the basis of
// Λ^k(R^n) is ordered lexicographically by index tuple.

#include <cstdint>
#include <string>
#include <vector>

namespace holonomy {

using IndexMask = std::uint32_t;

inline constexpr int kMaxDim = 8;

struct FormBasis {
  int n = 0;
  int k = 0;
  std::vector<IndexMask> masks;

  int size() const { return static_cast<int>(masks.size()); }
  /// Position of a degree-k mask in the lexicographic order.
  int position(IndexMask mask) const;
};

/// Shared immutable table for 0 <= k <= n <= kMaxDim.
const FormBasis& form_basis(int n, int k);

int binomial(int n, int k);

inline IndexMask full_mask(int n) { return (IndexMask{1} << n) - 1; }

inline int popcount(IndexMask m) { return __builtin_popcount(m); }

/// Sign of e^a ∧ e^b relative to e^{a|b}; 0 when the masks overlap.
int wedge_sign(IndexMask a, IndexMask b);

/// 0-based indices in increasing order.
std::vector<int> mask_indices(IndexMask mask);

/// Sorts 1-based indices into a mask; returns the permutation sign, 0 on repeats.
int mask_from_indices(const std::vector<int>& one_based, int n, IndexMask& mask);

/// "1,2,4" (1-based).
std::string format_indices(IndexMask mask);

}  // namespace holonomy
