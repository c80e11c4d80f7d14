#include "holonomy/basis.hpp"

#include <array>

#include "holonomy/errors.hpp"

namespace holonomy {

namespace {

struct BasisTables {
  std::array<std::array<FormBasis, kMaxDim + 1>, kMaxDim + 1> bases;
  // position[n][mask]; the degree is implied by the popcount.
  std::array<std::vector<int>, kMaxDim + 1> positions;

  BasisTables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      positions[n].assign(std::size_t{1} << n, -1);
      for (int k = 0; k <= n; ++k) {
        FormBasis& basis = bases[n][k];
        basis.n = n;
        basis.k = k;
        // Enumerate increasing tuples lexicographically.
        std::vector<int> tuple(k);
        for (int i = 0; i < k; ++i) tuple[i] = i;
        while (true) {
          IndexMask mask = 0;
          for (int i : tuple) mask |= IndexMask{1} << i;
          positions[n][mask] = basis.size();
          basis.masks.push_back(mask);
          int i = k - 1;
          while (i >= 0 && tuple[i] == n - k + i) --i;
          if (i < 0) break;
          ++tuple[i];
          for (int j = i + 1; j < k; ++j) tuple[j] = tuple[j - 1] + 1;
        }
      }
    }
  }
};

const BasisTables& tables() {
  static const BasisTables instance;
  return instance;
}

}  // namespace

int FormBasis::position(IndexMask mask) const {
  const auto& pos = tables().positions[n];
  if (mask >= pos.size() || popcount(mask) != k) throw DimensionMismatch("index mask outside Λ^k basis");
  return pos[mask];
}

const FormBasis& form_basis(int n, int k) {
  if (n < 0 || n > kMaxDim) throw DimensionMismatch("dimension " + std::to_string(n) + " out of range");
  if (k < 0 || k > n) throw DegreeOverflow("degree " + std::to_string(k) + " out of range for n=" + std::to_string(n));
  return tables().bases[n][k];
}

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

int wedge_sign(IndexMask a, IndexMask b) {
  if (a & b) return 0;
  // Count pairs (i in a, j in b) with i > j: the transpositions needed to sort.
  int inversions = 0;
  for (IndexMask rest = b; rest; rest &= rest - 1) {
    const int j = __builtin_ctz(rest);
    inversions += popcount(a & ~((IndexMask{2} << j) - 1));
  }
  return (inversions % 2) ? -1 : 1;
}

std::vector<int> mask_indices(IndexMask mask) {
  std::vector<int> out;
  for (; mask; mask &= mask - 1) out.push_back(__builtin_ctz(mask));
  return out;
}

int mask_from_indices(const std::vector<int>& one_based, int n, IndexMask& mask) {
  mask = 0;
  int sign = 1;
  for (int idx : one_based) {
    if (idx < 1 || idx > n) throw DimensionMismatch("index " + std::to_string(idx) + " outside 1.." + std::to_string(n));
    const IndexMask bit = IndexMask{1} << (idx - 1);
    if (mask & bit) return 0;
    // Moving the new index left past every larger index already present.
    if (popcount(mask & ~((bit << 1) - 1)) % 2) sign = -sign;
    mask |= bit;
  }
  return sign;
}

std::string format_indices(IndexMask mask) {
  std::string out;
  for (int i : mask_indices(mask)) {
    if (!out.empty()) out += ',';
    out += std::to_string(i + 1);
  }
  return out;
}

}  // namespace holonomy
