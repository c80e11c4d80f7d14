#pragma once

// Independent reference implementations for the tests. Forms are maps from
// increasing 0-based index tuples to coefficients; nothing here shares code
// with the library's bitmask basis.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <type_traits>
#include <vector>

#include "holonomy/kform.hpp"

namespace oracle {

using holonomy::MatrixX;
using holonomy::Rational;

template <class S>
using Form = std::map<std::vector<int>, S>;

/// Sign of the sorting permutation; 0 on repeated entries. Sorts v in place.
inline int sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j) {
      if (v[j] == v[j + 1]) return 0;
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        sign = -sign;
      }
    }
  return sign;
}

template <class S>
void add(Form<S>& f, std::vector<int> idx, const S& c) {
  const int s = sort_sign(idx);
  if (s == 0 || c == S(0)) return;
  S& slot = f[idx];
  slot += S(s) * c;
  if (slot == S(0)) f.erase(idx);
}

template <class S>
Form<S> plus(Form<S> a, const Form<S>& b, const S& scale = S(1)) {
  for (const auto& [idx, c] : b) add(a, idx, scale * c);
  return a;
}

template <class S>
Form<S> scaled(const Form<S>& a, const S& s) {
  return plus(Form<S>{}, a, s);
}

template <class S>
Form<S> wedge(const Form<S>& a, const Form<S>& b) {
  Form<S> out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) {
      std::vector<int> idx = i;
      idx.insert(idx.end(), j.begin(), j.end());
      add(out, idx, x * y);
    }
  return out;
}

/// ι_{e_i}.
template <class S>
Form<S> interior(int i, const Form<S>& a) {
  Form<S> out;
  for (const auto& [idx, c] : a) {
    const auto it = std::find(idx.begin(), idx.end(), i);
    if (it == idx.end()) continue;
    const int pos = static_cast<int>(it - idx.begin());
    std::vector<int> rest = idx;
    rest.erase(rest.begin() + pos);
    add(out, rest, pos % 2 ? S(-c) : c);
  }
  return out;
}

/// Hodge star of the identity metric with orientation e^{1..n}: e_I ∧ *e_I = vol.
template <class S>
Form<S> hodge(const Form<S>& a, int n) {
  Form<S> out;
  for (const auto& [idx, c] : a) {
    std::vector<int> comp;
    for (int i = 0; i < n; ++i)
      if (!std::count(idx.begin(), idx.end(), i)) comp.push_back(i);
    std::vector<int> all = idx;
    all.insert(all.end(), comp.begin(), comp.end());
    add(out, comp, S(sort_sign(all)) * c);
  }
  return out;
}

inline std::vector<std::vector<int>> tuples(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

template <class S>
Form<S> from_library(const holonomy::KForm<S>& a) {
  Form<S> out;
  for (const auto& idx : tuples(a.dim(), a.degree())) {
    std::vector<int> one_based;
    for (int i : idx) one_based.push_back(i + 1);
    add(out, idx, a.coeff(one_based));
  }
  return out;
}

template <class S>
holonomy::KForm<S> to_library(const Form<S>& a, int n, int k) {
  holonomy::KForm<S> out(n, k);
  for (const auto& [idx, c] : a) {
    std::vector<int> one_based;
    for (int i : idx) one_based.push_back(i + 1);
    out += holonomy::KForm<S>::basis(n, one_based, c);
  }
  return out;
}

template <class S>
Form<S> basis(std::vector<int> one_based, const S& c = S(1)) {
  for (int& i : one_based) --i;
  Form<S> out;
  add(out, one_based, c);
  return out;
}

inline double max_abs_diff(const Form<double>& a, const Form<double>& b) {
  double m = 0.0;
  for (const auto& [idx, c] : plus(a, b, -1.0)) m = std::max(m, std::abs(c));
  return m;
}

/// Coefficient of e^{1..n} in an n-form.
template <class S>
S top(const Form<S>& a, int n) {
  std::vector<int> all;
  for (int i = 0; i < n; ++i) all.push_back(i);
  const auto it = a.find(all);
  return it == a.end() ? S(0) : it->second;
}

/// B_ij = (1/6) top(ι_iφ ∧ ι_jφ ∧ φ).
template <class S>
MatrixX<S> g2_pairing(const Form<S>& phi) {
  MatrixX<S> B(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) B(i, j) = top(wedge(wedge(interior(i, phi), interior(j, phi)), phi), 7) / S(6);
  return B;
}

/// K with ι_{K e_a} e^{1..6} = ι_{e_a}ρ ∧ ρ.
template <class S>
MatrixX<S> hitchin_k(const Form<S>& rho) {
  MatrixX<S> K = MatrixX<S>::Zero(6, 6);
  for (int a = 0; a < 6; ++a) {
    const auto five = wedge(interior(a, rho), rho);
    for (int b = 0; b < 6; ++b) {
      std::vector<int> rest;
      for (int i = 0; i < 6; ++i)
        if (i != b) rest.push_back(i);
      const auto it = five.find(rest);
      if (it != five.end()) K(b, a) = b % 2 ? S(-it->second) : it->second;
    }
  }
  return K;
}

/// Real and imaginary parts of a wedge of complex 1-forms a_j + i b_j.
template <class S>
std::pair<Form<S>, Form<S>> complex_wedge(const std::vector<std::pair<Form<S>, Form<S>>>& factors) {
  Form<S> re, im;
  add(re, {}, S(1));
  for (const auto& [a, b] : factors) {
    const Form<S> nre = plus(wedge(re, a), wedge(im, b), S(-1));
    const Form<S> nim = plus(wedge(re, b), wedge(im, a));
    re = nre;
    im = nim;
  }
  return {re, im};
}

/// −Σ_j h(e_j, ·) ∧ ι_{e_j} κ in an orthonormal frame.
template <class S>
Form<S> sym2_act(const MatrixX<S>& h, const Form<S>& kappa, int n) {
  Form<S> out;
  for (int j = 0; j < n; ++j) {
    Form<S> hj;
    for (int l = 0; l < n; ++l) add(hj, {l}, S(h(j, l)));
    out = plus(out, wedge(hj, interior(j, kappa)), S(-1));
  }
  return out;
}

/// (A^*a)_I = Σ_J a_J det A[J, I].
template <class S>
Form<S> pullback(const MatrixX<S>& A, const Form<S>& a, int n, int k) {
  Form<S> out;
  for (const auto& I : tuples(n, k))
    for (const auto& [J, c] : a) {
      MatrixX<S> sub(k, k);
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) sub(r, s) = A(J[r], I[s]);
      add(out, I, c * sub.determinant());
    }
  return out;
}

/// Rank by fraction-exact Gaussian elimination on rows.
inline int rank(std::vector<std::vector<Rational>> rows) {
  int r = 0;
  const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (int c = 0; c < cols && r < static_cast<int>(rows.size()); ++c) {
    int pivot = -1;
    for (int i = r; i < static_cast<int>(rows.size()); ++i)
      if (rows[i][c] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[r], rows[pivot]);
    for (int i = r + 1; i < static_cast<int>(rows.size()); ++i) {
      if (rows[i][c] == 0) continue;
      const Rational f = rows[i][c] / rows[r][c];
      for (int j = c; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
  }
  return r;
}

/// Flattens a form into a fixed-length coefficient row over all k-tuples.
template <class S>
std::vector<S> row(const Form<S>& a, int n, int k) {
  std::vector<S> out;
  for (const auto& idx : tuples(n, k)) {
    const auto it = a.find(idx);
    out.push_back(it == a.end() ? S(0) : it->second);
  }
  return out;
}

template <class S>
MatrixX<S> random_symmetric(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-6, 6), den(1, 5);
  MatrixX<S> h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Rational q(num(rng), den(rng));
      if constexpr (std::is_same_v<S, Rational>) h(i, j) = h(j, i) = q;
      else h(i, j) = h(j, i) = q.convert_to<double>();
    }
  return h;
}

}  // namespace oracle
