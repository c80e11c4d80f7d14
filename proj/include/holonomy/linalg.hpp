#pragma once

// Dense linear algebra over both scalar backends. The double path defers to
// Eigen's decompositions; the exact path uses elimination over the rationals.

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "holonomy/basis.hpp"
#include "holonomy/scalar.hpp"

namespace holonomy {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  if (m.rows() == 0) return Scalar(1);
  if constexpr (!is_exact_v<Scalar>) {
    return m.derived().eval().partialPivLu().determinant();
  } else {
    MatrixX<Scalar> a = m;
    const Eigen::Index n = a.rows();
    Scalar det(1);
    for (Eigen::Index col = 0; col < n; ++col) {
      Eigen::Index pivot = col;
      while (pivot < n && a(pivot, col) == 0) ++pivot;
      if (pivot == n) return Scalar(0);
      if (pivot != col) {
        a.row(pivot).swap(a.row(col));
        det = -det;
      }
      det *= a(col, col);
      for (Eigen::Index r = col + 1; r < n; ++r) {
        if (a(r, col) == 0) continue;
        const Scalar factor = a(r, col) / a(col, col);
        for (Eigen::Index c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      }
    }
    return det;
  }
}

/// Determinant of the submatrix with the given row and column index sets.
template <class Derived>
typename Derived::Scalar minor_determinant(const Eigen::MatrixBase<Derived>& m, IndexMask rows, IndexMask cols) {
  using Scalar = typename Derived::Scalar;
  const auto r = mask_indices(rows);
  const auto c = mask_indices(cols);
  const int k = static_cast<int>(r.size());
  if (k != static_cast<int>(c.size())) throw DimensionMismatch("minor with unequal index sets");
  if (k == 0) return Scalar(1);
  if (k == 1) return m(r[0], c[0]);
  if (k == 2) return m(r[0], c[0]) * m(r[1], c[1]) - m(r[0], c[1]) * m(r[1], c[0]);
  MatrixX<Scalar> sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = m(r[i], c[j]);
  return determinant(sub);
}

/// Rank. Exact path: fraction-free (Bareiss) elimination on the integer
/// matrix obtained by clearing denominators row by row.
template <class Derived>
int rank(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  if constexpr (!is_exact_v<Scalar>) {
    Eigen::FullPivLU<MatrixX<double>> lu(m.derived().eval());
    lu.setThreshold(tol);
    return static_cast<int>(lu.rank());
  } else {
    const Eigen::Index rows = m.rows();
    const Eigen::Index cols = m.cols();
    std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
      BigInt lcm = 1;
      for (Eigen::Index j = 0; j < cols; ++j)
        lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(m(i, j)));
      for (Eigen::Index j = 0; j < cols; ++j) {
        const Scalar scaled = m(i, j) * Scalar(lcm);
        a[i][j] = boost::multiprecision::numerator(scaled);
      }
    }
    BigInt previous = 1;
    int r = 0;
    for (Eigen::Index col = 0; col < cols && r < rows; ++col) {
      Eigen::Index pivot = r;
      while (pivot < rows && a[pivot][col] == 0) ++pivot;
      if (pivot == rows) continue;
      std::swap(a[pivot], a[r]);
      for (Eigen::Index i = r + 1; i < rows; ++i) {
        for (Eigen::Index j = col + 1; j < cols; ++j) {
          a[i][j] = (a[r][col] * a[i][j] - a[i][col] * a[r][j]) / previous;
        }
        a[i][col] = 0;
      }
      previous = a[r][col];
      ++r;
    }
    return r;
  }
}

template <class Derived>
MatrixX<typename Derived::Scalar> inverse(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw DimensionMismatch("inverse of a non-square matrix");
  const Eigen::Index n = m.rows();
  if constexpr (!is_exact_v<Scalar>) {
    Eigen::FullPivLU<MatrixX<double>> lu(m.derived().eval());
    if (!lu.isInvertible()) throw SingularMatrix("matrix is singular");
    return lu.inverse();
  } else {
    MatrixX<Scalar> a = m;
    MatrixX<Scalar> inv = MatrixX<Scalar>::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
      Eigen::Index pivot = col;
      while (pivot < n && a(pivot, col) == 0) ++pivot;
      if (pivot == n) throw SingularMatrix("matrix is singular");
      a.row(pivot).swap(a.row(col));
      inv.row(pivot).swap(inv.row(col));
      const Scalar p = a(col, col);
      a.row(col) /= p;
      inv.row(col) /= p;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (r == col || a(r, col) == 0) continue;
        const Scalar factor = a(r, col);
        a.row(r) -= factor * a.row(col);
        inv.row(r) -= factor * inv.row(col);
      }
    }
    return inv;
  }
}

template <class Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, double tol = 0.0) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (!is_zero(m(i, j) - m(j, i), tol)) return false;
  return true;
}

/// Sylvester's criterion: every leading principal minor is positive.
template <class Derived>
bool is_positive_definite(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if constexpr (!is_exact_v<Scalar>) {
    Eigen::LLT<MatrixX<double>> llt(m.derived().eval());
    return llt.info() == Eigen::Success;
  } else {
    for (Eigen::Index k = 1; k <= m.rows(); ++k)
      if (sign_of(determinant(m.topLeftCorner(k, k))) <= 0) return false;
    return true;
  }
}

/// Signature (positive, negative) of a symmetric matrix via LDLᵀ pivots
/// (exact) or eigenvalues (double).
template <class Derived>
std::pair<int, int> signature(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  int pos = 0, neg = 0;
  if constexpr (!is_exact_v<Scalar>) {
    Eigen::SelfAdjointEigenSolver<MatrixX<double>> es(m.derived().eval());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double ev = es.eigenvalues()(i);
      if (ev > tol) ++pos;
      else if (ev < -tol) ++neg;
    }
  } else {
    // Congruence diagonalization by symmetric elimination.
    MatrixX<Scalar> a = m;
    const Eigen::Index n = a.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
      if (a(col, col) == 0) {
        Eigen::Index other = col + 1;
        while (other < n && a(other, other) == 0) ++other;
        if (other < n) {
          a.row(col).swap(a.row(other));
          a.col(col).swap(a.col(other));
        } else {
          other = col + 1;
          while (other < n && a(col, other) == 0) ++other;
          if (other == n) continue;
          // Adding row/col `other` to `col` makes the diagonal entry 2·a(col,other) ≠ 0.
          a.row(col) += a.row(other);
          a.col(col) += a.col(other);
        }
      }
      const Scalar p = a(col, col);
      if (p == 0) continue;
      for (Eigen::Index r = col + 1; r < n; ++r) {
        if (a(r, col) == 0) continue;
        const Scalar factor = a(r, col) / p;
        a.row(r) -= factor * a.row(col);
        a.col(r) -= factor * a.col(col);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i, i) > 0) ++pos;
      else if (a(i, i) < 0) ++neg;
    }
  }
  return {pos, neg};
}

}  // namespace holonomy
