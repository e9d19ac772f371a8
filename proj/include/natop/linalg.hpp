#pragma once

// Small dense exact linear algebra.

#include "natop/rational.hpp"

#include <vector>

namespace natop {

using Matrix = std::vector<std::vector<Rational>>;

Matrix identity_matrix(int n);
Matrix multiply(const Matrix& a, const Matrix& b);
Rational determinant(Matrix a);
/// Throws std::domain_error when singular.
Matrix inverse(const Matrix& a);
int rank(Matrix a);

/// Result of fraction-free elimination on a homogeneous system M x = 0.
struct NullSpace {
  std::vector<int> pivot_columns;  // in elimination order
  std::vector<int> free_columns;
  /// One basis vector per free column: 1 at that column, 0 at the other
  /// free columns.
  std::vector<std::vector<Rational>> basis;
};

/// Bareiss elimination over the given column order (a permutation of
/// 0..ncols-1). Columns earlier in `order` are preferred as pivots, so
/// later ones end up as free parameters.
NullSpace null_space(const std::vector<std::vector<Rational>>& rows, int ncols, const std::vector<int>& order);

/// Solves A x = b exactly when a solution exists (least-index free
/// variables set to zero). Returns false when the system is inconsistent.
bool solve_linear(const Matrix& a, const std::vector<Rational>& b, std::vector<Rational>& x);

}  // namespace natop
