#include "natop/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace natop {

Matrix identity_matrix(int n) {
  Matrix m(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.empty()) return {};
  const std::size_t n = a.size();
  const std::size_t k = b.size();
  const std::size_t p = b.empty() ? 0 : b[0].size();
  if (a[0].size() != k) throw std::invalid_argument("multiply: shape mismatch");
  Matrix c(n, std::vector<Rational>(p));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (sgn(a[i][t]) == 0) continue;
      for (std::size_t j = 0; j < p; ++j) c[i][j] += a[i][t] * b[t][j];
    }
  return c;
}

Rational determinant(Matrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a[p][c]) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(a[r][c]) == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

Matrix inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix m = a;
  Matrix inv = identity_matrix(static_cast<int>(n));
  for (std::size_t c = 0; c < n; ++c) {
    if (m[c].size() != n) throw std::invalid_argument("inverse: matrix not square");
    std::size_t p = c;
    while (p < n && sgn(m[p][c]) == 0) ++p;
    if (p == n) throw std::domain_error("inverse: singular matrix");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    const Rational piv = m[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      m[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m[r][c]) == 0) continue;
      const Rational f = m[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

int rank(Matrix a) {
  if (a.empty()) return 0;
  const std::size_t ncols = a[0].size();
  std::size_t row = 0;
  for (std::size_t c = 0; c < ncols && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && sgn(a[p][c]) == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    for (std::size_t r = row + 1; r < a.size(); ++r) {
      if (sgn(a[r][c]) == 0) continue;
      const Rational f = a[r][c] / a[row][c];
      for (std::size_t j = c; j < ncols; ++j) a[r][j] -= f * a[row][j];
    }
    ++row;
  }
  return static_cast<int>(row);
}

NullSpace null_space(const std::vector<std::vector<Rational>>& rows, int ncols, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != ncols) throw std::invalid_argument("null_space: column order must be a permutation");
  const auto nc = static_cast<std::size_t>(ncols);
  // Work on integer rows (clear denominators), permuted into `order`.
  std::vector<std::vector<Integer>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != nc) throw std::invalid_argument("null_space: row length mismatch");
    Integer l = 1;
    for (const auto& q : r) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    std::vector<Integer> ir(nc);
    bool nz = false;
    for (std::size_t j = 0; j < nc; ++j) {
      const Rational& q = r[static_cast<std::size_t>(order[j])];
      ir[j] = q.get_num() * (l / q.get_den());
      nz = nz || sgn(ir[j]) != 0;
    }
    if (nz) m.push_back(std::move(ir));
  }
  // Bareiss: every division below is exact.
  Integer prev = 1;
  std::size_t row = 0;
  std::vector<std::size_t> piv;
  for (std::size_t c = 0; c < nc && row < m.size(); ++c) {
    std::size_t p = row;
    while (p < m.size() && sgn(m[p][c]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    for (std::size_t r = row + 1; r < m.size(); ++r) {
      for (std::size_t j = c + 1; j < nc; ++j) {
        m[r][j] = m[row][c] * m[r][j] - m[r][c] * m[row][j];
        mpz_divexact(m[r][j].get_mpz_t(), m[r][j].get_mpz_t(), prev.get_mpz_t());
      }
      m[r][c] = 0;
    }
    prev = m[row][c];
    piv.push_back(c);
    ++row;
  }
  m.resize(row);
  // Back substitution in rationals on the echelon form.
  std::vector<bool> is_piv(nc, false);
  for (auto c : piv) is_piv[c] = true;
  NullSpace ns;
  for (auto c : piv) ns.pivot_columns.push_back(order[c]);
  for (std::size_t c = 0; c < nc; ++c)
    if (!is_piv[c]) ns.free_columns.push_back(order[c]);
  for (std::size_t f = 0; f < nc; ++f) {
    if (is_piv[f]) continue;
    std::vector<Rational> x(nc);
    x[f] = 1;
    for (std::size_t k = piv.size(); k-- > 0;) {
      const auto c = piv[k];
      Rational s = 0;
      for (std::size_t j = c + 1; j < nc; ++j)
        if (sgn(x[j]) != 0 && sgn(m[k][j]) != 0) s += Rational(m[k][j]) * x[j];
      x[c] = -s / Rational(m[k][c]);
    }
    std::vector<Rational> out(nc);
    for (std::size_t j = 0; j < nc; ++j) out[static_cast<std::size_t>(order[j])] = x[j];
    ns.basis.push_back(std::move(out));
  }
  return ns;
}

bool solve_linear(const Matrix& a, const std::vector<Rational>& b, std::vector<Rational>& x) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("solve_linear: shape mismatch");
  const std::size_t nc = n == 0 ? 0 : a[0].size();
  Matrix m = a;
  for (std::size_t i = 0; i < n; ++i) m[i].push_back(b[i]);
  std::size_t row = 0;
  std::vector<std::size_t> piv;
  for (std::size_t c = 0; c < nc && row < n; ++c) {
    std::size_t p = row;
    while (p < n && sgn(m[p][c]) == 0) ++p;
    if (p == n) continue;
    std::swap(m[p], m[row]);
    const Rational pv = m[row][c];
    for (std::size_t j = c; j <= nc; ++j) m[row][j] /= pv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || sgn(m[r][c]) == 0) continue;
      const Rational f = m[r][c];
      for (std::size_t j = c; j <= nc; ++j) m[r][j] -= f * m[row][j];
    }
    piv.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < n; ++r)
    if (sgn(m[r][nc]) != 0) return false;
  x.assign(nc, Rational(0));
  for (std::size_t k = 0; k < piv.size(); ++k) x[piv[k]] = m[k][nc];
  return true;
}

}  // namespace natop
