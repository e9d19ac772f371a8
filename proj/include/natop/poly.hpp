#pragma once

// Dense truncated multivariate polynomials over Rational. A TruncPoly of
// degree d stands for a Taylor polynomial known up to total degree d; binary
// operations truncate to the smaller of the operand degrees.

#include "natop/rational.hpp"

#include <memory>
#include <span>
#include <vector>

namespace natop {

/// Monomials of total degree <= degree in nvars variables, graded, and
/// lexicographic (descending exponent of x0 first) within a degree.
class MonomialBasis {
 public:
  static std::shared_ptr<const MonomialBasis> get(int nvars, int degree);

  [[nodiscard]] int nvars() const noexcept { return nvars_; }
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] std::size_t size() const noexcept { return exps_.size(); }
  [[nodiscard]] const std::vector<int>& exponents(std::size_t k) const { return exps_[k]; }
  [[nodiscard]] int total_degree(std::size_t k) const { return degs_[k]; }
  /// Index of an exponent vector of total degree <= degree(), else -1.
  [[nodiscard]] long index_of(std::span<const int> exps) const;
  /// Index of the product monomial, or -1 when it exceeds degree().
  [[nodiscard]] long product_index(std::size_t i, std::size_t j) const {
    return mul_[i * exps_.size() + j];
  }
  /// Product of factorials of the exponents (x^a/a! Taylor normalization).
  [[nodiscard]] const Integer& factorial_weight(std::size_t k) const { return fact_[k]; }

  MonomialBasis(int nvars, int degree);

 private:
  int nvars_;
  int degree_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degs_;
  std::vector<long> radix_lookup_;
  std::vector<long> mul_;
  std::vector<Integer> fact_;
};

class TruncPoly {
 public:
  TruncPoly();
  TruncPoly(int nvars, int degree);

  static TruncPoly constant(int nvars, int degree, const Rational& c);
  static TruncPoly variable(int nvars, int degree, int var);

  [[nodiscard]] int nvars() const noexcept { return basis_->nvars(); }
  [[nodiscard]] int degree() const noexcept { return basis_->degree(); }
  [[nodiscard]] const MonomialBasis& basis() const noexcept { return *basis_; }
  [[nodiscard]] const std::vector<Rational>& coeffs() const noexcept { return c_; }
  [[nodiscard]] const Rational& coeff(std::size_t k) const { return c_[k]; }
  Rational& coeff(std::size_t k) { return c_[k]; }
  [[nodiscard]] Rational coeff_of(std::span<const int> exps) const;
  void set_coeff_of(std::span<const int> exps, const Rational& v);

  [[nodiscard]] const Rational& constant_term() const { return c_[0]; }
  [[nodiscard]] bool is_zero() const;

  /// Same coefficients, cut to total degree `d` (d <= degree()).
  [[nodiscard]] TruncPoly truncated(int d) const;
  /// Partial derivative; the result has degree() - 1.
  [[nodiscard]] TruncPoly derivative(int var) const;
  /// Mixed partial derivative at the origin for the given exponent vector.
  [[nodiscard]] Rational derivative_at_origin(std::span<const int> exps) const;
  /// Homogeneous component of degree d.
  [[nodiscard]] TruncPoly homogeneous_part(int d) const;

  /// p(subs_0, ..., subs_{n-1}); every substitute must vanish at the origin.
  /// The result lives in the substitutes' variables, truncated to the smaller
  /// of their degree and degree().
  [[nodiscard]] TruncPoly compose(std::span<const TruncPoly> subs) const;

  TruncPoly& operator+=(const TruncPoly& o);
  TruncPoly& operator-=(const TruncPoly& o);
  TruncPoly& operator*=(const Rational& s);
  /// Accumulates a * b into *this (truncated to this->degree()).
  void add_product(const TruncPoly& a, const TruncPoly& b);
  void sub_product(const TruncPoly& a, const TruncPoly& b);

  friend TruncPoly operator+(TruncPoly a, const TruncPoly& b) { return a += b; }
  friend TruncPoly operator-(TruncPoly a, const TruncPoly& b) { return a -= b; }
  friend TruncPoly operator*(const TruncPoly& a, const TruncPoly& b);
  friend TruncPoly operator*(TruncPoly a, const Rational& s) { return a *= s; }
  friend TruncPoly operator-(TruncPoly a) { return a *= Rational(-1); }

  friend bool operator==(const TruncPoly& a, const TruncPoly& b);

 private:
  explicit TruncPoly(std::shared_ptr<const MonomialBasis> basis);
  void accumulate_product(const TruncPoly& a, const TruncPoly& b, bool subtract);

  std::shared_ptr<const MonomialBasis> basis_;
  std::vector<Rational> c_;
};

}  // namespace natop
