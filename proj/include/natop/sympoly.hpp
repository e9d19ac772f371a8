#pragma once

// Sparse multivariate polynomials with exact coefficients over a table of
// named symbols. Used for coefficient matching in the classification
// pipeline.

#include "natop/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace natop {

/// Sorted list of symbol ids (repetition = power).
using SymMonomial = std::vector<int>;

class SymbolTable {
 public:
  int add(std::string name);
  [[nodiscard]] const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(names_.size()); }
  [[nodiscard]] std::string describe(const SymMonomial& m) const;

 private:
  std::vector<std::string> names_;
};

class SymPoly {
 public:
  SymPoly() = default;
  explicit SymPoly(const Rational& c);
  static SymPoly symbol(int id, const Rational& c = Rational(1));

  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
  [[nodiscard]] const std::map<SymMonomial, Rational>& terms() const noexcept { return terms_; }

  SymPoly& operator+=(const SymPoly& o);
  SymPoly& operator-=(const SymPoly& o);
  SymPoly& operator*=(const Rational& c);
  /// this += a * b
  void add_product(const SymPoly& a, const SymPoly& b, const Rational& c = Rational(1));

  friend SymPoly operator+(SymPoly a, const SymPoly& b) { return a += b; }
  friend SymPoly operator-(SymPoly a, const SymPoly& b) { return a -= b; }
  friend SymPoly operator*(const SymPoly& a, const SymPoly& b);
  friend bool operator==(const SymPoly&, const SymPoly&) = default;

  [[nodiscard]] std::string describe(const SymbolTable& table) const;

 private:
  void add_term(const SymMonomial& m, const Rational& c);
  std::map<SymMonomial, Rational> terms_;
};

}  // namespace natop
