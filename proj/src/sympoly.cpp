#include "natop/sympoly.hpp"

#include <algorithm>

namespace natop {

int SymbolTable::add(std::string name) {
  names_.push_back(std::move(name));
  return size() - 1;
}

std::string SymbolTable::describe(const SymMonomial& m) const {
  if (m.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < m.size();) {
    std::size_t j = i;
    while (j < m.size() && m[j] == m[i]) ++j;
    if (!out.empty()) out += " ";
    out += name(m[i]);
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

SymPoly::SymPoly(const Rational& c) {
  if (sgn(c) != 0) terms_.emplace(SymMonomial{}, c);
}

SymPoly SymPoly::symbol(int id, const Rational& c) {
  SymPoly p;
  p.add_term(SymMonomial{id}, c);
  return p;
}

void SymPoly::add_term(const SymMonomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

SymPoly& SymPoly::operator+=(const SymPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

SymPoly& SymPoly::operator-=(const SymPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

SymPoly& SymPoly::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

void SymPoly::add_product(const SymPoly& a, const SymPoly& b, const Rational& c) {
  SymMonomial m;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      m.resize(ma.size() + mb.size());
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), m.begin());
      Rational v = ca * cb * c;
      add_term(m, v);
    }
}

SymPoly operator*(const SymPoly& a, const SymPoly& b) {
  SymPoly out;
  out.add_product(a, b);
  return out;
}

std::string SymPoly::describe(const SymbolTable& table) const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += sgn(c) < 0 ? " - " : " + ";
    else if (sgn(c) < 0) out += "-";
    Rational a = abs(c);
    if (m.empty()) {
      out += to_string(a);
      continue;
    }
    if (a != 1) out += to_string(a) + " ";
    out += table.describe(m);
  }
  return out;
}

}  // namespace natop
