#include "natop/poly.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace natop {

namespace {

void enumerate_degree(int nvars, int d, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
  if (pos == nvars - 1) {
    cur[static_cast<std::size_t>(pos)] = d;
    out.push_back(cur);
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[static_cast<std::size_t>(pos)] = e;
    enumerate_degree(nvars, d - e, cur, pos + 1, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int degree) : nvars_(nvars), degree_(degree) {
  if (nvars < 1 || degree < 0) throw std::invalid_argument("MonomialBasis: need nvars >= 1, degree >= 0");
  std::vector<int> cur(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= degree; ++d) enumerate_degree(nvars, d, cur, 0, exps_);
  std::size_t radix_size = 1;
  for (int i = 0; i < nvars; ++i) radix_size *= static_cast<std::size_t>(degree + 1);
  radix_lookup_.assign(radix_size, -1);
  for (std::size_t k = 0; k < exps_.size(); ++k) {
    int deg = 0;
    std::size_t r = 0;
    Integer f = 1;
    for (int e : exps_[k]) {
      deg += e;
      r = r * static_cast<std::size_t>(degree + 1) + static_cast<std::size_t>(e);
      for (int t = 2; t <= e; ++t) f *= t;
    }
    degs_.push_back(deg);
    radix_lookup_[r] = static_cast<long>(k);
    fact_.push_back(f);
  }
  const auto n = exps_.size();
  mul_.assign(n * n, -1);
  std::vector<int> sum(static_cast<std::size_t>(nvars));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (degs_[i] + degs_[j] > degree) continue;
      for (int v = 0; v < nvars; ++v) sum[static_cast<std::size_t>(v)] = exps_[i][static_cast<std::size_t>(v)] + exps_[j][static_cast<std::size_t>(v)];
      mul_[i * n + j] = index_of(sum);
    }
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int nvars, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{nvars, degree}];
  if (!slot) slot = std::make_shared<MonomialBasis>(nvars, degree);
  return slot;
}

long MonomialBasis::index_of(std::span<const int> exps) const {
  if (static_cast<int>(exps.size()) != nvars_) throw std::invalid_argument("MonomialBasis: exponent length mismatch");
  int deg = 0;
  std::size_t r = 0;
  for (int e : exps) {
    if (e < 0) return -1;
    deg += e;
    if (deg > degree_) return -1;
    r = r * static_cast<std::size_t>(degree_ + 1) + static_cast<std::size_t>(e);
  }
  return radix_lookup_[r];
}

TruncPoly::TruncPoly() : TruncPoly(1, 0) {}

TruncPoly::TruncPoly(int nvars, int degree) : TruncPoly(MonomialBasis::get(nvars, degree)) {}

TruncPoly::TruncPoly(std::shared_ptr<const MonomialBasis> basis) : basis_(std::move(basis)), c_(basis_->size()) {}

TruncPoly TruncPoly::constant(int nvars, int degree, const Rational& c) {
  TruncPoly p(nvars, degree);
  p.c_[0] = c;
  return p;
}

TruncPoly TruncPoly::variable(int nvars, int degree, int var) {
  TruncPoly p(nvars, degree);
  if (degree >= 1) {
    std::vector<int> e(static_cast<std::size_t>(nvars), 0);
    e[static_cast<std::size_t>(var)] = 1;
    p.c_[static_cast<std::size_t>(p.basis_->index_of(e))] = 1;
  }
  return p;
}

Rational TruncPoly::coeff_of(std::span<const int> exps) const {
  const long k = basis_->index_of(exps);
  return k < 0 ? Rational(0) : c_[static_cast<std::size_t>(k)];
}

void TruncPoly::set_coeff_of(std::span<const int> exps, const Rational& v) {
  const long k = basis_->index_of(exps);
  if (k < 0) throw std::out_of_range("TruncPoly: monomial beyond truncation degree");
  c_[static_cast<std::size_t>(k)] = v;
}

bool TruncPoly::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return sgn(q) == 0; });
}

TruncPoly TruncPoly::truncated(int d) const {
  if (d > degree()) throw std::invalid_argument("TruncPoly::truncated: cannot raise the degree");
  if (d == degree()) return *this;
  TruncPoly p(nvars(), d);
  for (std::size_t k = 0; k < p.c_.size(); ++k) p.c_[k] = c_[k];  // graded order: prefix
  return p;
}

TruncPoly TruncPoly::derivative(int var) const {
  if (degree() < 1) throw std::invalid_argument("TruncPoly::derivative: degree-0 polynomial carries no derivative");
  TruncPoly p(nvars(), degree() - 1);
  std::vector<int> e;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (sgn(c_[k]) == 0) continue;
    e = basis_->exponents(k);
    const int ev = e[static_cast<std::size_t>(var)];
    if (ev == 0) continue;
    e[static_cast<std::size_t>(var)] -= 1;
    const long t = p.basis_->index_of(e);
    if (t >= 0) p.c_[static_cast<std::size_t>(t)] += c_[k] * ev;
  }
  return p;
}

Rational TruncPoly::derivative_at_origin(std::span<const int> exps) const {
  const long k = basis_->index_of(exps);
  if (k < 0) throw std::out_of_range("TruncPoly: derivative order beyond truncation degree");
  return c_[static_cast<std::size_t>(k)] * Rational(basis_->factorial_weight(static_cast<std::size_t>(k)));
}

TruncPoly TruncPoly::homogeneous_part(int d) const {
  TruncPoly p(basis_);
  for (std::size_t k = 0; k < c_.size(); ++k)
    if (basis_->total_degree(k) == d) p.c_[k] = c_[k];
  return p;
}

TruncPoly TruncPoly::compose(std::span<const TruncPoly> subs) const {
  if (static_cast<int>(subs.size()) != nvars()) throw std::invalid_argument("TruncPoly::compose: need one substitute per variable");
  int target_deg = degree();
  for (const auto& s : subs) {
    target_deg = std::min(target_deg, s.degree());
    if (s.nvars() != subs[0].nvars()) throw std::invalid_argument("TruncPoly::compose: substitutes disagree on variables");
    if (sgn(s.constant_term()) != 0) throw std::invalid_argument("TruncPoly::compose: substitutes must vanish at the origin");
  }
  const int tv = subs[0].nvars();
  std::vector<TruncPoly> s;
  s.reserve(subs.size());
  for (const auto& x : subs) s.push_back(x.truncated(target_deg));
  TruncPoly out(tv, target_deg);
  // powers[k] = product of substitutes for monomial k of this basis
  std::vector<TruncPoly> powers(c_.size());
  powers[0] = TruncPoly::constant(tv, target_deg, Rational(1));
  std::vector<int> e;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (basis_->total_degree(k) > target_deg) break;
    if (k > 0) {
      e = basis_->exponents(k);
      int v = 0;
      while (e[static_cast<std::size_t>(v)] == 0) ++v;
      e[static_cast<std::size_t>(v)] -= 1;
      const auto prev = static_cast<std::size_t>(basis_->index_of(e));
      powers[k] = powers[prev] * s[static_cast<std::size_t>(v)];
    }
    if (sgn(c_[k]) == 0) continue;
    TruncPoly term = powers[k];
    term *= c_[k];
    out += term;
  }
  return out;
}

TruncPoly& TruncPoly::operator+=(const TruncPoly& o) {
  if (o.nvars() != nvars()) throw std::invalid_argument("TruncPoly: variable count mismatch");
  if (o.degree() < degree()) *this = truncated(o.degree());
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

TruncPoly& TruncPoly::operator-=(const TruncPoly& o) {
  if (o.nvars() != nvars()) throw std::invalid_argument("TruncPoly: variable count mismatch");
  if (o.degree() < degree()) *this = truncated(o.degree());
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

TruncPoly& TruncPoly::operator*=(const Rational& s) {
  for (auto& q : c_) q *= s;
  return *this;
}

void TruncPoly::accumulate_product(const TruncPoly& a, const TruncPoly& b, bool subtract) {
  if (a.nvars() != nvars() || b.nvars() != nvars()) throw std::invalid_argument("TruncPoly: variable count mismatch");
  const int d = std::min({degree(), a.degree(), b.degree()});
  if (d < degree()) *this = truncated(d);
  const auto& B = *basis_;
  const std::size_t n = B.size();
  Rational tmp;
  // all three share the graded prefix ordering, so indices agree below d
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ai = a.c_[i];
    if (sgn(ai) == 0) continue;
    const int di = B.total_degree(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (di + B.total_degree(j) > d) break;
      const auto& bj = b.c_[j];
      if (sgn(bj) == 0) continue;
      const auto t = static_cast<std::size_t>(B.product_index(i, j));
      mpq_mul(tmp.get_mpq_t(), ai.get_mpq_t(), bj.get_mpq_t());
      if (subtract)
        mpq_sub(c_[t].get_mpq_t(), c_[t].get_mpq_t(), tmp.get_mpq_t());
      else
        mpq_add(c_[t].get_mpq_t(), c_[t].get_mpq_t(), tmp.get_mpq_t());
    }
  }
}

void TruncPoly::add_product(const TruncPoly& a, const TruncPoly& b) { accumulate_product(a, b, false); }
void TruncPoly::sub_product(const TruncPoly& a, const TruncPoly& b) { accumulate_product(a, b, true); }

TruncPoly operator*(const TruncPoly& a, const TruncPoly& b) {
  TruncPoly out(a.nvars(), std::min(a.degree(), b.degree()));
  out.add_product(a, b);
  return out;
}

bool operator==(const TruncPoly& a, const TruncPoly& b) {
  return a.nvars() == b.nvars() && a.degree() == b.degree() && a.c_ == b.c_;
}

}  // namespace natop
