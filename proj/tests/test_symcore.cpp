#include "natop/component_array.hpp"
#include "natop/linalg.hpp"
#include "natop/poly.hpp"
#include "natop/random.hpp"
#include "natop/sympoly.hpp"

#include <doctest.h>

#include <map>

using namespace natop;

namespace {

// Naive sparse polynomials for an independent composition oracle.
using Naive = std::map<std::vector<int>, Rational>;

Naive naive_mul(const Naive& a, const Naive& b, int deg) {
  Naive out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      int d = 0;
      for (std::size_t i = 0; i < e.size(); ++i) d += (e[i] = ea[i] + eb[i]);
      if (d > deg) continue;
      out[e] += ca * cb;
    }
  return out;
}

Naive to_naive(const TruncPoly& p) {
  Naive out;
  for (std::size_t k = 0; k < p.basis().size(); ++k)
    if (sgn(p.coeff(k)) != 0) out[p.basis().exponents(k)] = p.coeff(k);
  return out;
}

Naive naive_compose(const Naive& p, const std::vector<Naive>& subs, int nv, int deg) {
  Naive out;
  for (const auto& [e, c] : p) {
    Naive term{{std::vector<int>(static_cast<std::size_t>(nv), 0), c}};
    for (std::size_t v = 0; v < e.size(); ++v)
      for (int k = 0; k < e[v]; ++k) term = naive_mul(term, subs[v], deg);
    for (const auto& [te, tc] : term) out[te] += tc;
  }
  std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
  return out;
}

TruncPoly random_poly(RationalRng& rng, int nv, int deg, bool zero_constant) {
  TruncPoly p(nv, deg);
  for (std::size_t k = zero_constant ? 1 : 0; k < p.basis().size(); ++k) p.coeff(k) = rng.sparse_rational(0.3);
  return p;
}

Rational permutation_determinant(const Matrix& a) {
  const int n = static_cast<int>(a.size());
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  Rational det;
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inv += p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)];
    Rational t(inv % 2 ? -1 : 1);
    for (int i = 0; i < n; ++i) t *= a[static_cast<std::size_t>(i)][static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
    det += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return det;
}

}  // namespace

TEST_CASE("rational text round trip") {
  CHECK(to_string(make_rational(6, -4)) == "-3/2");
  CHECK(to_string(make_rational(4, 2)) == "2");
  CHECK(parse_rational("-3/2") == make_rational(-3, 2));
  CHECK(parse_rational("+7") == 7);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  RationalRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Rational q = rng.rational() * rng.rational() - rng.rational();
    CHECK(parse_rational(to_string(q)) == q);
  }
}

TEST_CASE("component array symmetry classes") {
  ComponentArray t(3, IndexSignature({Variance::upper, Variance::lower, Variance::lower},
                                     {{Symmetry::antisymmetric, {1, 2}}}));
  CHECK(t.size() == 9);
  t.set({0, 2, 1}, make_rational(5));
  CHECK(t.at({0, 1, 2}) == -5);
  CHECK(t.at({0, 2, 1}) == 5);
  CHECK(t.at({0, 1, 1}) == 0);
  CHECK_THROWS_AS(t.set({1, 2, 2}, make_rational(1)), std::invalid_argument);

  ComponentArray s(3, IndexSignature({Variance::lower, Variance::lower, Variance::lower},
                                     {{Symmetry::symmetric, {0, 1, 2}}}));
  CHECK(s.size() == sym_index_count(3, 3));
  s.set({2, 0, 1}, make_rational(1, 3));
  CHECK(s.at({1, 2, 0}) == make_rational(1, 3));

  // symmetrize / alternate against direct averages
  RationalRng rng(5);
  ComponentArray g(3, IndexSignature({Variance::lower, Variance::lower, Variance::lower}));
  rng.fill(g);
  const auto sy = symmetrize(g, {0, 1});
  const auto al = alternate(g, 1, 2);
  for_each_index(3, 3, [&](std::span<const int> i) {
    CHECK(sy.at(i) == (g.at(i) + g.at({i[1], i[0], i[2]})) / 2);
    CHECK(al.at(i) == (g.at(i) - g.at({i[0], i[2], i[1]})) / 2);
  });
}

TEST_CASE("monomial basis counts and lookup") {
  for (int n = 1; n <= 3; ++n)
    for (int d = 0; d <= 4; ++d) {
      const auto b = MonomialBasis::get(n, d);
      std::size_t expected = 0;
      for (int k = 0; k <= d; ++k) expected += sym_index_count(n, k);
      CHECK(b->size() == expected);
      for (std::size_t k = 0; k < b->size(); ++k) CHECK(b->index_of(b->exponents(k)) == static_cast<long>(k));
    }
}

TEST_CASE("truncated composition matches naive expansion") {
  RationalRng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int nv = 1 + trial % 3;
    const int deg = 1 + trial % 4;
    const auto p = random_poly(rng, nv, deg, false);
    std::vector<TruncPoly> subs;
    std::vector<Naive> nsubs;
    for (int v = 0; v < nv; ++v) {
      subs.push_back(random_poly(rng, nv, deg, true));
      nsubs.push_back(to_naive(subs.back()));
    }
    const auto c = p.compose(subs);
    CHECK(to_naive(c) == naive_compose(to_naive(p), nsubs, nv, deg));
  }
}

TEST_CASE("chain rule at the origin") {
  RationalRng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int nv = 2 + trial % 2;
    const auto p = random_poly(rng, nv, 3, false);
    std::vector<TruncPoly> subs;
    for (int v = 0; v < nv; ++v) subs.push_back(random_poly(rng, nv, 3, true));
    const auto c = p.compose(subs);
    for (int i = 0; i < nv; ++i) {
      Rational expected;
      std::vector<int> ei(static_cast<std::size_t>(nv), 0);
      ei[static_cast<std::size_t>(i)] = 1;
      for (int j = 0; j < nv; ++j) {
        std::vector<int> ej(static_cast<std::size_t>(nv), 0);
        ej[static_cast<std::size_t>(j)] = 1;
        expected += p.derivative_at_origin(ej) * subs[static_cast<std::size_t>(j)].derivative_at_origin(ei);
      }
      CHECK(c.derivative_at_origin(ei) == expected);
    }
  }
}

TEST_CASE("derivative lowers the degree") {
  TruncPoly x = TruncPoly::variable(2, 3, 0);
  TruncPoly y = TruncPoly::variable(2, 3, 1);
  TruncPoly p = x * x * y + y * make_rational(2);
  const auto dx = p.derivative(0);
  CHECK(dx.degree() == 2);
  CHECK(dx == (TruncPoly::variable(2, 2, 0) * TruncPoly::variable(2, 2, 1)) * make_rational(2));
  const std::vector<int> e{2, 1};
  CHECK(p.derivative_at_origin(e) == 2);
}

TEST_CASE("determinant, inverse and rank") {
  RationalRng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 4;
    Matrix a(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
    for (auto& row : a)
      for (auto& v : row) v = rng.sparse_rational(0.2);
    const Rational det = determinant(a);
    CHECK(det == permutation_determinant(a));
    if (sgn(det) != 0) {
      CHECK(multiply(a, inverse(a)) == identity_matrix(n));
      CHECK(rank(a) == n);
    } else {
      CHECK_THROWS_AS(inverse(a), std::domain_error);
      CHECK(rank(a) < n);
    }
  }
}

TEST_CASE("null space basis is exact and complete") {
  RationalRng rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 1 + trial % 5;
    const int cols = 2 + trial % 6;
    std::vector<std::vector<Rational>> m(static_cast<std::size_t>(rows), std::vector<Rational>(static_cast<std::size_t>(cols)));
    for (auto& r : m)
      for (auto& v : r) v = rng.sparse_rational(0.5);
    std::vector<int> order(static_cast<std::size_t>(cols));
    for (int i = 0; i < cols; ++i) order[static_cast<std::size_t>(i)] = cols - 1 - i;
    const auto ns = null_space(m, cols, order);
    CHECK(static_cast<int>(ns.basis.size()) == cols - rank(m));
    CHECK(ns.pivot_columns.size() + ns.free_columns.size() == static_cast<std::size_t>(cols));
    for (std::size_t b = 0; b < ns.basis.size(); ++b) {
      for (const auto& r : m) {
        Rational acc;
        for (int c = 0; c < cols; ++c) acc += r[static_cast<std::size_t>(c)] * ns.basis[b][static_cast<std::size_t>(c)];
        CHECK(sgn(acc) == 0);
      }
      for (std::size_t f = 0; f < ns.free_columns.size(); ++f)
        CHECK(ns.basis[b][static_cast<std::size_t>(ns.free_columns[f])] == (f == b ? 1 : 0));
    }
  }
}

TEST_CASE("null space prefers early columns as pivots") {
  // x0 - x1 = 0: with order (1, 0), x1 is the pivot and x0 stays free
  std::vector<std::vector<Rational>> m{{Rational(1), Rational(-1)}};
  const auto ns = null_space(m, 2, {1, 0});
  REQUIRE(ns.free_columns.size() == 1);
  CHECK(ns.free_columns[0] == 0);
}

TEST_CASE("solve_linear") {
  Matrix a{{Rational(1), Rational(2)}, {Rational(2), Rational(4)}};
  std::vector<Rational> x;
  CHECK(solve_linear(a, {Rational(3), Rational(6)}, x));
  CHECK(x[0] + 2 * x[1] == 3);
  CHECK_FALSE(solve_linear(a, {Rational(3), Rational(7)}, x));
}

TEST_CASE("sparse symbolic polynomials") {
  SymbolTable t;
  const int a = t.add("a");
  const int b = t.add("b");
  const SymPoly pa = SymPoly::symbol(a);
  const SymPoly pb = SymPoly::symbol(b);
  const SymPoly sq = (pa + pb) * (pa - pb);
  CHECK(sq == pa * pa - pb * pb);
  CHECK(sq.describe(t) == "a^2 - b^2");
  CHECK((sq - sq).is_zero());
  SymPoly acc(make_rational(1, 2));
  acc.add_product(pa, pb, Rational(-2));
  CHECK(acc.terms().size() == 2);
}
