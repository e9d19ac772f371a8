#include "natop/connection.hpp"
#include "natop/random.hpp"

#include <doctest.h>

#include <utility>

using namespace natop;

namespace {

bool equal_everywhere(const ComponentArray& a, const ComponentArray& b) {
  bool ok = a.rank() == b.rank();
  for_each_index(a.dim(), a.rank(), [&](std::span<const int> i) { ok = ok && a.at(i) == b.at(i); });
  return ok;
}

}  // namespace

TEST_CASE("curvature of a single linear coefficient") {
  // Λ^1_{11,2} = 1 (1-based), everything else zero
  auto l = ConnectionJet::zero(2, 1, true);
  std::vector<ComponentArray> parts = l.parts();
  parts[1].set({0, 0, 0, 1}, Rational(1));
  const ConnectionJet lj(2, true, parts);
  const auto w = curvature(lj).w;
  CHECK(w.at({0, 0, 0, 1}) == 1);
  CHECK(w.at({0, 0, 1, 0}) == -1);
  int nonzero = 0;
  for_each_index(2, 4, [&](std::span<const int> i) { nonzero += sgn(w.at(i)) != 0; });
  CHECK(nonzero == 2);
}

TEST_CASE("curvature quadratic terms") {
  // constant Λ only: w_ν^ρ_{λμ} = Λ^σ_{μν}Λ^ρ_{λσ} - Λ^σ_{λν}Λ^ρ_{μσ}
  RationalRng rng(201);
  const auto l = random_connection(rng, 3, 1, true);
  const auto w = curvature(l).w;
  const auto& a = l.part(0);
  const auto& da = l.part(1);
  for_each_index(3, 4, [&](std::span<const int> i) {
    const int nu = i[0], rho = i[1], la = i[2], mu = i[3];
    Rational expected = da.at({rho, la, nu, mu}) - da.at({rho, mu, nu, la});
    for (int s = 0; s < 3; ++s)
      expected += a.at({s, mu, nu}) * a.at({rho, la, s}) - a.at({s, la, nu}) * a.at({rho, mu, s});
    CHECK(w.at(i) == expected);
  });
}

TEST_CASE("polar metric Christoffel symbols") {
  // g = dx^2 + (1+x)^2 dy^2 at the origin: Γ^x_{yy} = -1, Γ^y_{xy} = 1, and Λ = -Γ.
  auto g = TensorJet::zero(2, metric_signature(), 1);
  std::vector<ComponentArray> parts = g.parts();
  parts[0].set({0, 0}, Rational(1));
  parts[0].set({1, 1}, Rational(1));
  parts[1].set({1, 1, 0}, Rational(2));
  const auto lc = levi_civita(TensorJet(2, metric_signature(), parts));
  const auto& lam = lc.part(0);
  CHECK(lam.at({0, 1, 1}) == 1);
  CHECK(lam.at({1, 0, 1}) == -1);
  CHECK(lam.at({1, 1, 0}) == -1);
  CHECK(lam.at({0, 0, 0}) == 0);
  CHECK(lam.at({1, 1, 1}) == 0);
  CHECK(lam.at({0, 0, 1}) == 0);
}

TEST_CASE("covariant derivative sign convention") {
  RationalRng rng(203);
  const int m = 3;
  const auto l = random_connection(rng, m, 0, true);
  const auto v = random_tensor(rng, m, TensorJet::valence(1, 0), 0);
  const auto w = random_tensor(rng, m, TensorJet::valence(0, 1), 0);
  const auto dv = covariant_differential(l, TensorJet(m, v.value_signature(), {v.part(0), ComponentArray(m, v.value_signature().with_lower_slots(1, true))}), 1)[0];
  const auto dw = covariant_differential(l, TensorJet(m, w.value_signature(), {w.part(0), ComponentArray(m, w.value_signature().with_lower_slots(1, true))}), 1)[0];
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s) {
      Rational ev, ew;
      for (int k = 0; k < m; ++k) {
        ev -= l.part(0).at({r, s, k}) * v.part(0).at({k});
        ew += l.part(0).at({k, s, r}) * w.part(0).at({k});
      }
      CHECK(dv.at({r, s}) == ev);
      CHECK(dw.at({r, s}) == ew);
    }
}

TEST_CASE("Levi-Civita connection is metric and symmetric") {
  RationalRng rng(205);
  for (int m = 2; m <= 3; ++m)
    for (int r = 1; r <= 3; ++r) {
      const auto g = random_tensor(rng, m, metric_signature(), r);
      if (sgn(determinant([&] {
            Matrix a(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(m)));
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.part(0).at({i, j});
            return a;
          }())) == 0)
        continue;
      const auto lc = levi_civita(g);
      CHECK(lc.symmetric());
      CHECK(lc.order() == r - 1);
      for (const auto& d : covariant_differential(lc, g, r)) CHECK(d.is_zero());
    }
}

TEST_CASE("Ricci rule for commuted derivatives") {
  RationalRng rng(207);
  for (int m = 2; m <= 3; ++m)
    for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {2, 1}}) {
      CAPTURE(m);
      CAPTURE(p);
      CAPTURE(q);
      const auto l = random_connection(rng, m, 1, true);
      const auto t = random_tensor(rng, m, TensorJet::valence(p, q), 2);
      const auto d = covariant_differential(l, t, 2);
      const auto lhs = alternate(d[1], p + q, p + q + 1);
      CHECK(equal_everywhere(lhs, ricci_bilinear(curvature(l).w, t.part(0))));
    }
}

TEST_CASE("curvature differentials are natural") {
  RationalRng rng(209);
  for (int m = 2; m <= 3; ++m) {
    const auto l = random_connection(rng, m, 3, true);
    const auto g = random_diffeo(rng, m, 5);
    const auto moved = curvature_differentials(act_on_connection(g, l), 0, 2);
    const auto base = curvature_differentials(l, 0, 2);
    REQUIRE(moved.size() == 3);
    for (int i = 0; i <= 2; ++i) {
      const TensorJet value(m, curvature_signature(i), {base[static_cast<std::size_t>(i)].w});
      CHECK(act_on_tensor(g, value).part(0) == moved[static_cast<std::size_t>(i)].w);
    }
  }
}

TEST_CASE("split and combine") {
  RationalRng rng(211);
  for (int r = 0; r <= 2; ++r) {
    const auto l = random_connection(rng, 3, r, false);
    const auto [sym, tor] = split_connection(l);
    CHECK(sym.symmetric());
    CHECK(combine_connection(sym, tor) == l);
    for_each_index(3, 3, [&](std::span<const int> i) {
      CHECK(tor.part(0).at(i) == (l.part(0).at(i) - l.part(0).at({i[0], i[2], i[1]})) / 2);
    });
  }
  RationalRng rng2(213);
  const auto s = random_connection(rng2, 2, 1, true);
  CHECK(split_connection(s).second.part(0).is_zero());
}

TEST_CASE("curvature is antisymmetric in its last pair") {
  RationalRng rng(215);
  const auto w = curvature(random_connection(rng, 3, 1, true)).w;
  for_each_index(3, 4, [&](std::span<const int> i) { CHECK(w.at(i) == -w.at({i[0], i[1], i[3], i[2]})); });
  CHECK_THROWS_AS(curvature(random_connection(rng, 3, 1, false)), std::invalid_argument);
}
