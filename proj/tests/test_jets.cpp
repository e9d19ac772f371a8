#include "natop/connection.hpp"
#include "natop/random.hpp"

#include <doctest.h>

using namespace natop;

TEST_CASE("jet group axioms") {
  RationalRng rng(101);
  for (int m = 1; m <= 3; ++m)
    for (int k = 1; k <= 4; ++k) {
      CAPTURE(m);
      CAPTURE(k);
      const auto g = random_diffeo(rng, m, k);
      const auto h = random_diffeo(rng, m, k);
      const auto f = random_diffeo(rng, m, k);
      const auto e = DiffeoJet::identity(m, k);
      CHECK(compose_jets(g, e) == g);
      CHECK(compose_jets(e, g) == g);
      CHECK(compose_jets(g, invert_jet(g)) == e);
      CHECK(compose_jets(invert_jet(g), g) == e);
      CHECK(compose_jets(compose_jets(g, h), f) == compose_jets(g, compose_jets(h, f)));
    }
}

TEST_CASE("linear jets compose as matrices") {
  Matrix a{{Rational(2), Rational(1)}, {Rational(0), Rational(1)}};
  Matrix b{{Rational(1), Rational(0)}, {Rational(3), Rational(-1)}};
  const auto ga = DiffeoJet::linear(a, 3);
  const auto gb = DiffeoJet::linear(b, 3);
  CHECK(compose_jets(ga, gb) == DiffeoJet::linear(multiply(a, b), 3));
  CHECK(invert_jet(ga) == DiffeoJet::linear(inverse(a), 3));
  CHECK(compose_jets(ga, gb).linear_part() == multiply(a, b));
}

TEST_CASE("polynomial map round trip and truncation") {
  RationalRng rng(103);
  const auto g = random_diffeo(rng, 3, 3);
  const auto f = g.polynomial_map();
  CHECK(DiffeoJet::from_polynomial_map(f) == g);
  CHECK(compose_jets(g, g).truncated(2) == compose_jets(g.truncated(2), g.truncated(2)));
}

TEST_CASE("second order jet composition by hand") {
  // g(x) = x + x^2/2: (g∘g)'' = g'' + g''(g')^2 = 2 and (g^-1)'' = -g''/(g')^3.
  ComponentArray a1(1, DiffeoJet::coeff_signature(1));
  a1.set({0, 0}, Rational(1));
  ComponentArray a2(1, DiffeoJet::coeff_signature(2));
  a2.set({0, 0, 0}, Rational(1));
  const DiffeoJet g(1, {a1, a2});
  const auto gg = compose_jets(g, g);
  CHECK(gg.coeff(1).at({0, 0}) == 1);
  CHECK(gg.coeff(2).at({0, 0, 0}) == 2);
  CHECK(invert_jet(g).coeff(2).at({0, 0, 0}) == -1);
}

TEST_CASE("actions are left actions") {
  RationalRng rng(107);
  for (int m = 2; m <= 3; ++m)
    for (int r = 0; r <= 2; ++r) {
      CAPTURE(m);
      CAPTURE(r);
      const auto g = random_diffeo(rng, m, r + 2);
      const auto h = random_diffeo(rng, m, r + 2);
      for (bool symmetric : {true, false}) {
        const auto l = random_connection(rng, m, r, symmetric);
        CHECK(act_on_connection(compose_jets(g, h), l) == act_on_connection(g, act_on_connection(h, l)));
        CHECK(act_on_connection(DiffeoJet::identity(m, r + 2), l) == l);
      }
      for (const auto& sig : {TensorJet::valence(0, 0), TensorJet::valence(1, 0), TensorJet::valence(1, 2),
                              metric_signature(), torsion_signature()}) {
        const auto t = random_tensor(rng, m, sig, r);
        const auto g1 = g.truncated(r + 1);
        const auto h1 = h.truncated(r + 1);
        CHECK(act_on_tensor(compose_jets(g1, h1), t) == act_on_tensor(g1, act_on_tensor(h1, t)));
        CHECK(act_on_tensor(DiffeoJet::identity(m, r + 1), t) == t);
      }
      const auto s = random_fibre_point(rng, m);
      const auto g2 = g.truncated(2);
      const auto h2 = h.truncated(2);
      CHECK(act_on_cotangent_fibre(compose_jets(g2, h2), s) == act_on_cotangent_fibre(g2, act_on_cotangent_fibre(h2, s)));
      CHECK(act_on_cotangent_fibre(DiffeoJet::identity(m, 2), s) == s);
    }
}

TEST_CASE("scalar jets pull back by composition") {
  RationalRng rng(109);
  const int m = 2;
  const auto t = random_tensor(rng, m, TensorJet::valence(0, 0), 3);
  const auto g = random_diffeo(rng, m, 4);
  const auto moved = act_on_tensor(g, t);
  // A scalar is transported unchanged along g: moved ∘ g = t.
  const auto f = g.polynomial_map();
  std::vector<TruncPoly> fs;
  for (const auto& p : f) fs.push_back(p.truncated(3));
  const auto back = moved.field().at_linear(0).compose(fs);
  CHECK(back == t.field().at_linear(0));
}

TEST_CASE("actions reject short jets") {
  RationalRng rng(113);
  const auto l = random_connection(rng, 2, 1, true);
  CHECK_THROWS(act_on_connection(random_diffeo(rng, 2, 2), l));
  const auto s = random_fibre_point(rng, 2);
  CHECK_THROWS(act_on_cotangent_fibre(random_diffeo(rng, 2, 1), s));
}
