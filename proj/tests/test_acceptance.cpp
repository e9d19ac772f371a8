// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Everything is exact rational arithmetic, so no numeric tolerance applies;
// trial counts and time budgets are pinned below.

#include "natop/classify.hpp"
#include "natop/identities.hpp"
#include "natop/random.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

using namespace natop;

namespace {

constexpr int kBianchiJets = 100;      // per (m, order)
constexpr int kRicciTrials = 50;       // per valence and m
constexpr int kEquivTrials = 100;      // per map, split over m = 2, 3
constexpr int kReconstructJets = 100;  // per (m, r)
constexpr int kMembershipTrials = 100;
constexpr int kGroupTriples = 100;  // per (m, order)
constexpr double kBudgetM3 = 60.0;
constexpr double kBudgetM4 = 600.0;
constexpr double kBudgetBianchi = 30.0;

using Clock = std::chrono::steady_clock;

const std::vector<std::pair<int, int>> kValences{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

ComponentArray random_covector(RationalRng& rng, int m) {
  ComponentArray x(m, IndexSignature({Variance::lower}));
  rng.fill(x);
  return x;
}

ComponentArray moved_xdot(const DiffeoJet& g, const ComponentArray& x) {
  auto s = CotangentFibrePoint::zero(x.dim());
  s.xdot = x;
  return act_on_cotangent_fibre(g.truncated(2), s).xdot;
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

const ClassificationReport* g_report3 = nullptr;

Outcome dimension_run(int m, double budget) {
  const auto t0 = Clock::now();
  static ClassificationReport keep3;
  ClassificationReport rep = classify(m);
  const double s = seconds_since(t0);
  Outcome o;
  o.pass = rep.solution.dimension == 14 && rep.solution.relations_hold() && s <= budget;
  std::ostringstream d;
  d << "m=" << m << " dimension " << rep.solution.dimension << ", " << rep.solution.relations.size() << " relations ";
  d << (rep.solution.relations_hold() ? "hold" : "FAIL");
  for (const auto& r : rep.solution.relations)
    if (!r.holds) d << " [" << r.relation << "]";
  d << ", " << fmt_seconds(s) << " (budget " << budget << "s)";
  o.detail = d.str();
  if (m == 3) {
    keep3 = std::move(rep);
    g_report3 = &keep3;
  }
  return o;
}

Outcome criterion_1() { return dimension_run(3, kBudgetM3); }
Outcome criterion_2() { return dimension_run(4, kBudgetM4); }

Outcome criterion_3() {
  Outcome o;
  std::ostringstream d;
  for (int m : {2, 3, 4}) {
    const auto rep = classify(m, true);
    o.pass = o.pass && rep.solution.dimension == 5 && rep.solution.relations_hold();
    d << "m=" << m << ": " << rep.solution.dimension << "  ";
  }
  o.detail = "torsion-free dimension " + d.str();
  return o;
}

Outcome criterion_4() {
  const auto neg = solve_homogeneity(-2, 1);
  const auto zero = solve_homogeneity(0, 1);
  const auto two = solve_homogeneity(2, 1);
  auto ev = [](int a, int b, int c0, int c1, int d0) {
    ExponentVector e(1);
    e.a = a;
    e.b = b;
    e.c0 = c0;
    e.c1 = c1;
    e.d[0] = d0;
    return e;
  };
  const std::set<ExponentVector> listed{ev(2, 0, 0, 0, 0), ev(1, 1, 0, 0, 0), ev(1, 0, 1, 0, 0), ev(0, 2, 0, 0, 0),
                                        ev(0, 1, 1, 0, 0), ev(0, 0, 2, 0, 0), ev(0, 0, 0, 1, 0), ev(0, 0, 0, 0, 1)};
  const std::set<ExponentVector> got(two.begin(), two.end());
  Outcome o;
  o.pass = neg.empty() && zero.size() == 1 && zero[0].is_zero() && got == listed && two.size() == 8;
  o.detail = "weight -2: " + std::to_string(neg.size()) + " solutions, weight 0: " + std::to_string(zero.size()) +
             (zero.size() == 1 && zero[0].is_zero() ? " (zero vector)" : "") + ", weight 2: " +
             std::to_string(two.size()) + (got == listed ? " (listed set)" : " (set mismatch)");
  return o;
}

Outcome criterion_5() {
  if (g_report3 == nullptr) dimension_run(3, kBudgetM3);
  const auto& rep = *g_report3;
  Outcome o;
  int uu_terms = 0;
  for (const auto& t : rep.terms) uu_terms += t.block == Block::uu;
  RationalRng rng(5005);
  bool shapes = true;
  bool b_free = false, c_free = false;
  for (int p = 0; p < 3; ++p) {
    const auto l = random_connection(rng, 3, 1, false);
    const auto dom = domain_values(l, random_covector(rng, 3));
    for (std::size_t k = 0; k < rep.solution.basis.size(); ++k) {
      const auto s = evaluate_ansatz(rep.terms, rep.solution.basis[k], dom);
      const Rational b = s.lu.at({0, 0});
      const Rational c = s.ul.at({0, 0});
      b_free = b_free || sgn(b) != 0;
      c_free = c_free || sgn(c) != 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          shapes = shapes && s.lu.at({i, j}) == (i == j ? b : Rational(0));
          shapes = shapes && s.ul.at({i, j}) == (i == j ? c : Rational(0));
        }
      shapes = shapes && s.uu.is_zero();
    }
  }
  o.pass = uu_terms == 0 && shapes && b_free && c_free;
  o.detail = "phi_uu terms " + std::to_string(uu_terms) + ", lu and ul blocks " +
             (shapes ? "are multiples of the identity" : "NOT multiples of the identity") + " on every basis vector";
  return o;
}

Outcome criterion_6() {
  const auto t0 = Clock::now();
  RationalRng rng(6006);
  int jets = 0, bad = 0;
  for (int m = 2; m <= 3; ++m)
    for (int r = 1; r <= 3; ++r)
      for (int t = 0; t < kBianchiJets; ++t) {
        const auto l = random_connection(rng, m, r + 1, true);
        const auto rep = check_curvature_space(curvature_differentials(l, 0, r));
        bool ok = true;
        for (const auto& x : rep.bianchi1) ok = ok && x.zero();
        for (const auto& x : rep.bianchi2) ok = ok && x.zero();
        bad += !ok;
        ++jets;
      }
  const double s = seconds_since(t0);
  Outcome o;
  o.pass = bad == 0 && s <= kBudgetBianchi;
  o.detail = std::to_string(jets) + " jets over (m, order) in {2,3}x{1,2,3}, " + std::to_string(bad) +
             " with nonzero residual, " + fmt_seconds(s) + " (budget " + std::to_string(int(kBudgetBianchi)) + "s)";
  return o;
}

Outcome criterion_7() {
  RationalRng rng(7007);
  int trials = 0, bad = 0;
  for (int m = 2; m <= 3; ++m)
    for (auto [p, q] : kValences)
      for (int t = 0; t < kRicciTrials; ++t) {
        const auto l = random_connection(rng, m, 1, true);
        const auto x = random_tensor(rng, m, TensorJet::valence(p, q), 2);
        const auto d = covariant_differential(l, x, 2);
        const auto lhs = alternate(d[1], p + q, p + q + 1);
        const auto rhs = ricci_bilinear(curvature(l).w, x.part(0));
        bool ok = true;
        for_each_index(m, p + q + 2, [&](std::span<const int> i) { ok = ok && lhs.at(i) == rhs.at(i); });
        bad += !ok;
        ++trials;
      }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(trials) + " trials over 5 valences at m=2,3, " + std::to_string(bad) + " mismatches";
  return o;
}

Outcome criterion_8() {
  RationalRng rng(8008);
  int curv = 0, diffs = 0, first = 0, second = 0, family = 0;
  const int per_m = kEquivTrials / 2;
  for (int m = 2; m <= 3; ++m)
    for (int t = 0; t < per_m; ++t) {
      // curvature and its differentials up to i = 2
      {
        const auto l = random_connection(rng, m, 3, true);
        const auto g = random_diffeo(rng, m, 5);
        const auto gl = act_on_connection(g, l);
        const auto base = curvature_differentials(l, 0, 2);
        const auto moved = curvature_differentials(gl, 0, 2);
        auto transport = [&](const CurvatureValue& w) {
          return act_on_tensor(g.truncated(1), TensorJet(m, curvature_signature(w.order), {w.w})).part(0);
        };
        curv += transport(curvature(l)) == curvature(gl).w;
        bool ok = true;
        for (std::size_t i = 0; i < base.size(); ++i) ok = ok && transport(base[i]) == moved[i].w;
        diffs += ok;
      }
      {
        const int r = 1 + t % 2;
        const auto l = random_connection(rng, m, r, true);
        const auto g = random_diffeo(rng, m, r + 2);
        const int k = 1 + t % (r + 2);
        first += reduce_first(act_on_connection(g, l), k) == act_on_reduction(g, reduce_first(l, k));
      }
      {
        const int r = 2;
        const auto [p, q] = kValences[static_cast<std::size_t>(t) % kValences.size()];
        const auto x = random_tensor(rng, m, TensorJet::valence(p, q), r);
        const auto l = random_connection(rng, m, r - 1, true);
        const auto g = random_diffeo(rng, m, r + 1);
        const int k = 1 + t % (r + 1);
        second += reduce_second(act_on_connection(g, l), act_on_tensor(g, x), k) ==
                  act_on_reduction(g, reduce_second(l, x, k));
      }
      {
        const auto l = random_connection(rng, m, 1, t % 2 == 0);
        const auto x = random_covector(rng, m);
        const auto g = random_diffeo(rng, m, 3);
        FamilyParameters p;
        for (const auto& n : family_parameter_names()) p[n] = rng.rational();
        family += evaluate_family(p, act_on_connection(g, l), moved_xdot(g, x)) ==
                  act_on_cotangent_fibre(g, evaluate_family(p, l, x));
      }
    }
  const int n = 2 * per_m;
  Outcome o;
  o.pass = curv == n && diffs == n && first == n && second == n && family == n;
  std::ostringstream d;
  d << "commuting out of " << n << ": curvature " << curv << ", differentials " << diffs << ", reduce_first " << first
    << ", reduce_second " << second << ", evaluate_family " << family;
  o.detail = d.str();
  return o;
}

Outcome criterion_9() {
  RationalRng rng(9009);
  int jets = 0, bad = 0;
  for (int m = 2; m <= 3; ++m)
    for (int r = 1; r <= 2; ++r)
      for (int t = 0; t < kReconstructJets; ++t) {
        const auto l = random_connection(rng, m, r, true);
        const auto ph = phi_decompose(l);
        bad += !(psi_reconstruct(ph.sym_top, ph.lower, ph.w) == l);
        ++jets;
      }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(jets) + " jets, r in {1,2}, m in {2,3}, " + std::to_string(bad) + " mismatches";
  return o;
}

Outcome criterion_10() {
  RationalRng rng(10010);
  int cs_bad = 0, rs_bad = 0;
  for (int t = 0; t < kMembershipTrials; ++t) {
    const int m = 2 + t % 2;
    const int r = 1 + t % 3;
    cs_bad += !check_curvature_space(curvature_differentials(random_connection(rng, m, r + 1, true), 0, r)).member;
    const auto [p, q] = kValences[static_cast<std::size_t>(t) % kValences.size()];
    const int rr = 2 + t % 2;
    const auto x = random_tensor(rng, m, TensorJet::valence(p, q), rr);
    const auto l = random_connection(rng, m, rr - 1, true);
    const auto rd = ricci_data(reduce_second(l, x, rr + 1));
    rs_bad += !check_ricci_subspace(rd.ws, rd.vs, rd.value_signature).member;
  }
  Outcome o;
  o.pass = cs_bad == 0 && rs_bad == 0;
  o.detail = std::to_string(kMembershipTrials) + " trials each: curvature space rejects " + std::to_string(cs_bad) +
             ", Ricci subspace rejects " + std::to_string(rs_bad);
  return o;
}

Outcome criterion_11() {
  RationalRng rng(11011);
  bool theta_ok = true, omega_ok = true;
  for (int m = 2; m <= 3; ++m) {
    const auto l = random_connection(rng, m, 1, false);
    const auto x = random_covector(rng, m);
    for (const auto& f : canonical_forms(l, x)) {
      if (f.label != "θ⊗θ") continue;
      for (const auto& [k, v] : f.parameters) theta_ok = theta_ok && v == (k == "A" ? 1 : 0);
      theta_ok = theta_ok && evaluate_family(f.parameters, l, x) == f.value;
    }
    // C = -B on flat input against d^λ⊗ḋ_λ - ḋ_λ⊗d^λ
    for (const Rational& b : {Rational(1), Rational(-7, 3)}) {
      FamilyParameters p;
      for (const auto& n : family_parameter_names()) p[n] = 0;
      p["B"] = b;
      p["C"] = -b;
      const auto s = evaluate_family(p, ConnectionJet::zero(m, 1, true), x);
      auto omega = CotangentFibrePoint::zero(m);
      omega.xdot = x;
      for (int i = 0; i < m; ++i) {
        omega.lu.set({i, i}, b);
        omega.ul.set({i, i}, -b);
      }
      omega_ok = omega_ok && s == omega;
    }
  }
  Outcome o;
  o.pass = theta_ok && omega_ok;
  o.detail = std::string("theta⊗theta -> (A=1, rest 0) ") + (theta_ok ? "yes" : "NO") +
             ", C=-B member equals B*omega on flat input " + (omega_ok ? "yes" : "NO");
  return o;
}

Outcome criterion_12() {
  RationalRng rng(12012);
  int triples = 0, bad = 0;
  for (int m = 1; m <= 3; ++m)
    for (int k = 1; k <= 4; ++k)
      for (int t = 0; t < kGroupTriples; ++t) {
        const auto g = random_diffeo(rng, m, k);
        const auto h = random_diffeo(rng, m, k);
        const auto f = random_diffeo(rng, m, k);
        const auto e = DiffeoJet::identity(m, k);
        const auto gi = invert_jet(g);
        const bool ok = compose_jets(compose_jets(g, h), f) == compose_jets(g, compose_jets(h, f)) &&
                        compose_jets(g, e) == g && compose_jets(e, g) == g && compose_jets(g, gi) == e &&
                        compose_jets(gi, g) == e;
        bad += !ok;
        ++triples;
      }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(triples) + " triples over m<=3, order<=4, " + std::to_string(bad) + " failures";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"classification dimension at m=3", criterion_1},
      {"classification dimension at m=4", criterion_2},
      {"torsion-free dimension", criterion_3},
      {"homogeneity solutions", criterion_4},
      {"block results from the pipeline", criterion_5},
      {"Bianchi identities", criterion_6},
      {"Ricci identity", criterion_7},
      {"equivariance", criterion_8},
      {"reconstruction", criterion_9},
      {"membership", criterion_10},
      {"canonical forms", criterion_11},
      {"jet group axioms", criterion_12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str(),
                fmt_seconds(seconds_since(t0)).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
