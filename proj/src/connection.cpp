#include "natop/connection.hpp"

#include <stdexcept>

namespace natop {

namespace {

using V = Variance;

void require_symmetric(const ConnectionJet& l, const char* what) {
  if (!l.symmetric())
    throw std::invalid_argument(std::string(what) + ": needs a symmetric connection jet (split it first)");
}

// Product of two rank-2 matrix fields, contracting a's column with b's row.
Field matmul(const Field& a, const Field& b, std::vector<Variance> slots) {
  const int d = std::min(a.degree(), b.degree());
  Field out(a.dim(), std::move(slots), d);
  const int m = a.dim();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      auto& t = out.at({i, j});
      for (int k = 0; k < m; ++k) t.add_product(a.at({i, k}), b.at({k, j}));
    }
  return out;
}

// Inverse of a matrix field with invertible constant part, by the Neumann
// series around the constant part (which terminates by degree).
Field matrix_field_inverse(const Field& g) {
  const int m = g.dim();
  const int d = g.degree();
  Matrix g0(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(m)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.at({i, j}).constant_term();
  if (sgn(determinant(g0)) == 0) throw std::domain_error("levi_civita: singular metric");
  const Matrix g0inv = inverse(g0);
  Field c(m, {V::upper, V::upper}, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) c.at({i, j}).coeff(0) = g0inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  // minus_m = −g0⁻¹ (g − g0)
  Field n = g;
  for (std::size_t k = 0; k < n.size(); ++k) n.at_linear(k).coeff(0) = 0;
  Field minus_m = matmul(c, n, {V::upper, V::lower});
  for (std::size_t k = 0; k < minus_m.size(); ++k) minus_m.at_linear(k) *= Rational(-1);
  Field term = c;
  Field sum = c;
  for (int k = 1; k <= d; ++k) {
    term = matmul(minus_m, term, {V::upper, V::upper});
    for (std::size_t t = 0; t < sum.size(); ++t) sum.at_linear(t) += term.at_linear(t);
  }
  return sum;
}

}  // namespace

IndexSignature torsion_signature() {
  return IndexSignature({V::upper, V::lower, V::lower}, {{Symmetry::antisymmetric, {1, 2}}});
}

IndexSignature metric_signature() { return IndexSignature({V::lower, V::lower}, {{Symmetry::symmetric, {0, 1}}}); }

IndexSignature curvature_signature(int i) {
  return IndexSignature({V::lower, V::upper, V::lower, V::lower}, {{Symmetry::antisymmetric, {2, 3}}})
      .with_lower_slots(i, false);
}

CurvatureValue zero_curvature(int dim, int order) { return {order, ComponentArray(dim, curvature_signature(order))}; }

std::pair<ConnectionJet, TorsionJet> split_connection(const ConnectionJet& l) {
  std::vector<ComponentArray> sym, tor;
  for (int i = 0; i <= l.order(); ++i) {
    sym.push_back(restructure(symmetrize(l.part(i), {1, 2}), ConnectionJet::part_signature(i, true)));
    tor.push_back(restructure(alternate(l.part(i), 1, 2), torsion_signature().with_lower_slots(i, true)));
  }
  return {ConnectionJet(l.dim(), true, std::move(sym)), TensorJet(l.dim(), torsion_signature(), std::move(tor))};
}

ConnectionJet combine_connection(const ConnectionJet& sym, const TorsionJet& torsion) {
  if (sym.dim() != torsion.dim() || sym.order() != torsion.order())
    throw std::invalid_argument("combine_connection: shape mismatch");
  std::vector<ComponentArray> parts;
  for (int i = 0; i <= sym.order(); ++i) {
    ComponentArray p(sym.dim(), ConnectionJet::part_signature(i, false));
    for (std::size_t k = 0; k < p.size(); ++k) {
      const auto& idx = p.representative(k);
      p.set_value(k, sym.part(i).at(idx) + torsion.part(i).at(idx));
    }
    parts.push_back(std::move(p));
  }
  return ConnectionJet(sym.dim(), false, std::move(parts));
}

Field curvature_field(const Field& lam) {
  if (lam.rank() != 3) throw std::invalid_argument("curvature_field: connection field must have rank 3");
  if (lam.degree() < 1) throw std::invalid_argument("curvature: connection jet order must be >= 1");
  const int m = lam.dim();
  const Field d = partial_gradient(lam);
  const Field l = lam.truncated(d.degree());
  Field w(m, {V::lower, V::upper, V::lower, V::lower}, d.degree());
  for (int nu = 0; nu < m; ++nu)
    for (int rho = 0; rho < m; ++rho)
      for (int la = 0; la < m; ++la)
        for (int mu = 0; mu < m; ++mu) {
          auto& t = w.at({nu, rho, la, mu});
          t += d.at({rho, la, nu, mu});
          t -= d.at({rho, mu, nu, la});
          for (int s = 0; s < m; ++s) {
            t.add_product(l.at({s, mu, nu}), l.at({rho, la, s}));
            t.sub_product(l.at({s, la, nu}), l.at({rho, mu, s}));
          }
        }
  return w;
}

CurvatureValue curvature(const ConnectionJet& l) {
  require_symmetric(l, "curvature");
  if (l.order() < 1) throw std::invalid_argument("curvature: connection jet order must be >= 1");
  return {0, curvature_field(l.truncated(1).field()).value_at_origin(curvature_signature(0))};
}

std::vector<ComponentArray> covariant_differential(const ConnectionJet& l, const TensorJet& t, int steps) {
  require_symmetric(l, "covariant_differential");
  if (l.dim() != t.dim()) throw std::invalid_argument("covariant_differential: dimension mismatch");
  if (steps < 0) throw std::invalid_argument("covariant_differential: negative step count");
  if (steps == 0) return {};
  if (t.order() < steps)
    throw std::invalid_argument("covariant_differential: tensor jet order " + std::to_string(t.order()) + " < " +
                                std::to_string(steps) + " steps");
  if (l.order() < steps - 1)
    throw std::invalid_argument("covariant_differential: connection jet order " + std::to_string(l.order()) +
                                " < " + std::to_string(steps - 1) + " required");
  const Field lam = l.truncated(steps - 1).field();
  Field x = t.truncated(steps).field();
  std::vector<ComponentArray> out;
  for (int i = 1; i <= steps; ++i) {
    x = covariant_derivative(x, lam);
    out.push_back(x.value_at_origin(t.value_signature().with_lower_slots(i, false)));
  }
  return out;
}

std::vector<CurvatureValue> curvature_differentials(const ConnectionJet& l, int k, int r) {
  require_symmetric(l, "curvature_differentials");
  if (k < 0 || k > r) throw std::invalid_argument("curvature_differentials: need 0 <= k <= r");
  if (l.order() < r + 1)
    throw std::invalid_argument("curvature_differentials: connection jet order " + std::to_string(l.order()) +
                                " < " + std::to_string(r + 1) + " required");
  const Field lam = l.truncated(r + 1).field();
  Field x = curvature_field(lam);
  std::vector<CurvatureValue> out;
  for (int i = 0; i <= r; ++i) {
    if (i >= k) out.push_back({i, x.value_at_origin(curvature_signature(i))});
    if (i < r) x = covariant_derivative(x, lam);
  }
  return out;
}

ConnectionJet levi_civita(const MetricJet& g) {
  if (!(g.value_signature() == metric_signature()))
    throw std::invalid_argument("levi_civita: input is not a metric jet");
  if (g.order() < 1) throw std::invalid_argument("levi_civita: metric jet order must be >= 1");
  const int m = g.dim();
  const Field gf = g.field();
  const Field dg = partial_gradient(gf);
  const Field ginv = matrix_field_inverse(gf).truncated(dg.degree());
  Field lam(m, {V::upper, V::lower, V::lower}, dg.degree());
  const Rational minus_half = make_rational(-1, 2);
  for (int la = 0; la < m; ++la)
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) {
        auto& t = lam.at({la, mu, nu});
        for (int s = 0; s < m; ++s) {
          TruncPoly c = dg.at({s, nu, mu}) + dg.at({s, mu, nu}) - dg.at({mu, nu, s});
          t.add_product(ginv.at({la, s}), c);
        }
        t *= minus_half;
      }
  return ConnectionJet::from_field(lam, true);
}

ComponentArray ricci_bilinear(const ComponentArray& w, const ComponentArray& x) {
  if (!(w.signature() == curvature_signature(0))) throw std::invalid_argument("ricci_bilinear: w must be an order-0 curvature value");
  if (w.dim() != x.dim()) throw std::invalid_argument("ricci_bilinear: dimension mismatch");
  const int m = x.dim();
  const int r = x.rank();
  ComponentArray out(m, x.signature().without_groups().with_lower_slots(2, false));
  const Rational half = make_rational(1, 2);
  std::vector<int> src(static_cast<std::size_t>(r));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& idx = out.representative(k);
    const int al = idx[static_cast<std::size_t>(r)];
    const int be = idx[static_cast<std::size_t>(r) + 1];
    Rational acc;
    for (int a = 0; a < r; ++a) {
      std::copy(idx.begin(), idx.begin() + r, src.begin());
      const int va = idx[static_cast<std::size_t>(a)];
      for (int s = 0; s < m; ++s) {
        src[static_cast<std::size_t>(a)] = s;
        if (x.signature().variance(a) == V::upper)
          acc += w.at({s, va, be, al}) * x.at(src);
        else
          acc -= w.at({va, s, be, al}) * x.at(src);
      }
    }
    out.set_value(k, acc * half);
  }
  return out;
}

}  // namespace natop
