#include "natop/random.hpp"

namespace natop {

std::int64_t RationalRng::integer(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(eng_() % span);
}

Rational RationalRng::rational() {
  const auto p = integer(-bound_, bound_);
  const auto q = integer(1, bound_);
  return make_rational(p, q);
}

Rational RationalRng::sparse_rational(double zero_fraction) {
  const auto cut = static_cast<std::uint64_t>(zero_fraction * 1000.0);
  if (eng_() % 1000 < cut) return 0;
  return rational();
}

void RationalRng::fill(ComponentArray& a) {
  for (std::size_t k = 0; k < a.size(); ++k) a.set_value(k, rational());
}

DiffeoJet random_diffeo(RationalRng& rng, int dim, int order) {
  std::vector<ComponentArray> c;
  for (int i = 1; i <= order; ++i) {
    c.emplace_back(dim, DiffeoJet::coeff_signature(i));
    rng.fill(c.back());
  }
  for (;;) {
    Matrix a(static_cast<std::size_t>(dim), std::vector<Rational>(static_cast<std::size_t>(dim)));
    for (auto& row : a)
      for (auto& v : row) v = rng.rational();
    if (sgn(determinant(a)) == 0) continue;
    for (int l = 0; l < dim; ++l)
      for (int mu = 0; mu < dim; ++mu) c[0].set({l, mu}, a[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)]);
    return DiffeoJet(dim, std::move(c));
  }
}

DiffeoJet random_kernel_diffeo(RationalRng& rng, int dim, int order, int identity_below) {
  std::vector<ComponentArray> c;
  for (int i = 1; i <= order; ++i) {
    c.emplace_back(dim, DiffeoJet::coeff_signature(i));
    if (i == 1)
      for (int l = 0; l < dim; ++l) c.back().set({l, l}, Rational(1));
    else if (i >= identity_below)
      rng.fill(c.back());
  }
  if (identity_below <= 1) {
    for (;;) {
      ComponentArray lin(dim, DiffeoJet::coeff_signature(1));
      rng.fill(lin);
      Matrix a(static_cast<std::size_t>(dim), std::vector<Rational>(static_cast<std::size_t>(dim)));
      for (int l = 0; l < dim; ++l)
        for (int mu = 0; mu < dim; ++mu) a[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)] = lin.at({l, mu});
      if (sgn(determinant(a)) == 0) continue;
      c[0] = lin;
      break;
    }
  }
  return DiffeoJet(dim, std::move(c));
}

ConnectionJet random_connection(RationalRng& rng, int dim, int order, bool symmetric) {
  std::vector<ComponentArray> p;
  for (int i = 0; i <= order; ++i) {
    p.emplace_back(dim, ConnectionJet::part_signature(i, symmetric));
    rng.fill(p.back());
  }
  return ConnectionJet(dim, symmetric, std::move(p));
}

TensorJet random_tensor(RationalRng& rng, int dim, const IndexSignature& value_signature, int order) {
  TensorJet t = TensorJet::zero(dim, value_signature, order);
  std::vector<ComponentArray> p = t.parts();
  for (auto& a : p) rng.fill(a);
  return TensorJet(dim, value_signature, std::move(p));
}

CotangentFibrePoint random_fibre_point(RationalRng& rng, int dim) {
  auto s = CotangentFibrePoint::zero(dim);
  rng.fill(s.xdot);
  rng.fill(s.ll);
  rng.fill(s.lu);
  rng.fill(s.ul);
  rng.fill(s.uu);
  return s;
}

}  // namespace natop
