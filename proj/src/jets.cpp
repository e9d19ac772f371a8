#include "natop/jets.hpp"

#include <stdexcept>

namespace natop {

namespace {

Field map_field(int dim, std::span<const TruncPoly> f) {
  Field out(dim, {Variance::upper}, f.empty() ? 0 : f[0].degree());
  for (int l = 0; l < dim; ++l) out.at({l}) = f[static_cast<std::size_t>(l)];
  return out;
}

Field compose_field(const Field& t, std::span<const TruncPoly> h) {
  const int d = std::min(t.degree(), h[0].degree());
  Field out(t.dim(), t.slots(), d);
  for (std::size_t k = 0; k < t.size(); ++k) out.at_linear(k) = t.at_linear(k).compose(h);
  return out;
}

// Applies a matrix-valued field to one slot: for an upper slot
// out^{..λ..} = M^λ_ρ t^{..ρ..}; for a lower slot out_{..μ..} = M^σ_μ t_{..σ..}.
Field apply_slot(const Field& t, int slot, const Field& mat) {
  const int d = std::min(t.degree(), mat.degree());
  Field out(t.dim(), t.slots(), d);
  const int m = t.dim();
  const bool upper = t.slots()[static_cast<std::size_t>(slot)] == Variance::upper;
  std::vector<int> src(static_cast<std::size_t>(t.rank()));
  for_each_index(m, t.rank(), [&](std::span<const int> idx) {
    auto& target = out.at(idx);
    std::copy(idx.begin(), idx.end(), src.begin());
    const int v = idx[static_cast<std::size_t>(slot)];
    for (int k = 0; k < m; ++k) {
      src[static_cast<std::size_t>(slot)] = k;
      target.add_product(upper ? mat.at({v, k}) : mat.at({k, v}), t.at(src));
    }
  });
  return out;
}

Field tensorial_transport(Field t, const Field& jac_at_h, const Field& inv_jac) {
  for (int s = 0; s < t.rank(); ++s)
    t = apply_slot(t, s, t.slots()[static_cast<std::size_t>(s)] == Variance::upper ? jac_at_h : inv_jac);
  return t;
}

struct Transport {
  std::vector<TruncPoly> h;  // inverse map
  Field jac_at_h;            // a(h(y))
  Field inv_jac;             // ã(y)
  Field inv_hessian;         // ∂_μ∂_ν h^ρ(y), slots (ρ, μ, ν)
};

Transport make_transport(const DiffeoJet& g, bool hessian) {
  Transport tr;
  const int m = g.dim();
  tr.h = invert_jet(g).polynomial_map();
  Field f = map_field(m, g.polynomial_map());
  Field hf = map_field(m, tr.h);
  tr.jac_at_h = compose_field(partial_gradient(f), tr.h);
  tr.inv_jac = partial_gradient(hf);
  if (hessian) tr.inv_hessian = partial_gradient(tr.inv_jac);
  return tr;
}

void require_dims(int a, int b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

// DiffeoJet

IndexSignature DiffeoJet::coeff_signature(int i) {
  return IndexSignature({Variance::upper}).with_lower_slots(i, true);
}

DiffeoJet::DiffeoJet(int dim, std::vector<ComponentArray> coeffs) : dim_(dim), coeffs_(std::move(coeffs)) {
  if (dim < 1) throw std::invalid_argument("DiffeoJet: dim must be >= 1");
  if (coeffs_.empty()) throw std::invalid_argument("DiffeoJet: order must be >= 1");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].dim() != dim || !(coeffs_[i].signature() == coeff_signature(static_cast<int>(i) + 1)))
      throw std::invalid_argument("DiffeoJet: coefficient array " + std::to_string(i + 1) + " has the wrong shape");
  }
  if (sgn(determinant(linear_part())) == 0) throw std::domain_error("DiffeoJet: singular linear part");
}

DiffeoJet DiffeoJet::identity(int dim, int order) { return linear(identity_matrix(dim), order); }

DiffeoJet DiffeoJet::linear(const Matrix& a, int order) {
  const int dim = static_cast<int>(a.size());
  if (order < 1) throw std::invalid_argument("DiffeoJet: order must be >= 1");
  std::vector<ComponentArray> c;
  for (int i = 1; i <= order; ++i) c.emplace_back(dim, coeff_signature(i));
  for (int l = 0; l < dim; ++l)
    for (int mu = 0; mu < dim; ++mu) c[0].set({l, mu}, a[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)]);
  return DiffeoJet(dim, std::move(c));
}

Matrix DiffeoJet::linear_part() const {
  Matrix a(static_cast<std::size_t>(dim_), std::vector<Rational>(static_cast<std::size_t>(dim_)));
  for (int l = 0; l < dim_; ++l)
    for (int mu = 0; mu < dim_; ++mu) a[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)] = coeffs_[0].at({l, mu});
  return a;
}

DiffeoJet DiffeoJet::truncated(int order) const {
  if (order < 1 || order > this->order()) throw std::invalid_argument("DiffeoJet::truncated: bad order");
  return DiffeoJet(dim_, std::vector<ComponentArray>(coeffs_.begin(), coeffs_.begin() + order));
}

std::vector<TruncPoly> DiffeoJet::polynomial_map() const {
  std::vector<ComponentArray> parts;
  parts.emplace_back(dim_, IndexSignature({Variance::upper}));
  parts.insert(parts.end(), coeffs_.begin(), coeffs_.end());
  Field f = field_from_jet(dim_, {Variance::upper}, parts);
  std::vector<TruncPoly> out;
  for (int l = 0; l < dim_; ++l) out.push_back(f.at({l}));
  return out;
}

DiffeoJet DiffeoJet::from_polynomial_map(std::span<const TruncPoly> f) {
  const int dim = static_cast<int>(f.size());
  Field fl = map_field(dim, f);
  std::vector<ComponentArray> c;
  for (int l = 0; l < dim; ++l)
    if (sgn(fl.at({l}).constant_term()) != 0) throw std::invalid_argument("DiffeoJet: map does not fix the origin");
  const IndexSignature sig({Variance::upper});
  for (int i = 1; i <= fl.degree(); ++i) c.push_back(fl.jet_part(sig, i));
  return DiffeoJet(dim, std::move(c));
}

DiffeoJet compose_jets(const DiffeoJet& g, const DiffeoJet& h) {
  require_dims(g.dim(), h.dim(), "compose_jets");
  if (g.order() != h.order()) throw std::invalid_argument("compose_jets: order mismatch");
  const auto fg = g.polynomial_map();
  const auto fh = h.polynomial_map();
  std::vector<TruncPoly> out;
  for (const auto& p : fg) out.push_back(p.compose(fh));
  return DiffeoJet::from_polynomial_map(out);
}

DiffeoJet invert_jet(const DiffeoJet& g) {
  const int m = g.dim();
  const int k = g.order();
  const Matrix ainv = inverse(g.linear_part());
  const auto f = g.polynomial_map();
  std::vector<TruncPoly> h;
  for (int l = 0; l < m; ++l) {
    TruncPoly p(m, k);
    for (int mu = 0; mu < m; ++mu)
      p += TruncPoly::variable(m, k, mu) * ainv[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)];
    h.push_back(std::move(p));
  }
  for (int d = 2; d <= k; ++d) {
    std::vector<TruncPoly> err;
    for (const auto& p : f) err.push_back(p.compose(h).homogeneous_part(d));
    for (int l = 0; l < m; ++l)
      for (int mu = 0; mu < m; ++mu) {
        const Rational& c = ainv[static_cast<std::size_t>(l)][static_cast<std::size_t>(mu)];
        if (sgn(c) != 0) h[static_cast<std::size_t>(l)] -= err[static_cast<std::size_t>(mu)] * c;
      }
  }
  return DiffeoJet::from_polynomial_map(h);
}

// ConnectionJet

IndexSignature ConnectionJet::part_signature(int i, bool symmetric) {
  std::vector<SlotGroup> groups;
  if (symmetric) groups.push_back({Symmetry::symmetric, {1, 2}});
  return IndexSignature({Variance::upper, Variance::lower, Variance::lower}, groups).with_lower_slots(i, true);
}

ConnectionJet::ConnectionJet(int dim, bool symmetric, std::vector<ComponentArray> parts)
    : dim_(dim), symmetric_(symmetric), parts_(std::move(parts)) {
  if (dim < 1) throw std::invalid_argument("ConnectionJet: dim must be >= 1");
  if (parts_.empty()) throw std::invalid_argument("ConnectionJet: order must be >= 0");
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].dim() != dim || !(parts_[i].signature() == part_signature(static_cast<int>(i), symmetric)))
      throw std::invalid_argument("ConnectionJet: part " + std::to_string(i) + " has the wrong shape");
}

ConnectionJet ConnectionJet::zero(int dim, int order, bool symmetric) {
  if (order < 0) throw std::invalid_argument("ConnectionJet: order must be >= 0");
  std::vector<ComponentArray> p;
  for (int i = 0; i <= order; ++i) p.emplace_back(dim, part_signature(i, symmetric));
  return ConnectionJet(dim, symmetric, std::move(p));
}

ConnectionJet ConnectionJet::truncated(int order) const {
  if (order < 0 || order > this->order()) throw std::invalid_argument("ConnectionJet::truncated: bad order");
  return ConnectionJet(dim_, symmetric_, std::vector<ComponentArray>(parts_.begin(), parts_.begin() + order + 1));
}

Field ConnectionJet::field() const {
  return field_from_jet(dim_, {Variance::upper, Variance::lower, Variance::lower}, parts_);
}

ConnectionJet ConnectionJet::from_field(const Field& f, bool symmetric) {
  if (f.rank() != 3) throw std::invalid_argument("ConnectionJet::from_field: rank must be 3");
  const int m = f.dim();
  if (symmetric)
    for (int l = 0; l < m; ++l)
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
          if (!(f.at({l, a, b}) == f.at({l, b, a})))
            throw std::invalid_argument("ConnectionJet::from_field: field is not symmetric in its lower pair");
  const IndexSignature base = part_signature(0, symmetric);
  std::vector<ComponentArray> p;
  for (int i = 0; i <= f.degree(); ++i) p.push_back(f.jet_part(base, i));
  return ConnectionJet(m, symmetric, std::move(p));
}

// TensorJet

IndexSignature TensorJet::valence(int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("TensorJet::valence: negative count");
  std::vector<Variance> v(static_cast<std::size_t>(p), Variance::upper);
  v.insert(v.end(), static_cast<std::size_t>(q), Variance::lower);
  return IndexSignature(v);
}

TensorJet::TensorJet(int dim, IndexSignature value_signature, std::vector<ComponentArray> parts)
    : dim_(dim), sig_(std::move(value_signature)), parts_(std::move(parts)) {
  if (dim < 1) throw std::invalid_argument("TensorJet: dim must be >= 1");
  if (parts_.empty()) throw std::invalid_argument("TensorJet: order must be >= 0");
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].dim() != dim || !(parts_[i].signature() == sig_.with_lower_slots(static_cast<int>(i), true)))
      throw std::invalid_argument("TensorJet: part " + std::to_string(i) + " has the wrong shape");
}

TensorJet TensorJet::zero(int dim, const IndexSignature& value_signature, int order) {
  if (order < 0) throw std::invalid_argument("TensorJet: order must be >= 0");
  std::vector<ComponentArray> p;
  for (int i = 0; i <= order; ++i) p.emplace_back(dim, value_signature.with_lower_slots(i, true));
  return TensorJet(dim, value_signature, std::move(p));
}

TensorJet TensorJet::truncated(int order) const {
  if (order < 0 || order > this->order()) throw std::invalid_argument("TensorJet::truncated: bad order");
  return TensorJet(dim_, sig_, std::vector<ComponentArray>(parts_.begin(), parts_.begin() + order + 1));
}

Field TensorJet::field() const { return field_from_jet(dim_, sig_.variances(), parts_); }

TensorJet TensorJet::from_field(const Field& f, const IndexSignature& value_signature) {
  std::vector<ComponentArray> p;
  for (int i = 0; i <= f.degree(); ++i) p.push_back(f.jet_part(value_signature, i));
  return TensorJet(f.dim(), value_signature, std::move(p));
}

// Fibre

CotangentFibrePoint CotangentFibrePoint::zero(int dim) {
  using V = Variance;
  return {ComponentArray(dim, IndexSignature({V::lower})), ComponentArray(dim, IndexSignature({V::lower, V::lower})),
          ComponentArray(dim, IndexSignature({V::lower, V::upper})), ComponentArray(dim, IndexSignature({V::upper, V::lower})),
          ComponentArray(dim, IndexSignature({V::upper, V::upper}))};
}

// Actions

ConnectionJet act_on_connection(const DiffeoJet& g, const ConnectionJet& l) {
  require_dims(g.dim(), l.dim(), "act_on_connection");
  if (g.order() != l.order() + 2)
    throw std::invalid_argument("act_on_connection: diffeomorphism jet order must be connection order + 2");
  const Transport tr = make_transport(g, true);
  Field lam = tensorial_transport(compose_field(l.field(), tr.h), tr.jac_at_h, tr.inv_jac);
  const Field inhom = apply_slot(tr.inv_hessian, 0, tr.jac_at_h);
  for (std::size_t k = 0; k < lam.size(); ++k) lam.at_linear(k) -= inhom.at_linear(k);
  return ConnectionJet::from_field(lam, l.symmetric());
}

TensorJet act_on_tensor(const DiffeoJet& g, const TensorJet& t) {
  require_dims(g.dim(), t.dim(), "act_on_tensor");
  if (g.order() < t.order() + 1)
    throw std::invalid_argument("act_on_tensor: diffeomorphism jet order must be at least tensor order + 1");
  const Transport tr = make_transport(g.truncated(t.order() + 1), false);
  Field out = tensorial_transport(compose_field(t.field(), tr.h), tr.jac_at_h, tr.inv_jac);
  return TensorJet::from_field(out, t.value_signature());
}

CotangentFibrePoint act_on_cotangent_fibre(const DiffeoJet& g, const CotangentFibrePoint& s) {
  require_dims(g.dim(), s.dim(), "act_on_cotangent_fibre");
  if (g.order() < 2) throw std::invalid_argument("act_on_cotangent_fibre: needs a 2-jet");
  const int m = g.dim();
  const auto n = static_cast<std::size_t>(m);
  const Matrix a = g.linear_part();
  const Matrix at = inverse(a);
  const ComponentArray& a2 = g.coeff(2);
  CotangentFibrePoint out = CotangentFibrePoint::zero(m);
  std::vector<Rational> y(n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t mu = 0; mu < n; ++mu) y[l] += at[mu][l] * s.xdot.at({static_cast<int>(mu)});
    out.xdot.set({static_cast<int>(l)}, y[l]);
  }
  // q[ρ][λ] = a^α_{ρβ} ã^β_λ ẏ_α
  Matrix q(n, std::vector<Rational>(n));
  for (int rho = 0; rho < m; ++rho)
    for (int lam = 0; lam < m; ++lam) {
      Rational acc;
      for (int al = 0; al < m; ++al)
        for (int be = 0; be < m; ++be) acc += a2.at({al, rho, be}) * at[static_cast<std::size_t>(be)][static_cast<std::size_t>(lam)] * y[static_cast<std::size_t>(al)];
      q[static_cast<std::size_t>(rho)][static_cast<std::size_t>(lam)] = acc;
    }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      Rational ll, lu, ul, uu;
      for (int r = 0; r < m; ++r)
        for (int t = 0; t < m; ++t) {
          const auto ur = static_cast<std::size_t>(r), ut = static_cast<std::size_t>(t);
          const Rational phi_ll = s.ll.at({r, t});
          const Rational phi_lu = s.lu.at({r, t});
          const Rational phi_ul = s.ul.at({r, t});
          const Rational phi_uu = s.uu.at({r, t});
          ll += at[ur][ui] * at[ut][uj] * phi_ll + at[ur][ui] * q[ut][uj] * phi_lu + q[ur][ui] * at[ut][uj] * phi_ul +
                q[ur][ui] * q[ut][uj] * phi_uu;
          lu += at[ur][ui] * a[uj][ut] * phi_lu + a[uj][ut] * q[ur][ui] * phi_uu;
          ul += a[ui][ur] * at[ut][uj] * phi_ul + a[ui][ur] * q[ut][uj] * phi_uu;
          uu += a[ui][ur] * a[uj][ut] * phi_uu;
        }
      out.ll.set({i, j}, ll);
      out.lu.set({i, j}, lu);
      out.ul.set({i, j}, ul);
      out.uu.set({i, j}, uu);
    }
  return out;
}

}  // namespace natop
