#include "natop/field.hpp"

#include <stdexcept>

namespace natop {

Field::Field(int dim, std::vector<Variance> slots, int degree)
    : dim_(dim), degree_(degree), slots_(std::move(slots)) {
  if (dim < 1 || degree < 0) throw std::invalid_argument("Field: need dim >= 1 and degree >= 0");
  std::size_t n = 1;
  for (std::size_t i = 0; i < slots_.size(); ++i) n *= static_cast<std::size_t>(dim);
  comps_.assign(n, TruncPoly(dim, degree));
}

std::size_t Field::linear(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) throw std::invalid_argument("Field: wrong index length");
  std::size_t lin = 0;
  for (int v : idx) {
    if (v < 0 || v >= dim_) throw std::out_of_range("Field: index value out of range");
    lin = lin * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(v);
  }
  return lin;
}

Field Field::truncated(int degree) const {
  Field f(dim_, slots_, degree);
  for (std::size_t k = 0; k < comps_.size(); ++k) f.comps_[k] = comps_[k].truncated(degree);
  return f;
}

ComponentArray Field::value_at_origin(const IndexSignature& sig) const {
  if (sig.variances() != slots_) throw std::invalid_argument("Field::value_at_origin: variance mismatch");
  ComponentArray out(dim_, sig);
  for (std::size_t k = 0; k < out.size(); ++k) out.set_value(k, at(out.representative(k)).constant_term());
  return out;
}

ComponentArray Field::jet_part(const IndexSignature& value_sig, int i) const {
  if (value_sig.variances() != slots_) throw std::invalid_argument("Field::jet_part: variance mismatch");
  if (i > degree_) throw std::invalid_argument("Field::jet_part: order beyond the field's degree");
  ComponentArray out(dim_, value_sig.with_lower_slots(i, true));
  const auto r = static_cast<std::size_t>(rank());
  std::vector<int> exps(static_cast<std::size_t>(dim_));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& rep = out.representative(k);
    std::fill(exps.begin(), exps.end(), 0);
    for (std::size_t s = r; s < rep.size(); ++s) ++exps[static_cast<std::size_t>(rep[s])];
    const auto& p = at(std::span<const int>(rep.data(), r));
    out.set_value(k, p.derivative_at_origin(exps));
  }
  return out;
}

Field field_from_jet(int dim, const std::vector<Variance>& value_slots, std::span<const ComponentArray> parts) {
  if (parts.empty()) throw std::invalid_argument("field_from_jet: no jet parts");
  const int degree = static_cast<int>(parts.size()) - 1;
  Field f(dim, value_slots, degree);
  const auto r = value_slots.size();
  std::vector<int> exps(static_cast<std::size_t>(dim));
  for (int i = 0; i <= degree; ++i) {
    const auto& part = parts[static_cast<std::size_t>(i)];
    if (part.rank() != static_cast<int>(r) + i) throw std::invalid_argument("field_from_jet: part rank mismatch");
    const auto& basis = MonomialBasis::get(dim, degree);
    // iterate full value tuples x sym derivative tuples through representatives
    for_each_index(dim, static_cast<int>(r), [&](std::span<const int> vidx) {
      for (const auto& s : sym_indices(dim, i)) {
        std::vector<int> full(vidx.begin(), vidx.end());
        full.insert(full.end(), s.entries().begin(), s.entries().end());
        const Rational v = part.at(full);
        if (is_zero(v)) continue;
        std::fill(exps.begin(), exps.end(), 0);
        for (int e : s.entries()) ++exps[static_cast<std::size_t>(e)];
        const auto k = static_cast<std::size_t>(basis->index_of(exps));
        f.at(vidx).coeff(k) = v / Rational(basis->factorial_weight(k));
      }
    });
  }
  return f;
}

Field constant_field(const ComponentArray& value, int degree) {
  Field f(value.dim(), value.signature().variances(), degree);
  for_each_index(value.dim(), value.rank(), [&](std::span<const int> idx) {
    f.at(idx).coeff(0) = value.at(idx);
  });
  return f;
}

Field partial_gradient(const Field& x) {
  if (x.degree() < 1) throw std::invalid_argument("partial_gradient: field carries no derivative information");
  auto slots = x.slots();
  slots.push_back(Variance::lower);
  Field out(x.dim(), slots, x.degree() - 1);
  const int m = x.dim();
  for (std::size_t k = 0; k < x.size(); ++k)
    for (int s = 0; s < m; ++s) out.at_linear(k * static_cast<std::size_t>(m) + static_cast<std::size_t>(s)) = x.at_linear(k).derivative(s);
  return out;
}

Field covariant_derivative(const Field& x, const Field& connection) {
  if (connection.rank() != 3) throw std::invalid_argument("covariant_derivative: connection field must have rank 3");
  if (x.degree() < 1) throw std::invalid_argument("covariant_derivative: tensor jet order exhausted");
  if (connection.degree() < x.degree() - 1)
    throw std::invalid_argument("covariant_derivative: connection jet order too low for this step");
  Field out = partial_gradient(x);
  const int m = x.dim();
  const int r = x.rank();
  const int d = out.degree();
  Field lam = connection.truncated(d);
  Field xt = x.truncated(d);
  std::vector<int> src(static_cast<std::size_t>(r));
  for_each_index(m, r + 1, [&](std::span<const int> idx) {
    auto& target = out.at(idx);
    const int sigma = idx[static_cast<std::size_t>(r)];
    for (int a = 0; a < r; ++a) {
      std::copy(idx.begin(), idx.begin() + r, src.begin());
      const int va = idx[static_cast<std::size_t>(a)];
      for (int kappa = 0; kappa < m; ++kappa) {
        src[static_cast<std::size_t>(a)] = kappa;
        if (x.slots()[static_cast<std::size_t>(a)] == Variance::upper)
          target.sub_product(lam.at({va, sigma, kappa}), xt.at(src));
        else
          target.add_product(lam.at({kappa, sigma, va}), xt.at(src));
      }
    }
  });
  return out;
}

}  // namespace natop
