#pragma once

// Polynomial representatives of tensor fields near the origin: every
// component (over all dim^rank index tuples, no symmetry reduction) is a
// TruncPoly in the dim coordinates. Jets convert to and from these by the
// Taylor normalization coefficient(x^a) = derivative / a!.

#include "natop/component_array.hpp"
#include "natop/poly.hpp"

#include <span>
#include <vector>

namespace natop {

class Field {
 public:
  Field() = default;
  Field(int dim, std::vector<Variance> slots, int degree);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int rank() const noexcept { return static_cast<int>(slots_.size()); }
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] const std::vector<Variance>& slots() const noexcept { return slots_; }
  [[nodiscard]] std::size_t size() const noexcept { return comps_.size(); }

  [[nodiscard]] std::size_t linear(std::span<const int> idx) const;
  TruncPoly& at(std::span<const int> idx) { return comps_[linear(idx)]; }
  [[nodiscard]] const TruncPoly& at(std::span<const int> idx) const { return comps_[linear(idx)]; }
  TruncPoly& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
  [[nodiscard]] const TruncPoly& at(std::initializer_list<int> idx) const { return at(std::span<const int>(idx.begin(), idx.size())); }
  TruncPoly& at_linear(std::size_t k) { return comps_[k]; }
  [[nodiscard]] const TruncPoly& at_linear(std::size_t k) const { return comps_[k]; }

  [[nodiscard]] Field truncated(int degree) const;

  /// Constant-term values stored under `sig` (whose variances must match).
  [[nodiscard]] ComponentArray value_at_origin(const IndexSignature& sig) const;
  /// Order-i derivatives at the origin, stored as value slots followed by i
  /// symmetric lower derivative slots.
  [[nodiscard]] ComponentArray jet_part(const IndexSignature& value_sig, int i) const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::vector<Variance> slots_;
  std::vector<TruncPoly> comps_;
};

/// Builds the polynomial representative of a jet given its parts
/// (parts[i] = order-i derivatives; value slots then i symmetric lower slots).
Field field_from_jet(int dim, const std::vector<Variance>& value_slots, std::span<const ComponentArray> parts);

/// Constant field of the given degree.
Field constant_field(const ComponentArray& value, int degree);

/// Appends a lower slot holding the partial derivative; degree drops by one.
Field partial_gradient(const Field& x);

/// Covariant derivative with respect to a symmetric connection field:
/// (∇X)_{A,σ} = ∂_σ X_A − Λ^{a}_{σκ} X_{..κ..} for each upper slot a and
/// + Λ^{κ}_{σ b} X_{..κ..} for each lower slot b. The connection field must
/// be known to at least degree X.degree() − 1.
Field covariant_derivative(const Field& x, const Field& connection);

}  // namespace natop
