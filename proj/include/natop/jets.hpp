#pragma once

// Jet groups G^k_m and their actions on connection jets, tensor jets and the
// standard fibre of the bundle of (0,2)-tensors on the cotangent bundle.

#include "natop/component_array.hpp"
#include "natop/field.hpp"
#include "natop/linalg.hpp"

#include <vector>

namespace natop {

/// k-jet at 0 of a diffeomorphism of R^m fixing 0: coefficients
/// a^λ_{μ1..μi} for i = 1..k.
class DiffeoJet {
 public:
  DiffeoJet() = default;
  DiffeoJet(int dim, std::vector<ComponentArray> coeffs);

  static DiffeoJet identity(int dim, int order);
  static DiffeoJet linear(const Matrix& a, int order);
  static IndexSignature coeff_signature(int i);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int order() const noexcept { return static_cast<int>(coeffs_.size()); }
  /// i in 1..order().
  [[nodiscard]] const ComponentArray& coeff(int i) const { return coeffs_.at(static_cast<std::size_t>(i - 1)); }
  [[nodiscard]] Matrix linear_part() const;
  [[nodiscard]] DiffeoJet truncated(int order) const;

  /// Polynomial representative f^λ(x) = Σ a^λ_I x^α / α!.
  [[nodiscard]] std::vector<TruncPoly> polynomial_map() const;
  static DiffeoJet from_polynomial_map(std::span<const TruncPoly> f);

  friend bool operator==(const DiffeoJet&, const DiffeoJet&) = default;

 private:
  int dim_ = 0;
  std::vector<ComponentArray> coeffs_;
};

/// Jet of g∘h truncated at the common order.
DiffeoJet compose_jets(const DiffeoJet& g, const DiffeoJet& h);
/// Throws std::domain_error when the linear part is singular.
DiffeoJet invert_jet(const DiffeoJet& g);

/// r-jet of a linear connection: parts Λ^λ_{μν,σ1..σi}, i = 0..r.
class ConnectionJet {
 public:
  ConnectionJet() = default;
  ConnectionJet(int dim, bool symmetric, std::vector<ComponentArray> parts);

  static ConnectionJet zero(int dim, int order, bool symmetric);
  static IndexSignature part_signature(int i, bool symmetric);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int order() const noexcept { return static_cast<int>(parts_.size()) - 1; }
  [[nodiscard]] bool symmetric() const noexcept { return symmetric_; }
  [[nodiscard]] const ComponentArray& part(int i) const { return parts_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const std::vector<ComponentArray>& parts() const noexcept { return parts_; }
  [[nodiscard]] ConnectionJet truncated(int order) const;

  [[nodiscard]] Field field() const;
  /// Throws std::invalid_argument if `symmetric` is requested but the field
  /// is not symmetric in its lower pair.
  static ConnectionJet from_field(const Field& f, bool symmetric);

  friend bool operator==(const ConnectionJet&, const ConnectionJet&) = default;

 private:
  int dim_ = 0;
  bool symmetric_ = true;
  std::vector<ComponentArray> parts_;
};

/// r-jet of a tensor field whose value lives under `value_signature`.
class TensorJet {
 public:
  TensorJet() = default;
  TensorJet(int dim, IndexSignature value_signature, std::vector<ComponentArray> parts);

  static TensorJet zero(int dim, const IndexSignature& value_signature, int order);
  /// p upper slots followed by q lower slots, no symmetry.
  static IndexSignature valence(int p, int q);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int order() const noexcept { return static_cast<int>(parts_.size()) - 1; }
  [[nodiscard]] const IndexSignature& value_signature() const noexcept { return sig_; }
  [[nodiscard]] const ComponentArray& part(int i) const { return parts_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const std::vector<ComponentArray>& parts() const noexcept { return parts_; }
  [[nodiscard]] TensorJet truncated(int order) const;

  [[nodiscard]] Field field() const;
  static TensorJet from_field(const Field& f, const IndexSignature& value_signature);

  friend bool operator==(const TensorJet&, const TensorJet&) = default;

 private:
  int dim_ = 0;
  IndexSignature sig_;
  std::vector<ComponentArray> parts_;
};

/// Point of the standard fibre of ⊗²T*(T*M): (ẋ_λ, φ_{λμ}, φ_λ^μ̄, φ^λ̄_μ, φ^λ̄μ̄).
struct CotangentFibrePoint {
  ComponentArray xdot;  // l
  ComponentArray ll;    // φ_{λμ}
  ComponentArray lu;    // φ_λ^μ̄
  ComponentArray ul;    // φ^λ̄_μ
  ComponentArray uu;    // φ^λ̄μ̄

  static CotangentFibrePoint zero(int dim);
  [[nodiscard]] int dim() const noexcept { return xdot.dim(); }

  friend bool operator==(const CotangentFibrePoint&, const CotangentFibrePoint&) = default;
};

/// Requires g.order() == L.order() + 2.
ConnectionJet act_on_connection(const DiffeoJet& g, const ConnectionJet& l);
/// Requires g.order() >= t.order() + 1 (extra orders are ignored).
TensorJet act_on_tensor(const DiffeoJet& g, const TensorJet& t);
/// Requires g.order() >= 2.
CotangentFibrePoint act_on_cotangent_fibre(const DiffeoJet& g, const CotangentFibrePoint& s);

}  // namespace natop
