#pragma once

// Connection calculus on jets: torsion splitting, curvature, iterated
// covariant differentials and the Levi-Civita connection of a metric jet.
//
// Conventions: Λ^λ_{μν} transforms as a(Λ ã ã − ã_{μν}), so Λ = −Γ for the
// usual Christoffel symbols Γ. Covariant derivatives read
//   ∇_σ v^ρ = ∂_σ v^ρ − Λ^ρ_{σκ} v^κ,   ∇_σ ω_ν = ∂_σ ω_ν + Λ^κ_{σν} ω_κ,
// and every new derivative slot is appended last, so (∇²X)_{..αβ} = ∇_β∇_α X.
// Curvature w_ν^ρ_{λμ} = Λ^ρ_{λν,μ} − Λ^ρ_{μν,λ} + Λ^σ_{μν}Λ^ρ_{λσ} − Λ^σ_{λν}Λ^ρ_{μσ}
// is stored with slot order (ν, ρ, λ, μ).

#include "natop/jets.hpp"

#include <utility>
#include <vector>

namespace natop {

/// Torsion jets are tensor jets with value signature torsion_signature().
using TorsionJet = TensorJet;
/// Metric jets are tensor jets with value signature metric_signature().
using MetricJet = TensorJet;

IndexSignature torsion_signature();  // T^λ_{μν}, antisymmetric in (μν)
IndexSignature metric_signature();   // g_{λμ}, symmetric
/// w_ν^ρ_{λμ σ1..σi}: antisymmetric in (λμ), derivative slots unconstrained.
IndexSignature curvature_signature(int i);

struct CurvatureValue {
  int order = 0;  // number of derivative slots
  ComponentArray w;

  friend bool operator==(const CurvatureValue&, const CurvatureValue&) = default;
};

CurvatureValue zero_curvature(int dim, int order);

/// (Λ̃, T) with Λ̃ the symmetrization and T the antisymmetrization in (μν).
std::pair<ConnectionJet, TorsionJet> split_connection(const ConnectionJet& l);
/// Λ̃ + T as a non-symmetric connection jet.
ConnectionJet combine_connection(const ConnectionJet& sym, const TorsionJet& torsion);

/// Curvature polynomial field of a symmetric connection field (degree drops by one).
Field curvature_field(const Field& connection);

/// Requires a symmetric jet of order >= 1.
CurvatureValue curvature(const ConnectionJet& l);

/// (∇t, ..., ∇^steps t) at the origin. Requires l.order() >= steps - 1 and
/// t.order() >= steps.
std::vector<ComponentArray> covariant_differential(const ConnectionJet& l, const TensorJet& t, int steps);

/// (∇^k R, ..., ∇^r R). Requires 0 <= k <= r and l.order() >= r + 1.
std::vector<CurvatureValue> curvature_differentials(const ConnectionJet& l, int k, int r);

/// Λ = −½ g^{ρσ}(∂_μ g_{σν} + ∂_ν g_{σμ} − ∂_σ g_{μν}) jetwise; the result
/// has order g.order() − 1. Throws std::domain_error when g is singular.
ConnectionJet levi_civita(const MetricJet& g);

/// Curvature action on a tensor value: the array P_{A αβ} with
/// P = ½(Σ_upper w_σ^{a}_{βα} X^{..σ..} − Σ_lower w_b^σ_{βα} X_{..σ..}),
/// which equals Alt_{αβ}(∇²X) at a point. `w` must have order 0.
ComponentArray ricci_bilinear(const ComponentArray& w, const ComponentArray& x);

}  // namespace natop
