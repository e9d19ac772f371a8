#pragma once

// Classification of first-order natural operators from connections to (0,2)
// tensor fields on the cotangent bundle: homogeneity exponents, delta-pairing
// ansatz, kernel-equivariance system, its null space, and the resulting
// 14-parameter family together with its invariant description.
//
// A point of the target fibre is φ = φ_{λμ} d^λ⊗d^μ + φ_λ^μ̄ d^λ⊗ḋ_μ
// + φ^λ̄_μ ḋ_λ⊗d^μ + φ^λ̄μ̄ ḋ_λ⊗ḋ_μ, stored as CotangentFibrePoint blocks
// ll, lu, ul, uu.

#include "natop/connection.hpp"
#include "natop/linalg.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace natop {

enum class FactorKind : std::uint8_t {
  xdot,                  // ẋ_λ
  sym_connection,        // Λ̃^λ_{μν}
  torsion,               // T^λ_{μν}
  torsion_gradient,      // T^λ_{μν,σ}
  curvature,             // ∇^i R̃, slots (ν, ρ, λ, μ, σ1..σi)
  torsion_differential,  // ∇^j T, j >= 2
};

struct FactorType {
  FactorKind kind = FactorKind::xdot;
  int order = 0;  // i for curvature, j for torsion_differential, else 0

  [[nodiscard]] std::vector<Variance> slots() const;
  [[nodiscard]] std::vector<SlotGroup> groups() const;
  [[nodiscard]] std::string name() const;

  friend bool operator==(const FactorType&, const FactorType&) = default;
  friend auto operator<=>(const FactorType&, const FactorType&) = default;
};

struct ExponentVector {
  int a = 0;           // ẋ
  int b = 0;           // Λ̃
  int c0 = 0;          // T
  int c1 = 0;          // T_{,}
  std::vector<int> d;  // d[i]: ∇^i R̃, i = 0..r-1
  std::vector<int> e;  // e[j-2]: ∇^j T, j = 2..r

  explicit ExponentVector(int r = 1);
  [[nodiscard]] int r() const noexcept { return static_cast<int>(d.size()); }
  /// a + b + c0 + 2 c1 + Σ (i+2) d_i + Σ (j+1) e_j
  [[nodiscard]] int weight() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] bool torsion_free() const;
  /// One entry per factor copy, grouped by type in the order above.
  [[nodiscard]] std::vector<FactorType> factors() const;
  /// "a=1 c0=1"; "0" for the zero vector.
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const ExponentVector&, const ExponentVector&) = default;
  friend auto operator<=>(const ExponentVector&, const ExponentVector&) = default;
};

/// All nonnegative solutions of weight() == target, in descending
/// lexicographic order of (a, b, c0, c1, d_0.., e_2..). Empty for target < 0.
std::vector<ExponentVector> solve_homogeneity(int target, int r);

enum class Block : std::uint8_t { ll, lu, ul, uu };

std::string block_name(Block b);  // "phi_ll", ...
/// Homogeneity degree a block must have: 2, 0, 0, -2.
int block_target(Block b);
/// Variances of the two output slots.
std::vector<Variance> block_outputs(Block b);

struct AnsatzTerm {
  Block block = Block::ll;
  ExponentVector exponents;
  std::vector<FactorType> factors;
  /// Involution on slots: factor slots in order, then the two output slots.
  /// Each pair joins a lower and an upper position (an output slot counts
  /// with the opposite variance).
  std::vector<int> partner;
  std::string symbol;

  [[nodiscard]] int slot_count() const { return static_cast<int>(partner.size()); }
  /// Index expression, e.g. "ẋ_ρ Λ̃^ρ_{λμ}".
  [[nodiscard]] std::string formula() const;
};

/// Every complete pairing for the monomial type `ev` in block `b`, reduced
/// to canonical form under the factor symmetries and interchange of equal
/// factors; pairings equal to their own negative are dropped.
std::vector<AnsatzTerm> enumerate_pairings(const ExponentVector& ev, Block b = Block::ll);

/// enumerate_pairings followed by an exact independence filter at dimension
/// m (named terms are kept first). Named terms carry their conventional
/// symbol (A, B1, ..., H2, and B, C for the mixed blocks); the rest get
/// "N<k>". The sign of a named term follows its conventional display.
std::vector<AnsatzTerm> generate_ansatz(const ExponentVector& ev, int m, Block b = Block::ll);

/// Ansatz for all four blocks at order bound r; with `torsion_free` every
/// term containing torsion is omitted.
std::vector<AnsatzTerm> full_ansatz(int m, int r = 1, bool torsion_free = false);

struct EquivarianceSystem {
  int dim = 0;
  std::vector<std::string> unknowns;
  std::vector<std::vector<Rational>> rows;
  std::vector<std::string> provenance;  // one per row
};

/// Exact coefficient matching of φ(g·x) − g·φ(x) for kernel elements
/// g = (δ, a^λ_{μν}) with symbolic a, over free domain coordinates. Rows are
/// sorted by provenance key (block, component, monomial); zero rows are
/// dropped.
EquivarianceSystem kernel_constraints(const std::vector<AnsatzTerm>& terms, int m);

struct RelationCheck {
  std::string relation;  // e.g. "E6 = -(G1 + G2)"
  bool holds = false;
};

struct FamilySolution {
  std::vector<std::string> unknowns;
  std::vector<std::string> parameters;       // free unknowns, one per basis vector
  std::vector<std::vector<Rational>> basis;  // over unknowns
  int dimension = 0;
  std::vector<RelationCheck> relations;

  [[nodiscard]] bool relations_hold() const;
  /// Coefficient of the named unknown in basis vector k (0 if absent).
  [[nodiscard]] Rational coefficient(std::size_t k, const std::string& unknown) const;
};

/// Elimination order: dependent coefficients (B1..B3, D*, E*, N*) first,
/// so the conventional parameters end up free.
FamilySolution solve_family(const EquivarianceSystem& system);

/// The 14 parameter names A, B, C, C1..C3, F1..F3, G1..G3, H1, H2.
const std::vector<std::string>& family_parameter_names();

using FamilyParameters = std::map<std::string, Rational>;

/// Numeric values of the domain coordinates for L (order >= 1) and ẋ.
struct DomainValues {
  ComponentArray xdot, sym, torsion, torsion_gradient, curvature;
  int dim() const { return xdot.dim(); }
};
DomainValues domain_values(const ConnectionJet& l, const ComponentArray& xdot);

/// Σ coeffs[k] · terms[k] at a domain point.
CotangentFibrePoint evaluate_ansatz(const std::vector<AnsatzTerm>& terms, const std::vector<Rational>& coeffs,
                                    const DomainValues& x);

/// The closed-form family:
///   φ_{λμ} = A ẋ_λẋ_μ + C1 ẋ_λT^ρ_{ρμ} + C2 ẋ_μT^ρ_{ρλ} + C3 ẋ_ρT^ρ_{λμ}
///          + F1 T^ρ_{ρλ}T^σ_{σμ} + F2 T^ρ_{σλ}T^σ_{ρμ} + F3 T^ρ_{ρσ}T^σ_{λμ}
///          + G1 T^ρ_{ρλ;μ} + G2 T^ρ_{ρμ;λ} + G3 T^ρ_{λμ;ρ}
///          + H1 R̃_ρ^ρ_{λμ} + H2 R̃_λ^ρ_{ρμ} + B Λ^ρ_{λμ}ẋ_ρ + C Λ^ρ_{μλ}ẋ_ρ,
///   φ_λ^μ̄ = B δ, φ^λ̄_μ = C δ, φ^λ̄μ̄ = 0,
/// with ";" the covariant derivative of the symmetric part Λ̃. Throws
/// std::invalid_argument on missing or unknown parameter names.
CotangentFibrePoint evaluate_family(const FamilyParameters& params, const ConnectionJet& l, const ComponentArray& xdot);

/// Exact linear map from family parameters to coordinates in the solution
/// basis: row i holds the basis coordinates of the unit vector of
/// family_parameter_names()[i]. Found by fitting on seeded random points and
/// verified on further points; throws std::runtime_error if no exact fit exists.
Matrix family_to_basis(const std::vector<AnsatzTerm>& terms, const FamilySolution& solution, int m,
                       std::uint64_t seed = 1);

struct CanonicalForm {
  std::string label;
  CotangentFibrePoint value;    // at the given (L, ẋ)
  FamilyParameters parameters;  // evaluate_family(parameters, L, ẋ) == value
};

/// θ⊗θ, the three ⟨S(Λ), u⟩, the eight pullbacks of G(Λ), the symplectic
/// form ω, and the two contractions ω(ν[Λ*]·,·), ω(·,ν[Λ*]·). Parameters are
/// fitted on seeded probe jets and then checked at the given input.
std::vector<CanonicalForm> canonical_forms(const ConnectionJet& l, const ComponentArray& xdot);

/// Full pipeline report at dimension m.
struct ClassificationReport {
  int dim = 0;
  bool torsion_free = false;
  std::vector<std::pair<Block, std::vector<ExponentVector>>> exponents;
  std::vector<std::pair<Block, int>> pairings;  // before the independence filter
  std::vector<AnsatzTerm> terms;
  EquivarianceSystem system;
  FamilySolution solution;
};
ClassificationReport classify(int m, bool torsion_free = false);

}  // namespace natop
