#pragma once

// Membership tests for curvature spaces and Ricci subspaces, the
// decomposition/reconstruction pair for connection jets, and reduction data.

#include "natop/connection.hpp"

#include <optional>
#include <string>
#include <vector>

namespace natop {

/// One residual array of an identity family, over full (unsymmetrized)
/// index tuples.
struct Residual {
  std::string family;                   // e.g. "first Bianchi identity"
  std::string instance;                 // e.g. "i=1" or "i=3 slots (σ1 σ2)"
  std::vector<std::string> slot_names;  // one per slot of `values`
  ComponentArray values;

  [[nodiscard]] bool zero() const { return values.is_zero(); }
  /// "<family> residual nonzero at (ν,ρ,λ,μ)=(1,2,1,2) [i=0]" with
  /// 1-based indices, for the first nonzero entry in enumeration order;
  /// empty when the residual vanishes.
  [[nodiscard]] std::string first_violation() const;
  /// Largest |numerator| after bringing all entries to a common denominator,
  /// written as "N/D" ("0" when zero).
  [[nodiscard]] std::string max_abs() const;
};

struct CurvatureSpaceReport {
  int order = -1;  // highest differential order checked
  std::vector<Residual> bianchi1;  // cyclic sum over (ν, λ, μ), every i
  std::vector<Residual> bianchi2;  // cyclic sum over (λ, μ, σ1), i >= 1
  std::vector<Residual> commuted;  // antisymmetrized derivative pairs, i >= 2
  bool member = true;

  [[nodiscard]] std::vector<std::string> failures() const;
};

struct RicciSubspaceReport {
  int order = -1;                   // r of Z^(r)
  std::vector<Residual> equations;  // one per (q, s), 2 <= s <= q <= r
  bool member = true;

  [[nodiscard]] std::vector<std::string> failures() const;
};

/// ws[i] must be ∇^i-shaped for i = 0..ws.size()-1.
CurvatureSpaceReport check_curvature_space(const std::vector<CurvatureValue>& ws);

/// ws = (w_0, ..., w_{r-2}), vs = (V_0, ..., V_r) where V_0 is the tensor
/// value and V_i has i unconstrained lower derivative slots appended to
/// `value_signature`.
RicciSubspaceReport check_ricci_subspace(const std::vector<CurvatureValue>& ws, const std::vector<ComponentArray>& vs,
                                         const IndexSignature& value_signature);

/// Expected Alt over derivative slots (s-1, s) of V_q for an arbitrary tensor
/// X (base variances `base`) given V_t = ∇^t X and w_t = ∇^t R: the Leibniz
/// expansion of ∇^{q-s} applied to the curvature action on V_{s-2}.
ComponentArray commuted_derivative_expectation(const std::vector<const ComponentArray*>& ws,
                                               const std::vector<const ComponentArray*>& vs,
                                               const std::vector<Variance>& base, int s, int q);

struct PhiDecomposition {
  ComponentArray sym_top;  // Λ^λ_{(μν,σ1..σr)}
  ConnectionJet lower;     // j^{r-1}
  CurvatureValue w;        // ∇^{r-1} R
};

/// 1 / binomial(r+2, 2): the weight of each pair exchange in the
/// reconstruction of the top derivative coordinates.
Rational reconstruction_weight(int r);

PhiDecomposition phi_decompose(const ConnectionJet& l);
ConnectionJet psi_reconstruct(const ComponentArray& sym_top, const ConnectionJet& lower, const CurvatureValue& w);

struct ReductionData {
  int k = 0;
  int r = 0;
  std::optional<ConnectionJet> base;   // j^{k-2} L; absent when k < 2
  int curvature_from = 0;              // differential order of curvature.front()
  std::vector<CurvatureValue> curvature;
  std::optional<TensorJet> tensor;     // j^{k-1} t (second reduction only)
  int tensor_from = 0;                 // differential order of tensor_differentials.front()
  std::vector<ComponentArray> tensor_differentials;

  friend bool operator==(const ReductionData&, const ReductionData&) = default;
};

/// (j^{k-2}L, ∇^(max(k-2,0), r-1) R) for a symmetric jet of order r, 1 <= k <= r+2.
ReductionData reduce_first(const ConnectionJet& l, int k);
/// (j^{k-2}L, j^{k-1}t, ∇^(max(k-2,0), r-2) R, ∇^(k,r) t) for L of order r-1
/// and t of order r, 1 <= k <= r+1.
ReductionData reduce_second(const ConnectionJet& l, const TensorJet& t, int k);

/// Transforms reduction data by g (jets by the prolonged actions, tensor
/// values by the linear part). g must have order >= k.
ReductionData act_on_reduction(const DiffeoJet& g, const ReductionData& d);

/// Full (w_0..w_{r-2}, V_0..V_r) lists rebuilt from second-reduction data.
struct RicciData {
  std::vector<CurvatureValue> ws;
  std::vector<ComponentArray> vs;
  IndexSignature value_signature;
};
RicciData ricci_data(const ReductionData& d);

}  // namespace natop
