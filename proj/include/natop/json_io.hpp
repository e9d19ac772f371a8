#pragma once

// JSON documents for jets, tensor values and fibre points.
//
//   {"schema": 1, "kind": "...", "dim": m, "order": r, "components": {...}}
//
// Component keys are "v1,v2,...|d1,d2,..." with 1-based indices: value slots
// before the bar, derivative slots after it (empty for order 0). Values are
// exact rationals written as "p/q" strings. Only nonzero canonical
// representatives are written; readers accept any index order inside a
// declared symmetry group. Unknown keys are rejected.
//
// Kinds and their extra keys:
//   diffeo        coefficients a^λ_{μ1..μi}, i = 1..order
//   connection    "symmetric": bool
//   tensor        "signature": {"variances": "ul..", "groups": [...]}
//   metric        tensor jet with g_{λμ} symmetric
//   torsion       tensor jet with T^λ_{μν} antisymmetric
//   fibre-point   blocks keyed "xdot|λ", "ll|λ,μ", "lu|..", "ul|..", "uu|.."
//   curvature     ∇^i R for i = 0..order (i derivative slots after the bar)
//   differential  ∇^i t for i = 0..order, with "signature" of t

#include "natop/connection.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace natop {

using Json = nlohmann::json;

/// Malformed or inconsistent document.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values ∇^0..∇^order at a point, all under value_signature plus i
/// unconstrained lower slots.
struct Differential {
  IndexSignature value_signature;
  std::vector<ComponentArray> values;

  friend bool operator==(const Differential&, const Differential&) = default;
};

struct Document {
  std::string kind;
  std::variant<DiffeoJet, ConnectionJet, TensorJet, CotangentFibrePoint, Differential> value;

  [[nodiscard]] int dim() const;
  [[nodiscard]] int order() const;
};

Document make_document(const DiffeoJet& g);
Document make_document(const ConnectionJet& l);
/// kind is "tensor", "metric" or "torsion".
Document make_document(const TensorJet& t, const std::string& kind = "tensor");
Document make_document(const CotangentFibrePoint& p);
Document make_curvature_document(const std::vector<CurvatureValue>& ws);
Document make_differential_document(const Differential& d);

Json to_json(const Document& d);
/// Throws DocumentError.
Document from_json(const Json& j);

Json signature_to_json(const IndexSignature& s);
IndexSignature signature_from_json(const Json& j);

/// Reads and parses a file; throws DocumentError on I/O or syntax errors.
Json read_json_file(const std::string& path);

}  // namespace natop
