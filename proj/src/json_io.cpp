#include "natop/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace natop {

namespace {

using V = Variance;

constexpr int kMaxDim = 16;

[[noreturn]] void fail(const std::string& msg) { throw DocumentError(msg); }

std::string join_indices(std::span<const int> idx, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ",";
    out += std::to_string(idx[i] + 1);
  }
  return out;
}

std::vector<int> parse_indices(const std::string& text, int dim, const std::string& key) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      fail("component key \"" + key + "\": bad index \"" + item + "\"");
    const long v = std::stol(item);
    if (v < 1 || v > dim) fail("component key \"" + key + "\": index " + item + " out of range 1.." + std::to_string(dim));
    out.push_back(static_cast<int>(v - 1));
  }
  if (text.back() == ',') fail("component key \"" + key + "\": trailing comma");
  return out;
}

Rational parse_value(const Json& v, const std::string& key) {
  if (!v.is_string()) fail("component \"" + key + "\": value must be a \"p/q\" string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::exception& e) {
    fail("component \"" + key + "\": " + e.what());
  }
}

void write_array(Json& comps, const ComponentArray& a, int value_rank, const std::string& prefix = "") {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (sgn(a.value(k)) == 0) continue;
    const auto& r = a.representative(k);
    std::string key = prefix + join_indices(r, 0, static_cast<std::size_t>(value_rank)) + "|" +
                      join_indices(r, static_cast<std::size_t>(value_rank), r.size());
    comps[key] = to_string(a.value(k));
  }
}

struct Entry {
  std::vector<int> index;
  Rational value;
  std::string key;
};

// Sets entries into an array and checks that every entry reads back.
void load(ComponentArray& a, const std::vector<Entry>& entries) {
  for (const auto& e : entries) {
    try {
      a.set(e.index, e.value);
    } catch (const std::invalid_argument&) {
      fail("component \"" + e.key + "\" is forced to zero by the slot symmetry");
    }
  }
  for (const auto& e : entries)
    if (a.at(e.index) != e.value) fail("component \"" + e.key + "\" conflicts with another entry of its symmetry class");
}

// Splits "values|derivs" keys; returns entries grouped by derivative count.
std::vector<std::vector<Entry>> split_components(const Json& comps, int dim, int value_rank, int order, int min_order) {
  if (!comps.is_object()) fail("\"components\" must be an object");
  std::vector<std::vector<Entry>> out(static_cast<std::size_t>(order + 1));
  for (const auto& [key, v] : comps.items()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos || key.find('|', bar + 1) != std::string::npos)
      fail("component key \"" + key + "\": expected \"values|derivatives\"");
    auto vals = parse_indices(key.substr(0, bar), dim, key);
    auto ders = parse_indices(key.substr(bar + 1), dim, key);
    if (static_cast<int>(vals.size()) != value_rank)
      fail("component key \"" + key + "\": expected " + std::to_string(value_rank) + " value indices");
    const int i = static_cast<int>(ders.size());
    if (i < min_order || i > order)
      fail("component key \"" + key + "\": derivative count " + std::to_string(i) + " outside " +
           std::to_string(min_order) + ".." + std::to_string(order));
    vals.insert(vals.end(), ders.begin(), ders.end());
    out[static_cast<std::size_t>(i)].push_back({std::move(vals), parse_value(v, key), key});
  }
  return out;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail("document must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail("unknown key \"" + k + "\"");
  for (const char* k : allowed) {
    const std::string s(k);
    if (s != "symmetric" && s != "signature" && !j.contains(s)) fail("missing key \"" + s + "\"");
  }
}

int get_int(const Json& j, const char* key, int lo, int hi) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) fail(std::string("\"") + key + "\" must be an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi)
    fail(std::string("\"") + key + "\" = " + std::to_string(x) + " outside " + std::to_string(lo) + ".." +
         std::to_string(hi));
  return static_cast<int>(x);
}

Json header(const std::string& kind, int dim, int order) {
  Json j;
  j["schema"] = 1;
  j["kind"] = kind;
  j["dim"] = dim;
  j["order"] = order;
  j["components"] = Json::object();
  return j;
}

}  // namespace

int Document::dim() const {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Differential>)
          return v.values.empty() ? 0 : v.values.front().dim();
        else
          return v.dim();
      },
      value);
}

int Document::order() const {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Differential>)
          return static_cast<int>(v.values.size()) - 1;
        else if constexpr (std::is_same_v<T, CotangentFibrePoint>)
          return 0;
        else
          return v.order();
      },
      value);
}

Document make_document(const DiffeoJet& g) { return {"diffeo", g}; }
Document make_document(const ConnectionJet& l) { return {"connection", l}; }
Document make_document(const TensorJet& t, const std::string& kind) {
  if (kind != "tensor" && kind != "metric" && kind != "torsion")
    throw std::invalid_argument("make_document: bad tensor kind " + kind);
  return {kind, t};
}
Document make_document(const CotangentFibrePoint& p) { return {"fibre-point", p}; }
Document make_curvature_document(const std::vector<CurvatureValue>& ws) {
  Differential d{curvature_signature(0), {}};
  for (const auto& w : ws) d.values.push_back(w.w);
  return {"curvature", d};
}
Document make_differential_document(const Differential& d) { return {"differential", d}; }

Json signature_to_json(const IndexSignature& s) {
  Json j;
  std::string v;
  for (Variance x : s.variances()) v += x == V::upper ? 'u' : 'l';
  j["variances"] = v;
  j["groups"] = Json::array();
  for (const auto& g : s.groups()) {
    Json gj;
    gj["kind"] = g.kind == Symmetry::symmetric ? "symmetric" : "antisymmetric";
    std::vector<int> slots;
    for (int x : g.slots) slots.push_back(x + 1);
    gj["slots"] = slots;
    j["groups"].push_back(gj);
  }
  return j;
}

IndexSignature signature_from_json(const Json& j) {
  if (!j.is_object()) fail("\"signature\" must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "variances" && k != "groups") fail("unknown key \"signature." + k + "\"");
  if (!j.contains("variances") || !j.at("variances").is_string()) fail("\"signature.variances\" must be a string");
  std::vector<Variance> vars;
  for (char c : j.at("variances").get<std::string>()) {
    if (c == 'u')
      vars.push_back(V::upper);
    else if (c == 'l')
      vars.push_back(V::lower);
    else
      fail(std::string("\"signature.variances\": bad character '") + c + "'");
  }
  std::vector<SlotGroup> groups;
  if (j.contains("groups")) {
    if (!j.at("groups").is_array()) fail("\"signature.groups\" must be an array");
    for (const auto& g : j.at("groups")) {
      if (!g.is_object()) fail("signature group must be an object");
      for (const auto& [k, v] : g.items())
        if (k != "kind" && k != "slots") fail("unknown key \"signature.groups." + k + "\"");
      if (!g.contains("kind") || !g.contains("slots")) fail("signature group needs \"kind\" and \"slots\"");
      const auto kind = g.at("kind").get<std::string>();
      SlotGroup sg;
      if (kind == "symmetric")
        sg.kind = Symmetry::symmetric;
      else if (kind == "antisymmetric")
        sg.kind = Symmetry::antisymmetric;
      else
        fail("signature group kind must be symmetric or antisymmetric");
      for (const auto& s : g.at("slots")) {
        if (!s.is_number_integer()) fail("signature group slots must be integers");
        sg.slots.push_back(s.get<int>() - 1);
      }
      groups.push_back(std::move(sg));
    }
  }
  try {
    return IndexSignature(std::move(vars), std::move(groups));
  } catch (const std::exception& e) {
    fail(std::string("bad signature: ") + e.what());
  }
}

Json to_json(const Document& d) {
  Json j = header(d.kind, d.dim(), d.order());
  Json& comps = j["components"];
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DiffeoJet>) {
          for (int i = 1; i <= v.order(); ++i) write_array(comps, v.coeff(i), 1);
        } else if constexpr (std::is_same_v<T, ConnectionJet>) {
          j["symmetric"] = v.symmetric();
          for (const auto& p : v.parts()) write_array(comps, p, 3);
        } else if constexpr (std::is_same_v<T, TensorJet>) {
          if (d.kind == "tensor") j["signature"] = signature_to_json(v.value_signature());
          for (const auto& p : v.parts()) write_array(comps, p, v.value_signature().rank());
        } else if constexpr (std::is_same_v<T, CotangentFibrePoint>) {
          write_array(comps, v.xdot, 1, "xdot|");
          write_array(comps, v.ll, 2, "ll|");
          write_array(comps, v.lu, 2, "lu|");
          write_array(comps, v.ul, 2, "ul|");
          write_array(comps, v.uu, 2, "uu|");
        } else {
          if (d.kind == "differential") j["signature"] = signature_to_json(v.value_signature);
          for (const auto& p : v.values) write_array(comps, p, v.value_signature.rank());
        }
      },
      d.value);
  // fibre-point keys carry a block prefix and an empty derivative part
  if (d.kind == "fibre-point") {
    Json fixed = Json::object();
    for (const auto& [k, v] : comps.items()) fixed[k.substr(0, k.size() - 1)] = v;
    comps = fixed;
  }
  return j;
}

Document from_json(const Json& j) {
  if (!j.is_object()) fail("document must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) fail("missing string key \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "connection")
    check_keys(j, {"schema", "kind", "dim", "order", "components", "symmetric"});
  else if (kind == "tensor" || kind == "differential")
    check_keys(j, {"schema", "kind", "dim", "order", "components", "signature"});
  else if (kind == "diffeo" || kind == "metric" || kind == "torsion" || kind == "fibre-point" || kind == "curvature")
    check_keys(j, {"schema", "kind", "dim", "order", "components"});
  else
    fail("unknown kind \"" + kind + "\"");
  if (get_int(j, "schema", 0, 1000) != 1) fail("unsupported schema version");
  const int dim = get_int(j, "dim", 1, kMaxDim);
  const int order = get_int(j, "order", 0, 64);
  const Json& comps = j.at("components");

  if (kind == "diffeo") {
    if (order < 1) fail("diffeo order must be >= 1");
    auto groups = split_components(comps, dim, 1, order, 1);
    std::vector<ComponentArray> coeffs;
    for (int i = 1; i <= order; ++i) {
      ComponentArray a(dim, DiffeoJet::coeff_signature(i));
      load(a, groups[static_cast<std::size_t>(i)]);
      coeffs.push_back(std::move(a));
    }
    try {
      return make_document(DiffeoJet(dim, std::move(coeffs)));
    } catch (const std::exception& e) {
      fail(std::string("bad diffeo: ") + e.what());
    }
  }
  if (kind == "connection") {
    bool symmetric = false;
    if (j.contains("symmetric")) {
      if (!j.at("symmetric").is_boolean()) fail("\"symmetric\" must be a boolean");
      symmetric = j.at("symmetric").get<bool>();
    }
    auto groups = split_components(comps, dim, 3, order, 0);
    std::vector<ComponentArray> parts;
    for (int i = 0; i <= order; ++i) {
      ComponentArray a(dim, ConnectionJet::part_signature(i, symmetric));
      load(a, groups[static_cast<std::size_t>(i)]);
      parts.push_back(std::move(a));
    }
    return make_document(ConnectionJet(dim, symmetric, std::move(parts)));
  }
  if (kind == "tensor" || kind == "metric" || kind == "torsion") {
    IndexSignature sig;
    if (kind == "metric")
      sig = metric_signature();
    else if (kind == "torsion")
      sig = torsion_signature();
    else {
      if (!j.contains("signature")) fail("tensor documents need \"signature\"");
      sig = signature_from_json(j.at("signature"));
    }
    auto groups = split_components(comps, dim, sig.rank(), order, 0);
    std::vector<ComponentArray> parts;
    for (int i = 0; i <= order; ++i) {
      ComponentArray a(dim, sig.with_lower_slots(i, true));
      load(a, groups[static_cast<std::size_t>(i)]);
      parts.push_back(std::move(a));
    }
    return make_document(TensorJet(dim, sig, std::move(parts)), kind);
  }
  if (kind == "curvature" || kind == "differential") {
    IndexSignature sig = curvature_signature(0);
    if (kind == "differential") {
      if (!j.contains("signature")) fail("differential documents need \"signature\"");
      sig = signature_from_json(j.at("signature"));
    }
    auto groups = split_components(comps, dim, sig.rank(), order, 0);
    Differential d{sig, {}};
    for (int i = 0; i <= order; ++i) {
      ComponentArray a(dim, sig.with_lower_slots(i, false));
      load(a, groups[static_cast<std::size_t>(i)]);
      d.values.push_back(std::move(a));
    }
    return {kind, d};
  }
  // fibre-point
  if (order != 0) fail("fibre-point order must be 0");
  if (!comps.is_object()) fail("\"components\" must be an object");
  CotangentFibrePoint p = CotangentFibrePoint::zero(dim);
  std::map<std::string, std::vector<Entry>> blocks;
  for (const auto& [key, v] : comps.items()) {
    const auto bar = key.find('|');
    if (bar == std::string::npos) fail("component key \"" + key + "\": expected \"block|indices\"");
    const std::string block = key.substr(0, bar);
    auto idx = parse_indices(key.substr(bar + 1), dim, key);
    const std::size_t want = block == "xdot" ? 1 : 2;
    if (block != "xdot" && block != "ll" && block != "lu" && block != "ul" && block != "uu")
      fail("component key \"" + key + "\": unknown block \"" + block + "\"");
    if (idx.size() != want) fail("component key \"" + key + "\": expected " + std::to_string(want) + " indices");
    blocks[block].push_back({std::move(idx), parse_value(v, key), key});
  }
  load(p.xdot, blocks["xdot"]);
  load(p.ll, blocks["ll"]);
  load(p.lu, blocks["lu"]);
  load(p.ul, blocks["ul"]);
  load(p.uu, blocks["uu"]);
  return make_document(p);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(path + ": " + e.what());
  }
}

}  // namespace natop
