#include "natop/cli.hpp"

#include "natop/classify.hpp"
#include "natop/identities.hpp"
#include "natop/json_io.hpp"
#include "natop/random.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace natop {

namespace {

using V = Variance;

struct CheckFailed {
  std::string report;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  int dim = 3;
  int order = 2;
  std::uint64_t seed = 1;
  int count = 100;
  int max_order = 4;
  std::string input;
  std::string out;
  std::string tensor;
  std::string diffeo;
  std::string xdot;
  std::vector<std::string> params;
  int steps = -1;
  int k = -1;
  bool torsion_free = false;
  bool forms = false;
  bool json = false;
};

Document load_document(const std::string& path, const Options& o, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what);
  Document d = from_json(read_json_file(path));
  const int cap = d.kind == "diffeo" ? o.max_order : o.max_order - 1;
  if (d.kind != "fibre-point" && d.order() > cap)
    throw UsageError(path + ": jet order " + std::to_string(d.order()) + " exceeds the cap " + std::to_string(cap) +
                     " (raise --max-order)");
  return d;
}

ConnectionJet need_connection(const Document& d) {
  if (d.kind != "connection") throw DocumentError("expected a connection document, got " + d.kind);
  return std::get<ConnectionJet>(d.value);
}

TensorJet need_tensor(const Document& d) {
  if (d.kind != "tensor" && d.kind != "metric" && d.kind != "torsion")
    throw DocumentError("expected a tensor document, got " + d.kind);
  return std::get<TensorJet>(d.value);
}

ConnectionJet symmetric_part(const ConnectionJet& l) { return l.symmetric() ? l : split_connection(l).first; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json array_document(const ComponentArray& a) {
  return to_json(make_differential_document(Differential{a.signature(), {a}}));
}

std::vector<Rational> parse_covector(const std::string& text, int dim) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (static_cast<int>(out.size()) != dim)
    throw UsageError("--xdot needs " + std::to_string(dim) + " comma-separated entries");
  return out;
}

std::string summary_failure(const std::vector<std::string>& fails) { return fails.empty() ? "pass" : "FAIL"; }

// ---------------------------------------------------------------------------

std::string cmd_curvature(const Options& o) {
  const auto l = symmetric_part(need_connection(load_document(o.input, o, "--input")));
  if (l.order() < 1) throw UsageError("curvature needs a connection jet of order >= 1");
  const int top = o.steps >= 0 ? o.steps : l.order() - 1;
  return dump(to_json(make_curvature_document(curvature_differentials(l, 0, top))));
}

std::string cmd_covd(const Options& o) {
  const auto l = symmetric_part(need_connection(load_document(o.input, o, "--input")));
  const auto t = need_tensor(load_document(o.tensor, o, "--tensor"));
  const int steps = o.steps >= 0 ? o.steps : std::min(t.order(), l.order() + 1);
  Differential d{t.value_signature().without_groups(), {}};
  d.values.push_back(restructure(t.part(0), d.value_signature));
  for (auto& v : covariant_differential(l, t, steps)) d.values.push_back(std::move(v));
  return dump(to_json(make_differential_document(d)));
}

std::string cmd_split(const Options& o) {
  const auto l = need_connection(load_document(o.input, o, "--input"));
  if (l.symmetric()) {
    Json j;
    j["symmetric"] = to_json(make_document(l));
    j["torsion"] = to_json(make_document(TensorJet::zero(l.dim(), torsion_signature(), l.order()), "torsion"));
    return dump(j);
  }
  const auto [s, t] = split_connection(l);
  Json j;
  j["symmetric"] = to_json(make_document(s));
  j["torsion"] = to_json(make_document(t, "torsion"));
  return dump(j);
}

std::string cmd_levi_civita(const Options& o) {
  const auto d = load_document(o.input, o, "--input");
  if (d.kind != "metric") throw DocumentError("expected a metric document, got " + d.kind);
  return dump(to_json(make_document(levi_civita(std::get<TensorJet>(d.value)))));
}

std::string cmd_act(const Options& o) {
  const auto gd = load_document(o.diffeo, o, "--diffeo");
  if (gd.kind != "diffeo") throw DocumentError("--diffeo must be a diffeo document");
  const auto& g = std::get<DiffeoJet>(gd.value);
  const auto d = load_document(o.input, o, "--input");
  if (d.dim() != g.dim()) throw DocumentError("dimension mismatch between --input and --diffeo");
  if (d.kind == "diffeo") return dump(to_json(make_document(compose_jets(g, std::get<DiffeoJet>(d.value)))));
  if (d.kind == "connection") {
    const auto& l = std::get<ConnectionJet>(d.value);
    if (g.order() < l.order() + 2)
      throw UsageError("acting on a connection " + std::to_string(l.order()) + "-jet needs a diffeo jet of order " +
                       std::to_string(l.order() + 2));
    return dump(to_json(make_document(act_on_connection(g.truncated(l.order() + 2), l))));
  }
  if (d.kind == "fibre-point")
    return dump(to_json(make_document(act_on_cotangent_fibre(g, std::get<CotangentFibrePoint>(d.value)))));
  if (d.kind == "tensor" || d.kind == "metric" || d.kind == "torsion")
    return dump(to_json(make_document(act_on_tensor(g, std::get<TensorJet>(d.value)), d.kind)));
  throw DocumentError("act does not apply to " + d.kind + " documents");
}

Json residual_json(const Residual& r) {
  Json j;
  j["family"] = r.family;
  j["instance"] = r.instance;
  j["zero"] = r.zero();
  j["max_abs"] = r.max_abs();
  if (!r.zero()) j["first_violation"] = r.first_violation();
  return j;
}

struct IdentityTally {
  std::vector<std::string> bianchi1, bianchi2, commuted, ricci;
  int trials = 0;
  bool ricci_run = false;

  void add(const CurvatureSpaceReport& rep, const std::string& tag) {
    for (const auto& r : rep.bianchi1)
      if (!r.zero()) bianchi1.push_back(tag + r.first_violation() + " (max " + r.max_abs() + ")");
    for (const auto& r : rep.bianchi2)
      if (!r.zero()) bianchi2.push_back(tag + r.first_violation() + " (max " + r.max_abs() + ")");
    for (const auto& r : rep.commuted)
      if (!r.zero()) commuted.push_back(tag + r.first_violation() + " (max " + r.max_abs() + ")");
  }
  void add(const RicciSubspaceReport& rep, const std::string& tag) {
    ricci_run = true;
    for (const auto& r : rep.equations)
      if (!r.zero()) ricci.push_back(tag + r.first_violation() + " (max " + r.max_abs() + ")");
  }
  [[nodiscard]] bool ok() const { return bianchi1.empty() && bianchi2.empty() && commuted.empty() && ricci.empty(); }
};

std::string cmd_check_identities(const Options& o) {
  IdentityTally tally;
  std::string header;
  if (!o.input.empty()) {
    const auto d = load_document(o.input, o, "--input");
    std::vector<CurvatureValue> ws;
    if (d.kind == "curvature") {
      const auto& diff = std::get<Differential>(d.value);
      for (std::size_t i = 0; i < diff.values.size(); ++i) ws.push_back({static_cast<int>(i), diff.values[i]});
    } else if (d.kind == "connection") {
      const auto l = symmetric_part(std::get<ConnectionJet>(d.value));
      if (l.order() < 1) throw UsageError("check-identities needs a connection jet of order >= 1");
      ws = curvature_differentials(l, 0, l.order() - 1);
    } else {
      throw DocumentError("check-identities accepts curvature or connection documents, got " + d.kind);
    }
    tally.add(check_curvature_space(ws), "");
    tally.trials = 1;
    header = "input: " + o.input;
  } else {
    if (o.dim < 1 || o.dim > 6) throw UsageError("--dim must be in 1..6");
    if (o.order < 1 || o.order + 1 > o.max_order) throw UsageError("--order must be in 1..max-order-1");
    if (o.count < 1) throw UsageError("--count must be positive");
    RationalRng rng(o.seed);
    const std::vector<std::pair<int, int>> valences = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}};
    for (int t = 0; t < o.count; ++t) {
      const std::string tag = "trial " + std::to_string(t + 1) + ": ";
      const auto l = random_connection(rng, o.dim, o.order, true);
      tally.add(check_curvature_space(curvature_differentials(l, 0, o.order - 1)), tag);
      // Ricci equations up to q = order + 1 for a tensor of cycling valence
      const auto [p, q] = valences[static_cast<std::size_t>(t) % valences.size()];
      const auto sig = TensorJet::valence(p, q);
      const auto x = random_tensor(rng, o.dim, sig, o.order + 1);
      std::vector<ComponentArray> vs{x.part(0)};
      for (auto& v : covariant_differential(l, x, o.order + 1)) vs.push_back(std::move(v));
      const auto ws = curvature_differentials(l, 0, o.order - 1);
      tally.add(check_ricci_subspace(ws, vs, sig), tag);
      ++tally.trials;
    }
    header = "trials: " + std::to_string(tally.trials) + ", dim: " + std::to_string(o.dim) +
             ", order: " + std::to_string(o.order) + ", seed: " + std::to_string(o.seed);
  }
  std::string report;
  if (o.json) {
    Json j;
    j["trials"] = tally.trials;
    j["bianchi1"] = tally.bianchi1;
    j["bianchi2"] = tally.bianchi2;
    j["commuted"] = tally.commuted;
    j["ricci"] = tally.ricci;
    j["ricci_checked"] = tally.ricci_run;
    j["pass"] = tally.ok();
    report = dump(j);
  } else {
    report = "bianchi1: " + summary_failure(tally.bianchi1) + ", bianchi2: " + summary_failure(tally.bianchi2) +
             ", ricci: " + (tally.ricci_run ? summary_failure(tally.ricci) : std::string("not checked")) + "\n";
    report += "commuted derivatives: " + summary_failure(tally.commuted) + "\n";
    report += header + "\n";
    auto list = [&](const std::vector<std::string>& v) {
      for (std::size_t i = 0; i < v.size() && i < 5; ++i) report += "  " + v[i] + "\n";
      if (v.size() > 5) report += "  ... " + std::to_string(v.size() - 5) + " more\n";
    };
    list(tally.bianchi1);
    list(tally.bianchi2);
    list(tally.commuted);
    list(tally.ricci);
  }
  if (!tally.ok()) throw CheckFailed{report};
  return report;
}

std::string cmd_reconstruct(const Options& o) {
  const auto l = need_connection(load_document(o.input, o, "--input"));
  if (!l.symmetric()) throw DocumentError("reconstruct needs a symmetric connection jet");
  const auto ph = phi_decompose(l);
  const bool ok = psi_reconstruct(ph.sym_top, ph.lower, ph.w) == l;
  Json j;
  j["sym_top"] = array_document(ph.sym_top);
  j["lower"] = to_json(make_document(ph.lower));
  j["curvature"] = array_document(ph.w.w);
  j["curvature_order"] = ph.w.order;
  j["roundtrip"] = ok;
  if (!ok) throw CheckFailed{dump(j)};
  return dump(j);
}

std::string cmd_reduce(const Options& o) {
  const auto l = need_connection(load_document(o.input, o, "--input"));
  if (o.k < 0) throw UsageError("reduce needs --k");
  ReductionData d;
  Json j;
  bool ok = true;
  if (o.tensor.empty()) {
    d = reduce_first(l, o.k);
    const auto full = curvature_differentials(l, 0, l.order() - 1);
    const auto rep = check_curvature_space(full);
    j["membership"] = rep.member;
    ok = rep.member;
  } else {
    const auto t = need_tensor(load_document(o.tensor, o, "--tensor"));
    d = reduce_second(l, t, o.k);
    const auto rd = ricci_data(d);
    const auto rep = check_ricci_subspace(rd.ws, rd.vs, rd.value_signature);
    j["membership"] = rep.member;
    ok = rep.member;
    if (!rep.member) {
      Json fails = Json::array();
      for (const auto& r : rep.equations)
        if (!r.zero()) fails.push_back(residual_json(r));
      j["failures"] = fails;
    }
  }
  j["k"] = d.k;
  j["r"] = d.r;
  j["base"] = d.base ? to_json(make_document(*d.base)) : Json(nullptr);
  j["curvature_from"] = d.curvature_from;
  j["curvature"] = Json::array();
  for (const auto& w : d.curvature) j["curvature"].push_back(array_document(w.w));
  if (d.tensor || !d.tensor_differentials.empty()) {
    j["tensor"] = d.tensor ? to_json(make_document(*d.tensor)) : Json(nullptr);
    j["tensor_from"] = d.tensor_from;
    j["tensor_differentials"] = Json::array();
    for (const auto& v : d.tensor_differentials) j["tensor_differentials"].push_back(array_document(v));
  }
  if (!ok) throw CheckFailed{dump(j)};
  return dump(j);
}

std::string cmd_classify(const Options& o) {
  if (o.dim < 1 || o.dim > 6) throw UsageError("--dim must be in 1..6");
  const auto rep = classify(o.dim, o.torsion_free);
  Json j;
  j["dim"] = rep.dim;
  j["torsion_free"] = rep.torsion_free;
  Json ex = Json::object(), pairings = Json::object(), counts = Json::object();
  for (const auto& [b, evs] : rep.exponents) {
    Json list = Json::array();
    for (const auto& e : evs) list.push_back(e.describe());
    ex[block_name(b)] = list;
  }
  for (const auto& [b, n] : rep.pairings) pairings[block_name(b)] = n;
  for (Block b : {Block::ll, Block::lu, Block::ul, Block::uu})
    counts[block_name(b)] = std::count_if(rep.terms.begin(), rep.terms.end(), [b](const AnsatzTerm& t) { return t.block == b; });
  j["exponent_solutions"] = ex;
  j["pairings"] = pairings;
  j["term_counts"] = counts;
  Json terms = Json::array();
  for (const auto& t : rep.terms) terms.push_back({{"symbol", t.symbol}, {"block", block_name(t.block)}, {"term", t.formula()}});
  j["ansatz"] = terms;
  j["system"] = {{"unknowns", rep.system.unknowns.size()}, {"rows", rep.system.rows.size()}};
  j["dimension"] = rep.solution.dimension;
  j["parameters"] = rep.solution.parameters;
  Json rel = Json::array();
  for (const auto& r : rep.solution.relations) rel.push_back({{"relation", r.relation}, {"holds", r.holds}});
  j["relations"] = rel;
  j["relations_hold"] = rep.solution.relations_hold();
  Json basis = Json::array();
  for (std::size_t k = 0; k < rep.solution.basis.size(); ++k) {
    Json comb = Json::object();
    for (std::size_t u = 0; u < rep.solution.unknowns.size(); ++u)
      if (sgn(rep.solution.basis[k][u]) != 0) comb[rep.solution.unknowns[u]] = to_string(rep.solution.basis[k][u]);
    basis.push_back({{"parameter", rep.solution.parameters[k]}, {"combination", comb}});
  }
  j["basis"] = basis;
  if (!o.torsion_free) {
    try {
      const Matrix map = family_to_basis(rep.terms, rep.solution, rep.dim);
      Json fm = Json::object();
      for (std::size_t i = 0; i < map.size(); ++i) {
        Json row = Json::object();
        for (std::size_t k = 0; k < map[i].size(); ++k)
          if (sgn(map[i][k]) != 0) row[rep.solution.parameters[k]] = to_string(map[i][k]);
        fm[family_parameter_names()[i]] = row;
      }
      j["family_to_basis"] = fm;
    } catch (const std::runtime_error& e) {
      j["family_to_basis"] = std::string("no exact fit: ") + e.what();
    }
  }
  return dump(j);
}

std::string cmd_evaluate_family(const Options& o) {
  ConnectionJet l;
  ComponentArray xd;
  if (!o.input.empty()) {
    l = need_connection(load_document(o.input, o, "--input"));
    if (o.xdot.empty()) throw UsageError("evaluate-family with --input needs --xdot");
    const auto v = parse_covector(o.xdot, l.dim());
    xd = ComponentArray(l.dim(), IndexSignature({V::lower}));
    for (int i = 0; i < l.dim(); ++i) xd.set({i}, v[static_cast<std::size_t>(i)]);
  } else {
    if (o.dim < 1 || o.dim > 6) throw UsageError("--dim must be in 1..6");
    RationalRng rng(o.seed);
    l = random_connection(rng, o.dim, 1, false);
    xd = ComponentArray(o.dim, IndexSignature({V::lower}));
    if (o.xdot.empty())
      rng.fill(xd);
    else {
      const auto v = parse_covector(o.xdot, o.dim);
      for (int i = 0; i < o.dim; ++i) xd.set({i}, v[static_cast<std::size_t>(i)]);
    }
  }
  if (l.order() < 1) throw UsageError("evaluate-family needs a connection jet of order >= 1");
  if (o.forms) {
    Json j = Json::array();
    for (const auto& cf : canonical_forms(l, xd)) {
      Json params = Json::object();
      for (const auto& [n, v] : cf.parameters)
        if (sgn(v) != 0) params[n] = to_string(v);
      j.push_back({{"label", cf.label}, {"parameters", params}, {"value", to_json(make_document(cf.value))}});
    }
    return dump(j);
  }
  FamilyParameters params;
  for (const auto& n : family_parameter_names()) params[n] = Rational(0);
  for (const auto& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects NAME=VALUE, got " + p);
    const std::string name = p.substr(0, eq);
    if (!params.count(name)) throw UsageError("unknown family parameter " + name);
    params[name] = parse_rational(p.substr(eq + 1));
  }
  return dump(to_json(make_document(evaluate_family(params, l, xd))));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact jet computations for natural operators on linear connections", "natop"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) { c->add_option("--out", o.out, "Write the report to FILE instead of stdout"); };
  auto cap = [&](CLI::App* c) {
    c->add_option("--max-order", o.max_order, "Highest accepted diffeomorphism jet order")->check(CLI::Range(1, 8));
  };
  auto input = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--input", o.input, "Input document");
    if (required) opt->required();
  };

  auto* curv = app.add_subcommand("curvature", "∇^0..∇^k of the curvature of the symmetric part");
  input(curv, true);
  curv->add_option("--order", o.steps, "Highest derivative order k (default: jet order - 1)");
  common(curv);
  cap(curv);

  auto* covd = app.add_subcommand("covd", "Iterated covariant differentials of a tensor jet");
  input(covd, true);
  covd->add_option("--tensor", o.tensor, "Tensor document")->required();
  covd->add_option("--order", o.steps, "Number of differentiation steps");
  common(covd);
  cap(covd);

  auto* split = app.add_subcommand("split", "Symmetric part and torsion of a connection jet");
  input(split, true);
  common(split);
  cap(split);

  auto* lc = app.add_subcommand("levi-civita", "Levi-Civita connection jet of a metric jet");
  input(lc, true);
  common(lc);
  cap(lc);

  auto* act = app.add_subcommand("act", "Action of a diffeomorphism jet on a document");
  input(act, true);
  act->add_option("--diffeo", o.diffeo, "Diffeo document")->required();
  common(act);
  cap(act);

  auto* chk = app.add_subcommand("check-identities", "Bianchi, commuted-derivative and Ricci identities");
  input(chk, false);
  chk->add_option("--dim", o.dim, "Dimension for random jets");
  chk->add_option("--order", o.order, "Connection jet order for random jets");
  chk->add_option("--count", o.count, "Number of random trials");
  chk->add_option("--seed", o.seed, "Generator seed");
  chk->add_flag("--json", o.json, "JSON report");
  common(chk);
  cap(chk);

  auto* rec = app.add_subcommand("reconstruct", "Decompose a symmetric jet and rebuild it");
  input(rec, true);
  common(rec);
  cap(rec);

  auto* red = app.add_subcommand("reduce", "Reduction data of a connection jet (and tensor jet)");
  input(red, true);
  red->add_option("--tensor", o.tensor, "Tensor document (second reduction)");
  red->add_option("--k", o.k, "Reduction order k")->required();
  common(red);
  cap(red);

  auto* cls = app.add_subcommand("classify", "Classification pipeline for the cotangent (0,2) family");
  cls->add_option("--dim", o.dim, "Dimension m");
  cls->add_flag("--torsion-free", o.torsion_free, "Drop every torsion-dependent term");
  common(cls);

  auto* ev = app.add_subcommand("evaluate-family", "Evaluate the 14-parameter family on (L, ẋ)");
  input(ev, false);
  ev->add_option("--xdot", o.xdot, "Covector ẋ as comma-separated rationals");
  ev->add_option("--param", o.params, "NAME=VALUE, repeatable; unlisted parameters are 0");
  ev->add_option("--dim", o.dim, "Dimension for a random input");
  ev->add_option("--seed", o.seed, "Generator seed for a random input");
  ev->add_flag("--forms", o.forms, "List the canonical forms and their parameters");
  common(ev);
  cap(ev);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  int code = 0;
  std::string report;
  try {
    if (*curv)
      report = cmd_curvature(o);
    else if (*covd)
      report = cmd_covd(o);
    else if (*split)
      report = cmd_split(o);
    else if (*lc)
      report = cmd_levi_civita(o);
    else if (*act)
      report = cmd_act(o);
    else if (*chk)
      report = cmd_check_identities(o);
    else if (*rec)
      report = cmd_reconstruct(o);
    else if (*red)
      report = cmd_reduce(o);
    else if (*cls)
      report = cmd_classify(o);
    else if (*ev)
      report = cmd_evaluate_family(o);
  } catch (const CheckFailed& f) {
    report = f.report;
    code = 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) {
      err << "error: cannot write " << o.out << "\n";
      return 2;
    }
    f << report;
  } else {
    out << report;
  }
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace natop
