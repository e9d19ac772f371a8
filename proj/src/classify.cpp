#include "natop/classify.hpp"

#include "natop/random.hpp"
#include "natop/sympoly.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace natop {

namespace {

using V = Variance;

// ---------------------------------------------------------------------------
// Dense arrays over full index tuples, generic in the scalar type.

template <class S>
struct Dense {
  int m = 0;
  int rank = 0;
  std::vector<S> v;

  Dense() = default;
  Dense(int dim, int r) : m(dim), rank(r) {
    std::size_t n = 1;
    for (int i = 0; i < r; ++i) n *= static_cast<std::size_t>(dim);
    v.resize(n);
  }
  [[nodiscard]] std::size_t flat(std::span<const int> idx) const {
    std::size_t k = 0;
    for (int i : idx) k = k * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
    return k;
  }
  S& at(std::span<const int> idx) { return v[flat(idx)]; }
  const S& at(std::span<const int> idx) const { return v[flat(idx)]; }
  S& at(std::initializer_list<int> idx) { return v[flat(std::span<const int>(idx.begin(), idx.size()))]; }
  const S& at(std::initializer_list<int> idx) const {
    return v[flat(std::span<const int>(idx.begin(), idx.size()))];
  }
};

template <class S>
struct Domain {
  int m = 0;
  Dense<S> xdot, sym, tor, dtor;
  std::vector<Dense<S>> curv;   // by i
  std::vector<Dense<S>> tdiff;  // by j - 2

  const Dense<S>& get(const FactorType& f) const {
    const Dense<S>* p = nullptr;
    switch (f.kind) {
      case FactorKind::xdot: p = &xdot; break;
      case FactorKind::sym_connection: p = &sym; break;
      case FactorKind::torsion: p = &tor; break;
      case FactorKind::torsion_gradient: p = &dtor; break;
      case FactorKind::curvature:
        if (static_cast<std::size_t>(f.order) < curv.size()) p = &curv[static_cast<std::size_t>(f.order)];
        break;
      case FactorKind::torsion_differential:
        if (f.order >= 2 && static_cast<std::size_t>(f.order - 2) < tdiff.size())
          p = &tdiff[static_cast<std::size_t>(f.order - 2)];
        break;
    }
    if (p == nullptr || p->rank == 0) throw std::invalid_argument("domain point lacks coordinates for " + f.name());
    return *p;
  }
};

template <class S>
Dense<S> dense_from(const ComponentArray& a) {
  Dense<S> d(a.dim(), a.rank());
  for_each_index(a.dim(), a.rank(), [&](std::span<const int> idx) { d.at(idx) = S(a.at(idx)); });
  return d;
}

Domain<Rational> numeric_domain(const DomainValues& x) {
  Domain<Rational> d;
  d.m = x.dim();
  d.xdot = dense_from<Rational>(x.xdot);
  d.sym = dense_from<Rational>(x.sym);
  d.tor = dense_from<Rational>(x.torsion);
  d.dtor = dense_from<Rational>(x.torsion_gradient);
  d.curv.push_back(dense_from<Rational>(x.curvature));
  return d;
}

// ---------------------------------------------------------------------------
// Slot bookkeeping.

struct SlotInfo {
  std::vector<Variance> var;   // per slot
  std::vector<int> factor_of;  // factor index, -1 for outputs
  std::vector<int> offset;     // first slot of each factor
};

SlotInfo slot_info(const std::vector<FactorType>& factors, Block b) {
  SlotInfo s;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    s.offset.push_back(static_cast<int>(s.var.size()));
    for (Variance v : factors[f].slots()) {
      s.var.push_back(v);
      s.factor_of.push_back(static_cast<int>(f));
    }
  }
  for (Variance v : block_outputs(b)) {
    s.var.push_back(v);
    s.factor_of.push_back(-1);
  }
  return s;
}

// A side: factor lower slots and output upper slots.
bool a_side(const SlotInfo& s, int p) {
  const bool out = s.factor_of[static_cast<std::size_t>(p)] < 0;
  return (s.var[static_cast<std::size_t>(p)] == V::lower) != out;
}

struct Generator {
  std::vector<int> perm;
  int sign = 1;
};

std::vector<Generator> symmetry_generators(const std::vector<FactorType>& factors, const SlotInfo& s) {
  const int n = static_cast<int>(s.var.size());
  std::vector<int> id(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) id[static_cast<std::size_t>(i)] = i;
  std::vector<Generator> gens;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const int o = s.offset[f];
    for (const auto& g : factors[f].groups())
      for (std::size_t k = 0; k + 1 < g.slots.size(); ++k) {
        Generator t{id, g.kind == Symmetry::antisymmetric ? -1 : 1};
        std::swap(t.perm[static_cast<std::size_t>(o + g.slots[k])], t.perm[static_cast<std::size_t>(o + g.slots[k + 1])]);
        gens.push_back(std::move(t));
      }
    if (f + 1 < factors.size() && factors[f] == factors[f + 1]) {
      Generator t{id, 1};
      const int o2 = s.offset[f + 1];
      const int len = static_cast<int>(factors[f].slots().size());
      for (int k = 0; k < len; ++k) std::swap(t.perm[static_cast<std::size_t>(o + k)], t.perm[static_cast<std::size_t>(o2 + k)]);
      gens.push_back(std::move(t));
    }
  }
  return gens;
}

struct Canonical {
  std::vector<int> partner;
  int sign = 1;  // original = sign · canonical
  bool vanishes = false;
};

Canonical canonicalize(const std::vector<int>& partner, const std::vector<Generator>& gens) {
  std::map<std::vector<int>, int> seen;
  std::deque<std::vector<int>> queue;
  seen.emplace(partner, 1);
  queue.push_back(partner);
  bool vanishes = false;
  std::vector<int> next(partner.size());
  while (!queue.empty()) {
    const std::vector<int> cur = queue.front();
    queue.pop_front();
    const int sc = seen.at(cur);
    for (const auto& g : gens) {
      for (std::size_t i = 0; i < cur.size(); ++i)
        next[static_cast<std::size_t>(g.perm[i])] = g.perm[static_cast<std::size_t>(cur[i])];
      const int sn = sc * g.sign;
      auto [it, inserted] = seen.emplace(next, sn);
      if (inserted)
        queue.push_back(next);
      else if (it->second != sn)
        vanishes = true;
    }
  }
  const auto& [best, sign] = *seen.begin();
  // seen[x] = s means pattern(x) = s · pattern(original)
  return {best, sign, vanishes};
}

// ---------------------------------------------------------------------------
// Named terms in their conventional form. Letters l and m are the outputs.

struct NamedSpec {
  const char* symbol;
  std::vector<std::pair<FactorType, const char*>> factors;
};

const FactorType kX{FactorKind::xdot, 0};
const FactorType kL{FactorKind::sym_connection, 0};
const FactorType kT{FactorKind::torsion, 0};
const FactorType kDT{FactorKind::torsion_gradient, 0};
const FactorType kR{FactorKind::curvature, 0};

const std::vector<NamedSpec>& named_ll() {
  static const std::vector<NamedSpec> specs = {
      {"A", {{kX, "l"}, {kX, "m"}}},
      {"B1", {{kX, "l"}, {kL, "rrm"}}},
      {"B2", {{kX, "m"}, {kL, "rrl"}}},
      {"B3", {{kX, "r"}, {kL, "rlm"}}},
      {"C1", {{kX, "l"}, {kT, "rrm"}}},
      {"C2", {{kX, "m"}, {kT, "rrl"}}},
      {"C3", {{kX, "r"}, {kT, "rlm"}}},
      {"D1", {{kL, "rrl"}, {kL, "ssm"}}},
      {"D2", {{kL, "rsl"}, {kL, "srm"}}},
      {"D3", {{kL, "rrs"}, {kL, "slm"}}},
      {"E1", {{kL, "rrl"}, {kT, "ssm"}}},
      {"E2", {{kL, "rsl"}, {kT, "srm"}}},
      {"E3", {{kL, "rrs"}, {kT, "slm"}}},
      {"E4", {{kL, "rrm"}, {kT, "ssl"}}},
      {"E5", {{kL, "rsm"}, {kT, "srl"}}},
      {"E6", {{kL, "rlm"}, {kT, "srs"}}},
      {"F1", {{kT, "rrl"}, {kT, "ssm"}}},
      {"F2", {{kT, "rsl"}, {kT, "srm"}}},
      {"F3", {{kT, "rrs"}, {kT, "slm"}}},
      {"G1", {{kDT, "rrlm"}}},
      {"G2", {{kDT, "rrml"}}},
      {"G3", {{kDT, "rlmr"}}},
      {"H1", {{kR, "rrlm"}}},
      {"H2", {{kR, "lrrm"}}},
  };
  return specs;
}

std::vector<int> partner_from_letters(const NamedSpec& spec, const SlotInfo& s) {
  std::map<char, std::vector<int>> where;
  int p = 0;
  for (const auto& [f, letters] : spec.factors)
    for (const char* c = letters; *c != '\0'; ++c) where[*c].push_back(p++);
  where['l'].push_back(p);
  where['m'].push_back(p + 1);
  std::vector<int> partner(s.var.size(), -1);
  for (const auto& [c, ps] : where) {
    if (ps.size() != 2) throw std::logic_error(std::string("named term ") + spec.symbol + ": bad letter " + c);
    partner[static_cast<std::size_t>(ps[0])] = ps[1];
    partner[static_cast<std::size_t>(ps[1])] = ps[0];
  }
  return partner;
}

struct NamedEntry {
  std::string symbol;
  std::vector<int> partner;
  int order = 0;  // position in the conventional table
};

// Canonical pattern -> conventional term, for one exponent vector and block.
std::map<std::vector<int>, NamedEntry> named_terms(const ExponentVector& ev, Block b,
                                                   const std::vector<FactorType>& factors, const SlotInfo& s,
                                                   const std::vector<Generator>& gens) {
  std::map<std::vector<int>, NamedEntry> out;
  if (b == Block::lu || b == Block::ul) {
    if (ev.is_zero()) {
      const int n = static_cast<int>(s.var.size());
      std::vector<int> partner{n - 1, n - 2};
      out.emplace(canonicalize(partner, gens).partner, NamedEntry{b == Block::lu ? "B" : "C", partner, 0});
    }
    return out;
  }
  if (b != Block::ll) return out;
  int order = 0;
  for (const auto& spec : named_ll()) {
    std::vector<FactorType> fs;
    for (const auto& [f, letters] : spec.factors) fs.push_back(f);
    ++order;
    if (fs != factors) continue;
    auto partner = partner_from_letters(spec, s);
    out.emplace(canonicalize(partner, gens).partner, NamedEntry{spec.symbol, partner, order});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term evaluation.

template <class S>
Dense<S> evaluate_term(const AnsatzTerm& t, const Domain<S>& x) {
  const int m = x.m;
  const int n = t.slot_count();
  const int o1 = n - 2;
  const int o2 = n - 1;
  Dense<S> out(m, 2);
  std::vector<const Dense<S>*> fac;
  std::vector<int> off;
  int p = 0;
  for (const auto& f : t.factors) {
    fac.push_back(&x.get(f));
    off.push_back(p);
    p += static_cast<int>(f.slots().size());
  }
  // label each pair; dummy pairs get loop variables
  std::vector<int> label(static_cast<std::size_t>(n), -1);  // -1: output 1, -2: output 2, k>=0: dummy k
  int dummies = 0;
  for (int i = 0; i < n; ++i) {
    const int j = t.partner[static_cast<std::size_t>(i)];
    if (i == o1 || i == o2) continue;
    if (j == o1)
      label[static_cast<std::size_t>(i)] = -1;
    else if (j == o2)
      label[static_cast<std::size_t>(i)] = -2;
    else if (i < j)
      label[static_cast<std::size_t>(i)] = label[static_cast<std::size_t>(j)] = dummies++;
  }
  const bool delta = t.partner[static_cast<std::size_t>(o1)] == o2;
  std::vector<int> vals(static_cast<std::size_t>(n));
  std::vector<int> dv(static_cast<std::size_t>(dummies));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (delta && a != b) continue;
      S acc{};
      std::fill(dv.begin(), dv.end(), 0);
      while (true) {
        for (int i = 0; i < o1; ++i) {
          const int l = label[static_cast<std::size_t>(i)];
          vals[static_cast<std::size_t>(i)] = l == -1 ? a : l == -2 ? b : dv[static_cast<std::size_t>(l)];
        }
        S prod(Rational(1));
        for (std::size_t f = 0; f < fac.size(); ++f) {
          const auto& d = *fac[f];
          const S& v = d.at(std::span<const int>(vals.data() + off[f], static_cast<std::size_t>(d.rank)));
          prod = prod * v;
        }
        acc += prod;
        int k = 0;
        while (k < dummies && ++dv[static_cast<std::size_t>(k)] == m) dv[static_cast<std::size_t>(k++)] = 0;
        if (k == dummies) break;
      }
      out.at({a, b}) = std::move(acc);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Symbolic domain points.

// Canonical tuple within declared groups; returns 0 for a forced zero.
int canonical_tuple(std::vector<int>& idx, const std::vector<SlotGroup>& groups) {
  int sign = 1;
  for (const auto& g : groups) {
    std::vector<int> vals;
    for (int s : g.slots) vals.push_back(idx[static_cast<std::size_t>(s)]);
    if (g.kind == Symmetry::antisymmetric) {
      for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
          if (vals[i] == vals[j]) return 0;
          if (vals[i] > vals[j]) sign = -sign;
        }
    }
    std::sort(vals.begin(), vals.end());
    for (std::size_t k = 0; k < g.slots.size(); ++k) idx[static_cast<std::size_t>(g.slots[k])] = vals[k];
  }
  return sign;
}

std::string indexed_name(const FactorType& f, std::span<const int> idx, const std::string& label = "") {
  const auto var = f.slots();
  std::string out = label.empty() ? f.name() : label;
  Variance cur = var[0] == V::upper ? V::lower : V::upper;
  bool open = false;
  for (std::size_t i = 0; i < var.size(); ++i) {
    if (i == 0 || var[i] != cur) {
      if (open) out += "}";
      out += var[i] == V::upper ? "^{" : "_{";
      open = true;
      cur = var[i];
    }
    out += std::to_string(idx[i] + 1);
  }
  if (open) out += "}";
  return out;
}

Dense<SymPoly> free_symbols(const FactorType& f, int m, SymbolTable& table, const std::string& label = "") {
  const int r = static_cast<int>(f.slots().size());
  Dense<SymPoly> d(m, r);
  std::map<std::vector<int>, int> ids;
  const auto groups = f.groups();
  for_each_index(m, r, [&](std::span<const int> idx) {
    std::vector<int> c(idx.begin(), idx.end());
    const int sign = canonical_tuple(c, groups);
    if (sign == 0) return;
    auto it = ids.find(c);
    if (it == ids.end()) it = ids.emplace(c, table.add(indexed_name(f, c, label))).first;
    d.at(idx) = SymPoly::symbol(it->second, Rational(sign));
  });
  return d;
}

// w_ν^ρ_{λμ} = P^ρ_{λν,μ} − P^ρ_{μν,λ} with P symmetric in its lower pair:
// the general algebraic curvature value.
Dense<SymPoly> bianchi_curvature(int m, SymbolTable& table) {
  FactorType p{FactorKind::torsion_gradient, 0};  // only used for naming
  Dense<SymPoly> pp(m, 4);
  std::map<std::vector<int>, int> ids;
  for_each_index(m, 4, [&](std::span<const int> idx) {
    std::vector<int> c(idx.begin(), idx.end());
    if (c[1] > c[2]) std::swap(c[1], c[2]);
    auto it = ids.find(c);
    if (it == ids.end())
      it = ids.emplace(c, table.add(indexed_name(p, c, "P"))).first;
    pp.at(idx) = SymPoly::symbol(it->second);
  });
  Dense<SymPoly> w(m, 4);
  for_each_index(m, 4, [&](std::span<const int> idx) {
    const int nu = idx[0], rho = idx[1], la = idx[2], mu = idx[3];
    w.at(idx) = pp.at({rho, la, nu, mu}) - pp.at({rho, mu, nu, la});
  });
  return w;
}

std::set<FactorType> factor_types(const std::vector<AnsatzTerm>& terms) {
  std::set<FactorType> out;
  for (const auto& t : terms)
    for (const auto& f : t.factors) out.insert(f);
  return out;
}

Domain<SymPoly> symbolic_domain(const std::set<FactorType>& types, int m, SymbolTable& table, bool bianchi) {
  Domain<SymPoly> d;
  d.m = m;
  d.xdot = free_symbols(kX, m, table);
  for (const auto& f : types) {
    switch (f.kind) {
      case FactorKind::xdot: break;
      case FactorKind::sym_connection: d.sym = free_symbols(f, m, table); break;
      case FactorKind::torsion: d.tor = free_symbols(f, m, table); break;
      case FactorKind::torsion_gradient: d.dtor = free_symbols(f, m, table); break;
      case FactorKind::curvature:
        if (d.curv.size() <= static_cast<std::size_t>(f.order)) d.curv.resize(static_cast<std::size_t>(f.order) + 1);
        d.curv[static_cast<std::size_t>(f.order)] =
            (bianchi && f.order == 0) ? bianchi_curvature(m, table) : free_symbols(f, m, table);
        break;
      case FactorKind::torsion_differential:
        if (d.tdiff.size() <= static_cast<std::size_t>(f.order - 2)) d.tdiff.resize(static_cast<std::size_t>(f.order - 1));
        d.tdiff[static_cast<std::size_t>(f.order - 2)] = free_symbols(f, m, table);
        break;
    }
  }
  // torsion_gradient transforms through T, so keep T available
  if (d.dtor.rank > 0 && d.tor.rank == 0) d.tor = free_symbols(kT, m, table);
  return d;
}

using SparseVec = std::map<std::tuple<int, int, SymMonomial>, Rational>;

SparseVec flatten(const Dense<SymPoly>& d) {
  SparseVec out;
  for (int a = 0; a < d.m; ++a)
    for (int b = 0; b < d.m; ++b)
      for (const auto& [mono, c] : d.at({a, b}).terms()) out.emplace(std::make_tuple(a, b, mono), c);
  return out;
}

int rank_of(const std::vector<SparseVec>& cols) {
  std::map<std::tuple<int, int, SymMonomial>, int> keys;
  for (const auto& c : cols)
    for (const auto& [k, v] : c) keys.emplace(k, 0);
  int r = 0;
  for (auto& [k, v] : keys) v = r++;
  Matrix mtx(cols.size(), std::vector<Rational>(keys.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    for (const auto& [k, v] : cols[i]) mtx[i][static_cast<std::size_t>(keys.at(k))] = v;
  return rank(mtx);
}

const char* kDummyLetters[] = {"ρ", "σ", "κ", "τ", "ε", "ω", "α", "β", "γ", "η", "ζ", "ξ"};

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Variance> FactorType::slots() const {
  switch (kind) {
    case FactorKind::xdot: return {V::lower};
    case FactorKind::sym_connection:
    case FactorKind::torsion: return {V::upper, V::lower, V::lower};
    case FactorKind::torsion_gradient: return {V::upper, V::lower, V::lower, V::lower};
    case FactorKind::curvature: {
      std::vector<Variance> s{V::lower, V::upper, V::lower, V::lower};
      s.insert(s.end(), static_cast<std::size_t>(order), V::lower);
      return s;
    }
    case FactorKind::torsion_differential: {
      std::vector<Variance> s{V::upper, V::lower, V::lower};
      s.insert(s.end(), static_cast<std::size_t>(order), V::lower);
      return s;
    }
  }
  return {};
}

std::vector<SlotGroup> FactorType::groups() const {
  switch (kind) {
    case FactorKind::xdot: return {};
    case FactorKind::sym_connection: return {{Symmetry::symmetric, {1, 2}}};
    case FactorKind::torsion:
    case FactorKind::torsion_gradient:
    case FactorKind::torsion_differential: return {{Symmetry::antisymmetric, {1, 2}}};
    case FactorKind::curvature: return {{Symmetry::antisymmetric, {2, 3}}};
  }
  return {};
}

std::string FactorType::name() const {
  switch (kind) {
    case FactorKind::xdot: return "ẋ";
    case FactorKind::sym_connection: return "Λ̃";
    case FactorKind::torsion: return "T";
    case FactorKind::torsion_gradient: return "T,";
    case FactorKind::curvature: return order == 0 ? "R̃" : "∇" + std::to_string(order) + "R̃";
    case FactorKind::torsion_differential: return "∇" + std::to_string(order) + "T";
  }
  return "?";
}

ExponentVector::ExponentVector(int r) {
  if (r < 1) throw std::invalid_argument("ExponentVector: order bound must be >= 1");
  d.assign(static_cast<std::size_t>(r), 0);
  e.assign(static_cast<std::size_t>(r - 1), 0);
}

int ExponentVector::weight() const {
  int w = a + b + c0 + 2 * c1;
  for (std::size_t i = 0; i < d.size(); ++i) w += static_cast<int>(i + 2) * d[i];
  for (std::size_t j = 0; j < e.size(); ++j) w += static_cast<int>(j + 3) * e[j];
  return w;
}

bool ExponentVector::is_zero() const { return weight() == 0; }

bool ExponentVector::torsion_free() const {
  return c0 == 0 && c1 == 0 && std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
}

std::vector<FactorType> ExponentVector::factors() const {
  std::vector<FactorType> out;
  out.insert(out.end(), static_cast<std::size_t>(a), kX);
  out.insert(out.end(), static_cast<std::size_t>(b), kL);
  out.insert(out.end(), static_cast<std::size_t>(c0), kT);
  out.insert(out.end(), static_cast<std::size_t>(c1), kDT);
  for (std::size_t i = 0; i < d.size(); ++i)
    out.insert(out.end(), static_cast<std::size_t>(d[i]), FactorType{FactorKind::curvature, static_cast<int>(i)});
  for (std::size_t j = 0; j < e.size(); ++j)
    out.insert(out.end(), static_cast<std::size_t>(e[j]),
               FactorType{FactorKind::torsion_differential, static_cast<int>(j + 2)});
  return out;
}

std::string ExponentVector::describe() const {
  std::string out;
  auto add = [&](const std::string& n, int v) {
    if (v == 0) return;
    if (!out.empty()) out += " ";
    out += n + "=" + std::to_string(v);
  };
  add("a", a);
  add("b", b);
  add("c0", c0);
  add("c1", c1);
  for (std::size_t i = 0; i < d.size(); ++i) add("d" + std::to_string(i), d[i]);
  for (std::size_t j = 0; j < e.size(); ++j) add("e" + std::to_string(j + 2), e[j]);
  return out.empty() ? "0" : out;
}

std::vector<ExponentVector> solve_homogeneity(int target, int r) {
  if (r < 1) throw std::invalid_argument("solve_homogeneity: order bound must be >= 1");
  std::vector<ExponentVector> out;
  if (target < 0) return out;
  // coordinates with their weights, in lexicographic priority
  std::vector<int> weights{1, 1, 1, 2};
  for (int i = 0; i < r; ++i) weights.push_back(i + 2);
  for (int j = 2; j <= r; ++j) weights.push_back(j + 1);
  std::vector<int> x(weights.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
    if (k == weights.size()) {
      if (left != 0) return;
      ExponentVector ev(r);
      ev.a = x[0];
      ev.b = x[1];
      ev.c0 = x[2];
      ev.c1 = x[3];
      for (int i = 0; i < r; ++i) ev.d[static_cast<std::size_t>(i)] = x[4 + static_cast<std::size_t>(i)];
      for (int j = 0; j < r - 1; ++j)
        ev.e[static_cast<std::size_t>(j)] = x[4 + static_cast<std::size_t>(r) + static_cast<std::size_t>(j)];
      out.push_back(std::move(ev));
      return;
    }
    for (int v = left / weights[k]; v >= 0; --v) {
      x[k] = v;
      rec(k + 1, left - v * weights[k]);
    }
    x[k] = 0;
  };
  rec(0, target);
  return out;
}

std::string block_name(Block b) {
  switch (b) {
    case Block::ll: return "phi_ll";
    case Block::lu: return "phi_lu";
    case Block::ul: return "phi_ul";
    case Block::uu: return "phi_uu";
  }
  return "?";
}

int block_target(Block b) {
  switch (b) {
    case Block::ll: return 2;
    case Block::lu:
    case Block::ul: return 0;
    case Block::uu: return -2;
  }
  return 0;
}

std::vector<Variance> block_outputs(Block b) {
  switch (b) {
    case Block::ll: return {V::lower, V::lower};
    case Block::lu: return {V::lower, V::upper};
    case Block::ul: return {V::upper, V::lower};
    case Block::uu: return {V::upper, V::upper};
  }
  return {};
}

std::string AnsatzTerm::formula() const {
  const int n = slot_count();
  const int o1 = n - 2;
  const int o2 = n - 1;
  std::vector<std::string> letter(static_cast<std::size_t>(n));
  letter[static_cast<std::size_t>(o1)] = "λ";
  letter[static_cast<std::size_t>(o2)] = "μ";
  int next = 0;
  for (int i = 0; i < o1; ++i) {
    const int j = partner[static_cast<std::size_t>(i)];
    if (j >= o1)
      letter[static_cast<std::size_t>(i)] = letter[static_cast<std::size_t>(j)];
    else if (letter[static_cast<std::size_t>(i)].empty()) {
      const std::string l = next < 12 ? kDummyLetters[next] : "ι" + std::to_string(next);
      ++next;
      letter[static_cast<std::size_t>(i)] = letter[static_cast<std::size_t>(j)] = l;
    }
  }
  std::string out;
  if (partner[static_cast<std::size_t>(o1)] == o2) {
    const auto outs = block_outputs(block);
    out = outs[0] == V::lower ? "δ_λ^μ" : "δ^λ_μ";
  }
  int p = 0;
  for (const auto& f : factors) {
    const auto var = f.slots();
    if (!out.empty()) out += " ";
    std::string base = f.kind == FactorKind::torsion_gradient ? "T" : f.name();
    out += base;
    // group consecutive slots of equal variance; derivative slots after a comma
    const int plain = f.kind == FactorKind::torsion_gradient ? 3
                      : f.kind == FactorKind::curvature ? 4
                      : f.kind == FactorKind::torsion_differential ? 3
                                                                   : static_cast<int>(var.size());
    std::size_t i = 0;
    while (i < var.size()) {
      std::size_t j = i;
      std::string body;
      while (j < var.size() && var[j] == var[i]) {
        if (static_cast<int>(j) == plain) body += f.kind == FactorKind::torsion_gradient ? "," : ";";
        body += letter[static_cast<std::size_t>(p) + j];
        ++j;
      }
      out += (var[i] == V::upper ? "^" : "_") + (j - i > 1 || body.size() > 2 ? "{" + body + "}" : body);
      i = j;
    }
    p += static_cast<int>(var.size());
  }
  return out.empty() ? "1" : out;
}

std::vector<AnsatzTerm> enumerate_pairings(const ExponentVector& ev, Block b) {
  const auto factors = ev.factors();
  const SlotInfo s = slot_info(factors, b);
  const int n = static_cast<int>(s.var.size());
  std::vector<int> as, bs;
  for (int p = 0; p < n; ++p) (a_side(s, p) ? as : bs).push_back(p);
  std::vector<AnsatzTerm> out;
  if (as.size() != bs.size()) return out;
  const auto gens = symmetry_generators(factors, s);
  std::set<std::vector<int>> done;
  std::vector<int> perm = bs;
  do {
    std::vector<int> partner(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < as.size(); ++k) {
      partner[static_cast<std::size_t>(as[k])] = perm[k];
      partner[static_cast<std::size_t>(perm[k])] = as[k];
    }
    auto c = canonicalize(partner, gens);
    if (c.vanishes || !done.insert(c.partner).second) continue;
    out.push_back(AnsatzTerm{b, ev, factors, c.partner, ""});
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(out.begin(), out.end(), [](const AnsatzTerm& x, const AnsatzTerm& y) { return x.partner < y.partner; });
  return out;
}

std::vector<AnsatzTerm> generate_ansatz(const ExponentVector& ev, int m, Block b) {
  if (m < 1) throw std::invalid_argument("generate_ansatz: dimension must be >= 1");
  auto raw = enumerate_pairings(ev, b);
  if (raw.empty()) return raw;
  const SlotInfo s = slot_info(raw.front().factors, b);
  const auto gens = symmetry_generators(raw.front().factors, s);
  const auto named = named_terms(ev, b, raw.front().factors, s, gens);
  const std::set<FactorType> types(raw.front().factors.begin(), raw.front().factors.end());
  // named first in table order, then the rest in canonical order
  std::vector<std::pair<int, AnsatzTerm>> ordered;
  for (auto& t : raw) {
    auto it = named.find(t.partner);
    if (it != named.end()) {
      t.partner = it->second.partner;
      t.symbol = it->second.symbol;
      ordered.emplace_back(it->second.order, std::move(t));
    } else {
      ordered.emplace_back(1000 + static_cast<int>(ordered.size()), std::move(t));
    }
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  SymbolTable table;
  const auto dom = symbolic_domain(types, m, table, true);
  std::vector<SparseVec> kept_vecs;
  std::vector<AnsatzTerm> kept;
  int unnamed = 0;
  for (auto& [order, t] : ordered) {
    auto vec = flatten(evaluate_term(t, dom));
    if (vec.empty()) continue;
    kept_vecs.push_back(vec);
    if (rank_of(kept_vecs) < static_cast<int>(kept_vecs.size())) {
      kept_vecs.pop_back();
      continue;
    }
    if (t.symbol.empty()) t.symbol = "N" + std::to_string(++unnamed);
    kept.push_back(std::move(t));
  }
  return kept;
}

std::vector<AnsatzTerm> full_ansatz(int m, int r, bool torsion_free) {
  std::vector<AnsatzTerm> out;
  int unnamed = 0;
  for (Block b : {Block::ll, Block::lu, Block::ul, Block::uu})
    for (const auto& ev : solve_homogeneity(block_target(b), r)) {
      if (torsion_free && !ev.torsion_free()) continue;
      for (auto& t : generate_ansatz(ev, m, b)) {
        if (t.symbol[0] == 'N') t.symbol = "N" + std::to_string(++unnamed);
        out.push_back(std::move(t));
      }
    }
  return out;
}

EquivarianceSystem kernel_constraints(const std::vector<AnsatzTerm>& terms, int m) {
  EquivarianceSystem sys;
  sys.dim = m;
  for (const auto& t : terms) sys.unknowns.push_back(t.symbol);
  if (terms.empty()) return sys;
  SymbolTable table;
  const auto types = factor_types(terms);
  const Domain<SymPoly> x = symbolic_domain(types, m, table, false);
  // kernel parameters a^λ_{μν}
  const Dense<SymPoly> a = free_symbols(kL, m, table, "a");
  Domain<SymPoly> y = x;
  if (x.sym.rank > 0)
    for (std::size_t k = 0; k < y.sym.v.size(); ++k) y.sym.v[k] += a.v[k];
  if (x.dtor.rank > 0) {
    for (int l = 0; l < m; ++l)
      for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu)
          for (int s = 0; s < m; ++s) {
            auto& e = y.dtor.at({l, mu, nu, s});
            for (int r = 0; r < m; ++r) {
              e.add_product(a.at({l, r, s}), x.tor.at({r, mu, nu}));
              e.add_product(a.at({r, mu, s}), x.tor.at({l, r, nu}), Rational(-1));
              e.add_product(a.at({r, nu, s}), x.tor.at({l, mu, r}), Rational(-1));
            }
          }
  }
  // Q_{ρλ} = a^α_{ρλ} ẋ_α
  Dense<SymPoly> q(m, 2);
  for (int r = 0; r < m; ++r)
    for (int l = 0; l < m; ++l)
      for (int al = 0; al < m; ++al) q.at({r, l}).add_product(a.at({al, r, l}), x.xdot.at({al}));

  using Key = std::tuple<int, int, int, SymMonomial>;
  std::map<Key, std::map<int, Rational>> rows;
  auto accumulate = [&](Block blk, int unknown, const Dense<SymPoly>& res) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (const auto& [mono, c] : res.at({i, j}).terms())
          rows[Key{static_cast<int>(blk), i, j, mono}][unknown] += c;
  };
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    const int u = static_cast<int>(k);
    const Dense<SymPoly> vx = evaluate_term(t, x);
    Dense<SymPoly> own = evaluate_term(t, y);
    for (std::size_t i = 0; i < own.v.size(); ++i) own.v[i] -= vx.v[i];
    accumulate(t.block, u, own);
    // g·φ(x) corrections from the fibre action
    Dense<SymPoly> ll(m, 2), lu(m, 2), ul(m, 2);
    for (int la = 0; la < m; ++la)
      for (int mu = 0; mu < m; ++mu)
        for (int r = 0; r < m; ++r) {
          switch (t.block) {
            case Block::ll: break;
            case Block::lu: ll.at({la, mu}).add_product(q.at({r, mu}), vx.at({la, r}), Rational(-1)); break;
            case Block::ul: ll.at({la, mu}).add_product(q.at({r, la}), vx.at({r, mu}), Rational(-1)); break;
            case Block::uu:
              lu.at({la, mu}).add_product(q.at({r, la}), vx.at({r, mu}), Rational(-1));
              ul.at({la, mu}).add_product(q.at({r, mu}), vx.at({la, r}), Rational(-1));
              for (int s = 0; s < m; ++s)
                ll.at({la, mu}).add_product(q.at({r, la}) * q.at({s, mu}), vx.at({r, s}), Rational(-1));
              break;
          }
        }
    if (t.block != Block::ll) accumulate(Block::ll, u, ll);
    if (t.block == Block::uu) {
      accumulate(Block::lu, u, lu);
      accumulate(Block::ul, u, ul);
    }
  }
  for (const auto& [key, entries] : rows) {
    std::vector<Rational> row(terms.size());
    bool nonzero = false;
    for (const auto& [u, c] : entries) {
      row[static_cast<std::size_t>(u)] = c;
      nonzero = nonzero || sgn(c) != 0;
    }
    if (!nonzero) continue;
    const auto& [blk, i, j, mono] = key;
    sys.rows.push_back(std::move(row));
    sys.provenance.push_back("kernel (δ, a): " + block_name(static_cast<Block>(blk)) + " (" + std::to_string(i + 1) +
                             "," + std::to_string(j + 1) + ") coefficient of " + table.describe(mono));
  }
  return sys;
}

const std::vector<std::string>& family_parameter_names() {
  static const std::vector<std::string> names = {"A",  "B",  "C",  "C1", "C2", "C3", "F1",
                                                 "F2", "F3", "G1", "G2", "G3", "H1", "H2"};
  return names;
}

namespace {

int elimination_priority(const std::string& s) {
  if (s == "B1" || s == "B2" || s == "B3") return 0;
  if (s[0] == 'D') return 1;
  if (s[0] == 'E') return 2;
  if (s[0] == 'N') return 3;
  return 4;
}

struct Relation {
  std::string text;
  std::vector<std::pair<std::string, int>> form;  // Σ c·x = 0
};

const std::vector<Relation>& relations() {
  static const std::vector<Relation> rel = {
      {"B1 = 0", {{"B1", 1}}},
      {"B2 = 0", {{"B2", 1}}},
      {"B3 = B + C", {{"B3", 1}, {"B", -1}, {"C", -1}}},
      {"D1 = 0", {{"D1", 1}}},
      {"D2 = 0", {{"D2", 1}}},
      {"D3 = 0", {{"D3", 1}}},
      {"E1 = 0", {{"E1", 1}}},
      {"E4 = 0", {{"E4", 1}}},
      {"E2 = G3", {{"E2", 1}, {"G3", -1}}},
      {"E3 = -G3", {{"E3", 1}, {"G3", 1}}},
      {"E5 = -G3", {{"E5", 1}, {"G3", 1}}},
      {"E6 = -(G1 + G2)", {{"E6", 1}, {"G1", 1}, {"G2", 1}}},
  };
  return rel;
}

}  // namespace

bool FamilySolution::relations_hold() const {
  return std::all_of(relations.begin(), relations.end(), [](const RelationCheck& r) { return r.holds; });
}

Rational FamilySolution::coefficient(std::size_t k, const std::string& unknown) const {
  for (std::size_t i = 0; i < unknowns.size(); ++i)
    if (unknowns[i] == unknown) return basis.at(k)[i];
  return Rational(0);
}

FamilySolution solve_family(const EquivarianceSystem& system) {
  FamilySolution sol;
  sol.unknowns = system.unknowns;
  const int n = static_cast<int>(system.unknowns.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  const auto& names = family_parameter_names();
  auto rank_in_names = [&](const std::string& s) {
    auto it = std::find(names.begin(), names.end(), s);
    return static_cast<int>(it - names.begin());
  };
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    const auto& sx = system.unknowns[static_cast<std::size_t>(x)];
    const auto& sy = system.unknowns[static_cast<std::size_t>(y)];
    const int px = elimination_priority(sx), py = elimination_priority(sy);
    if (px != py) return px < py;
    if (px == 4) return rank_in_names(sx) < rank_in_names(sy);
    return false;
  });
  const NullSpace ns = null_space(system.rows, n, order);
  for (int c : ns.free_columns) sol.parameters.push_back(system.unknowns[static_cast<std::size_t>(c)]);
  sol.basis = ns.basis;
  sol.dimension = static_cast<int>(sol.basis.size());
  for (const auto& r : relations()) {
    bool holds = true;
    for (std::size_t k = 0; k < sol.basis.size(); ++k) {
      Rational acc;
      for (const auto& [name, c] : r.form) acc += Rational(c) * sol.coefficient(k, name);
      if (sgn(acc) != 0) holds = false;
    }
    sol.relations.push_back({r.text, holds});
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Numeric evaluation.

DomainValues domain_values(const ConnectionJet& l, const ComponentArray& xdot) {
  if (l.order() < 1) throw std::invalid_argument("domain_values: connection jet order must be >= 1");
  if (xdot.dim() != l.dim() || xdot.rank() != 1) throw std::invalid_argument("domain_values: covector shape mismatch");
  const ConnectionJet l1 = l.truncated(1);
  ConnectionJet sym = l1;
  TensorJet tor = TensorJet::zero(l.dim(), torsion_signature(), 1);
  if (!l1.symmetric()) std::tie(sym, tor) = split_connection(l1);
  DomainValues d;
  d.xdot = xdot;
  d.sym = sym.part(0);
  d.torsion = tor.part(0);
  d.torsion_gradient = tor.part(1);
  d.curvature = curvature(sym).w;
  return d;
}

namespace {

void add_dense(CotangentFibrePoint& p, Block b, const Dense<Rational>& d, const Rational& c) {
  ComponentArray* arr = b == Block::ll ? &p.ll : b == Block::lu ? &p.lu : b == Block::ul ? &p.ul : &p.uu;
  for (int i = 0; i < d.m; ++i)
    for (int j = 0; j < d.m; ++j) arr->set({i, j}, arr->at({i, j}) + c * d.at({i, j}));
}

std::vector<Rational> flatten_point(const CotangentFibrePoint& p) {
  std::vector<Rational> out;
  for (const ComponentArray* a : {&p.ll, &p.lu, &p.ul, &p.uu})
    for_each_index(a->dim(), 2, [&](std::span<const int> idx) { out.push_back(a->at(idx)); });
  return out;
}

struct Pieces {
  int m = 0;
  ComponentArray lam;   // full Λ value
  ComponentArray tor;   // T
  ComponentArray dtor;  // ∇̃T, derivative slot last
  ComponentArray w;     // R̃
};

Pieces pieces(const ConnectionJet& l) {
  if (l.order() < 1) throw std::invalid_argument("connection jet order must be >= 1");
  const ConnectionJet l1 = l.truncated(1);
  ConnectionJet sym = l1;
  TensorJet tor = TensorJet::zero(l.dim(), torsion_signature(), 1);
  if (!l1.symmetric()) std::tie(sym, tor) = split_connection(l1);
  Pieces p;
  p.m = l.dim();
  p.lam = l1.part(0);
  p.tor = tor.part(0);
  p.dtor = covariant_differential(sym.truncated(0), tor, 1)[0];
  p.w = curvature(sym).w;
  return p;
}

using FormFn = std::function<CotangentFibrePoint(const ConnectionJet&, const ComponentArray&)>;

CotangentFibrePoint ll_form(int m, const ComponentArray& xdot, const std::function<Rational(int, int)>& f) {
  CotangentFibrePoint p = CotangentFibrePoint::zero(m);
  p.xdot = xdot;
  for (int la = 0; la < m; ++la)
    for (int mu = 0; mu < m; ++mu) p.ll.set({la, mu}, f(la, mu));
  return p;
}

Rational trace_t(const Pieces& p, int a) {
  Rational s;
  for (int r = 0; r < p.m; ++r) s += p.tor.at({r, r, a});
  return s;
}

}  // namespace

CotangentFibrePoint evaluate_ansatz(const std::vector<AnsatzTerm>& terms, const std::vector<Rational>& coeffs,
                                    const DomainValues& x) {
  if (coeffs.size() != terms.size()) throw std::invalid_argument("evaluate_ansatz: coefficient count mismatch");
  const auto dom = numeric_domain(x);
  CotangentFibrePoint p = CotangentFibrePoint::zero(x.dim());
  p.xdot = x.xdot;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (sgn(coeffs[k]) == 0) continue;
    add_dense(p, terms[k].block, evaluate_term(terms[k], dom), coeffs[k]);
  }
  return p;
}

CotangentFibrePoint evaluate_family(const FamilyParameters& params, const ConnectionJet& l, const ComponentArray& xdot) {
  const auto& names = family_parameter_names();
  for (const auto& n : names)
    if (!params.count(n)) throw std::invalid_argument("evaluate_family: missing parameter " + n);
  for (const auto& [n, v] : params)
    if (std::find(names.begin(), names.end(), n) == names.end())
      throw std::invalid_argument("evaluate_family: unknown parameter " + n);
  if (xdot.dim() != l.dim() || xdot.rank() != 1) throw std::invalid_argument("evaluate_family: covector shape mismatch");
  const Pieces p = pieces(l);
  const int m = p.m;
  auto P = [&](const char* n) -> const Rational& { return params.at(n); };
  CotangentFibrePoint out = ll_form(m, xdot, [&](int la, int mu) {
    Rational v = P("A") * xdot.at({la}) * xdot.at({mu});
    v += P("C1") * xdot.at({la}) * trace_t(p, mu);
    v += P("C2") * xdot.at({mu}) * trace_t(p, la);
    for (int r = 0; r < m; ++r) {
      v += P("C3") * xdot.at({r}) * p.tor.at({r, la, mu});
      v += P("B") * p.lam.at({r, la, mu}) * xdot.at({r});
      v += P("C") * p.lam.at({r, mu, la}) * xdot.at({r});
      v += P("G1") * p.dtor.at({r, r, la, mu});
      v += P("G2") * p.dtor.at({r, r, mu, la});
      v += P("G3") * p.dtor.at({r, la, mu, r});
      v += P("H1") * p.w.at({r, r, la, mu});
      v += P("H2") * p.w.at({la, r, r, mu});
      v += P("F3") * trace_t(p, r) * p.tor.at({r, la, mu});
      for (int s = 0; s < m; ++s) v += P("F2") * p.tor.at({r, s, la}) * p.tor.at({s, r, mu});
    }
    v += P("F1") * trace_t(p, la) * trace_t(p, mu);
    return v;
  });
  for (int i = 0; i < m; ++i) {
    out.lu.set({i, i}, P("B"));
    out.ul.set({i, i}, P("C"));
  }
  return out;
}

Matrix family_to_basis(const std::vector<AnsatzTerm>& terms, const FamilySolution& solution, int m,
                       std::uint64_t seed) {
  const auto& names = family_parameter_names();
  RationalRng rng(seed);
  const int fit_points = 4;
  const int check_points = 3;
  std::vector<std::vector<Rational>> basis_cols(solution.basis.size());
  std::vector<std::vector<Rational>> family_cols(names.size());
  std::vector<std::vector<Rational>> check_basis(solution.basis.size()), check_family(names.size());
  for (int s = 0; s < fit_points + check_points; ++s) {
    const auto l = random_connection(rng, m, 1, false);
    ComponentArray xd(m, IndexSignature({V::lower}));
    rng.fill(xd);
    const auto dom = domain_values(l, xd);
    auto& bc = s < fit_points ? basis_cols : check_basis;
    auto& fc = s < fit_points ? family_cols : check_family;
    for (std::size_t k = 0; k < solution.basis.size(); ++k) {
      auto v = flatten_point(evaluate_ansatz(terms, solution.basis[k], dom));
      bc[k].insert(bc[k].end(), v.begin(), v.end());
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      FamilyParameters fp;
      for (const auto& n : names) fp[n] = Rational(n == names[i] ? 1 : 0);
      auto v = flatten_point(evaluate_family(fp, l, xd));
      fc[i].insert(fc[i].end(), v.begin(), v.end());
    }
  }
  const std::size_t rows = basis_cols.empty() ? 0 : basis_cols[0].size();
  Matrix a(rows, std::vector<Rational>(solution.basis.size()));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < solution.basis.size(); ++k) a[r][k] = basis_cols[k][r];
  Matrix out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<Rational> x;
    if (!solve_linear(a, family_cols[i], x))
      throw std::runtime_error("family_to_basis: parameter " + names[i] + " is not in the solution span");
    for (std::size_t r = 0; r < check_family[i].size(); ++r) {
      Rational acc;
      for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * check_basis[k][r];
      if (acc != check_family[i][r])
        throw std::runtime_error("family_to_basis: fit for " + names[i] + " fails on a check point");
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<CanonicalForm> canonical_forms(const ConnectionJet& l, const ComponentArray& xdot) {
  const int m = l.dim();
  if (xdot.dim() != m || xdot.rank() != 1) throw std::invalid_argument("canonical_forms: covector shape mismatch");
  std::vector<std::pair<std::string, FormFn>> forms;
  auto ll = [&](std::string label, std::function<Rational(const Pieces&, const ComponentArray&, int, int)> f) {
    forms.emplace_back(std::move(label), [f](const ConnectionJet& c, const ComponentArray& x) {
      const Pieces p = pieces(c);
      return ll_form(p.m, x, [&](int la, int mu) { return f(p, x, la, mu); });
    });
  };
  ll("θ⊗θ", [](const Pieces&, const ComponentArray& x, int la, int mu) { return Rational(x.at({la}) * x.at({mu})); });
  ll("⟨I⊗T̂, u⟩", [](const Pieces& p, const ComponentArray& x, int la, int mu) {
    return Rational(x.at({la}) * trace_t(p, mu));
  });
  ll("⟨T̂⊗I, u⟩", [](const Pieces& p, const ComponentArray& x, int la, int mu) {
    return Rational(x.at({mu}) * trace_t(p, la));
  });
  ll("⟨T, u⟩", [](const Pieces& p, const ComponentArray& x, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r) s += x.at({r}) * p.tor.at({r, la, mu});
    return s;
  });
  ll("C^{12}_{13}(T⊗T)", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    return Rational(trace_t(p, la) * trace_t(p, mu));
  });
  ll("C^{12}_{31}(T⊗T)", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r)
      for (int q = 0; q < p.m; ++q) s += p.tor.at({r, q, la}) * p.tor.at({q, r, mu});
    return s;
  });
  ll("C^{12}_{12}(T⊗T)", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int q = 0; q < p.m; ++q) s += trace_t(p, q) * p.tor.at({q, la, mu});
    return s;
  });
  ll("C^1_1 ∇̃T", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r) s += p.dtor.at({r, r, la, mu});
    return s;
  });
  ll("conj C^1_1 ∇̃T", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r) s += p.dtor.at({r, r, mu, la});
    return s;
  });
  ll("C^1_3 ∇̃T", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r) s += p.dtor.at({r, la, mu, r});
    return s;
  });
  ll("C^1_1 R[Λ̃]", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r) s += p.w.at({r, r, la, mu});
    return s;
  });
  ll("C^1_2 R[Λ̃]", [](const Pieces& p, const ComponentArray&, int la, int mu) {
    Rational s;
    for (int r = 0; r < p.m; ++r) s += p.w.at({la, r, r, mu});
    return s;
  });
  forms.emplace_back("ω", [](const ConnectionJet& c, const ComponentArray& x) {
    CotangentFibrePoint p = CotangentFibrePoint::zero(c.dim());
    p.xdot = x;
    for (int i = 0; i < c.dim(); ++i) {
      p.lu.set({i, i}, Rational(1));
      p.ul.set({i, i}, Rational(-1));
    }
    return p;
  });
  // ν[Λ*] = (ḋ_κ + Λ^ρ_{κμ} ẋ_ρ d^μ) ⊗ ∂̇^κ inserted into either slot of ω
  forms.emplace_back("ω(ν[Λ*]·, ·)", [](const ConnectionJet& c, const ComponentArray& x) {
    const int n = c.dim();
    const ComponentArray lam = c.part(0);
    CotangentFibrePoint p = ll_form(n, x, [&](int la, int mu) {
      Rational s;
      for (int r = 0; r < n; ++r) s -= lam.at({r, mu, la}) * x.at({r});
      return s;
    });
    for (int i = 0; i < n; ++i) p.ul.set({i, i}, Rational(-1));
    return p;
  });
  forms.emplace_back("ω(·, ν[Λ*]·)", [](const ConnectionJet& c, const ComponentArray& x) {
    const int n = c.dim();
    const ComponentArray lam = c.part(0);
    CotangentFibrePoint p = ll_form(n, x, [&](int la, int mu) {
      Rational s;
      for (int r = 0; r < n; ++r) s += lam.at({r, la, mu}) * x.at({r});
      return s;
    });
    for (int i = 0; i < n; ++i) p.lu.set({i, i}, Rational(1));
    return p;
  });

  // seeded generic probes for the fit
  const auto& names = family_parameter_names();
  RationalRng rng(20240615ULL + static_cast<std::uint64_t>(m));
  std::vector<std::pair<ConnectionJet, ComponentArray>> probes;
  for (int s = 0; s < 4; ++s) {
    ComponentArray xd(m, IndexSignature({V::lower}));
    rng.fill(xd);
    probes.emplace_back(random_connection(rng, m, 1, false), xd);
  }
  Matrix a;
  for (const auto& [c, x] : probes) {
    std::vector<std::vector<Rational>> cols;
    for (const auto& n : names) {
      FamilyParameters fp;
      for (const auto& k : names) fp[k] = Rational(k == n ? 1 : 0);
      cols.push_back(flatten_point(evaluate_family(fp, c, x)));
    }
    for (std::size_t r = 0; r < cols[0].size(); ++r) {
      std::vector<Rational> row;
      for (const auto& col : cols) row.push_back(col[r]);
      a.push_back(std::move(row));
    }
  }
  std::vector<CanonicalForm> out;
  for (const auto& [label, fn] : forms) {
    std::vector<Rational> b;
    for (const auto& [c, x] : probes) {
      auto v = flatten_point(fn(c, x));
      b.insert(b.end(), v.begin(), v.end());
    }
    std::vector<Rational> sol;
    if (!solve_linear(a, b, sol)) throw std::runtime_error("canonical_forms: " + label + " is outside the family");
    CanonicalForm cf;
    cf.label = label;
    cf.value = fn(l, xdot);
    for (std::size_t i = 0; i < names.size(); ++i) cf.parameters[names[i]] = sol[i];
    out.push_back(std::move(cf));
  }
  return out;
}

ClassificationReport classify(int m, bool torsion_free) {
  ClassificationReport rep;
  rep.dim = m;
  rep.torsion_free = torsion_free;
  for (Block b : {Block::ll, Block::lu, Block::ul, Block::uu}) {
    auto evs = solve_homogeneity(block_target(b), 1);
    if (torsion_free)
      evs.erase(std::remove_if(evs.begin(), evs.end(), [](const ExponentVector& e) { return !e.torsion_free(); }),
                evs.end());
    int count = 0;
    for (const auto& ev : evs) count += static_cast<int>(enumerate_pairings(ev, b).size());
    rep.exponents.emplace_back(b, evs);
    rep.pairings.emplace_back(b, count);
  }
  rep.terms = full_ansatz(m, 1, torsion_free);
  rep.system = kernel_constraints(rep.terms, m);
  rep.solution = solve_family(rep.system);
  return rep;
}

}  // namespace natop
