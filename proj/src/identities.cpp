#include "natop/identities.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace natop {

namespace {

using V = Variance;

std::vector<std::string> curvature_slot_names(int i) {
  std::vector<std::string> n{"ν", "ρ", "λ", "μ"};
  for (int k = 1; k <= i; ++k) n.push_back("σ" + std::to_string(k));
  return n;
}

IndexSignature plain(const IndexSignature& s) { return s.without_groups(); }

void check_curvature_shape(const CurvatureValue& w, int i, int dim) {
  if (w.order != i || w.w.dim() != dim || !(w.w.signature() == curvature_signature(i)))
    throw std::invalid_argument("curvature list entry " + std::to_string(i) + " has the wrong shape");
}

// V_q with the slots at positions p, p+1 swapped.
Rational swapped_at(const ComponentArray& a, std::span<const int> idx, std::size_t p, std::vector<int>& buf) {
  buf.assign(idx.begin(), idx.end());
  std::swap(buf[p], buf[p + 1]);
  return a.at(buf);
}

}  // namespace

std::string Residual::first_violation() const {
  std::string out;
  for (std::size_t k = 0; k < values.size() && out.empty(); ++k) {
    if (is_zero(values.value(k))) continue;
    const auto& rep = values.representative(k);
    std::ostringstream os;
    os << family << " residual nonzero at (";
    for (std::size_t s = 0; s < slot_names.size(); ++s) os << (s ? "," : "") << slot_names[s];
    os << ")=(";
    for (std::size_t s = 0; s < rep.size(); ++s) os << (s ? "," : "") << rep[s] + 1;
    os << ") [" << instance << "]: " << to_string(values.value(k));
    out = os.str();
  }
  return out;
}

std::string Residual::max_abs() const {
  Integer den = 1;
  for (std::size_t k = 0; k < values.size(); ++k)
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), values.value(k).get_den_mpz_t());
  Integer best = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    Integer n = abs(values.value(k).get_num()) * (den / values.value(k).get_den());
    if (n > best) best = n;
  }
  if (sgn(best) == 0) return "0";
  return best.get_str() + "/" + den.get_str();
}

namespace {

std::vector<std::string> collect_failures(std::initializer_list<const std::vector<Residual>*> groups) {
  std::vector<std::string> out;
  for (const auto* g : groups)
    for (const auto& r : *g)
      if (!r.zero()) out.push_back(r.first_violation());
  return out;
}

}  // namespace

std::vector<std::string> CurvatureSpaceReport::failures() const {
  return collect_failures({&bianchi1, &bianchi2, &commuted});
}

std::vector<std::string> RicciSubspaceReport::failures() const { return collect_failures({&equations}); }

ComponentArray commuted_derivative_expectation(const std::vector<const ComponentArray*>& ws,
                                               const std::vector<const ComponentArray*>& vs,
                                               const std::vector<Variance>& base, int s, int q) {
  if (s < 2 || s > q) throw std::invalid_argument("commuted_derivative_expectation: need 2 <= s <= q");
  if (static_cast<int>(vs.size()) <= q - 2 || static_cast<int>(ws.size()) <= q - s)
    throw std::invalid_argument("commuted_derivative_expectation: lists too short");
  const int m = vs[0]->dim();
  const int b = static_cast<int>(base.size());
  const int yr = b + s - 2;  // rank of V_{s-2}
  std::vector<Variance> yvar = base;
  yvar.insert(yvar.end(), static_cast<std::size_t>(s - 2), V::lower);
  std::vector<Variance> outvar = base;
  outvar.insert(outvar.end(), static_cast<std::size_t>(q), V::lower);
  ComponentArray out(m, IndexSignature(outvar));
  const int extra = q - s;  // derivative slots after the commuted pair
  const Rational half = make_rational(1, 2);
  std::vector<int> wi, yi;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& idx = out.representative(k);
    const int al = idx[static_cast<std::size_t>(yr)];
    const int be = idx[static_cast<std::size_t>(yr) + 1];
    Rational acc;
    for (unsigned mask = 0; mask < (1u << extra); ++mask) {
      std::vector<int> in_s, in_c;
      for (int e = 0; e < extra; ++e) {
        const int v = idx[static_cast<std::size_t>(yr + 2 + e)];
        ((mask >> e) & 1u ? in_s : in_c).push_back(v);
      }
      const ComponentArray& w = *ws[in_s.size()];
      const ComponentArray& y = *vs[static_cast<std::size_t>(s - 2) + in_c.size()];
      for (int a = 0; a < yr; ++a) {
        const int va = idx[static_cast<std::size_t>(a)];
        for (int sg = 0; sg < m; ++sg) {
          yi.assign(idx.begin(), idx.begin() + yr);
          yi[static_cast<std::size_t>(a)] = sg;
          yi.insert(yi.end(), in_c.begin(), in_c.end());
          const Rational yv = y.at(yi);
          if (is_zero(yv)) continue;
          if (yvar[static_cast<std::size_t>(a)] == V::upper)
            wi = {sg, va, be, al};
          else
            wi = {va, sg, be, al};
          wi.insert(wi.end(), in_s.begin(), in_s.end());
          const Rational wv = w.at(wi);
          if (yvar[static_cast<std::size_t>(a)] == V::upper)
            acc += wv * yv;
          else
            acc -= wv * yv;
        }
      }
    }
    out.set_value(k, acc * half);
  }
  return out;
}

namespace {

// Alt over positions (p, p+1) of `v` minus `expect`.
ComponentArray commuted_residual(const ComponentArray& v, const ComponentArray& expect, std::size_t p) {
  ComponentArray out(v.dim(), plain(v.signature()));
  const Rational half = make_rational(1, 2);
  std::vector<int> buf;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& idx = out.representative(k);
    out.set_value(k, (v.at(idx) - swapped_at(v, idx, p, buf)) * half - expect.at(idx));
  }
  return out;
}

std::string pair_label(const std::string& stem, int s) {
  return "(" + stem + std::to_string(s - 1) + " " + stem + std::to_string(s) + ")";
}

}  // namespace

CurvatureSpaceReport check_curvature_space(const std::vector<CurvatureValue>& ws) {
  CurvatureSpaceReport rep;
  rep.order = static_cast<int>(ws.size()) - 1;
  if (ws.empty()) return rep;
  const int m = ws[0].w.dim();
  for (int i = 0; i < static_cast<int>(ws.size()); ++i) check_curvature_shape(ws[static_cast<std::size_t>(i)], i, m);
  std::vector<int> a, b;
  for (int i = 0; i <= rep.order; ++i) {
    const ComponentArray& w = ws[static_cast<std::size_t>(i)].w;
    Residual r1{"first Bianchi identity", "i=" + std::to_string(i), curvature_slot_names(i),
                ComponentArray(m, plain(w.signature()))};
    for (std::size_t k = 0; k < r1.values.size(); ++k) {
      const auto& idx = r1.values.representative(k);
      a = idx;
      // cyclic (ν λ μ): slots 0, 2, 3
      Rational acc = w.at(idx);
      a[0] = idx[2], a[2] = idx[3], a[3] = idx[0];
      acc += w.at(a);
      a[0] = idx[3], a[2] = idx[0], a[3] = idx[2];
      acc += w.at(a);
      r1.values.set_value(k, acc);
    }
    rep.bianchi1.push_back(std::move(r1));
    if (i >= 1) {
      Residual r2{"second Bianchi identity", "i=" + std::to_string(i), curvature_slot_names(i),
                  ComponentArray(m, plain(w.signature()))};
      for (std::size_t k = 0; k < r2.values.size(); ++k) {
        const auto& idx = r2.values.representative(k);
        b = idx;
        // cyclic (λ μ σ1): slots 2, 3, 4
        Rational acc = w.at(idx);
        b[2] = idx[3], b[3] = idx[4], b[4] = idx[2];
        acc += w.at(b);
        b[2] = idx[4], b[3] = idx[2], b[4] = idx[3];
        acc += w.at(b);
        r2.values.set_value(k, acc);
      }
      rep.bianchi2.push_back(std::move(r2));
    }
    if (i >= 2) {
      std::vector<const ComponentArray*> wp;
      for (const auto& x : ws) wp.push_back(&x.w);
      const std::vector<Variance> base{V::lower, V::upper, V::lower, V::lower};
      for (int j = 2; j <= i; ++j) {
        const ComponentArray expect = commuted_derivative_expectation(wp, wp, base, j, i);
        rep.commuted.push_back({"commuted covariant derivative identity",
                                "i=" + std::to_string(i) + " slots " + pair_label("σ", j), curvature_slot_names(i),
                                commuted_residual(w, expect, static_cast<std::size_t>(4 + j - 2))});
      }
    }
  }
  for (const auto* g : {&rep.bianchi1, &rep.bianchi2, &rep.commuted})
    for (const auto& r : *g) rep.member = rep.member && r.zero();
  return rep;
}

RicciSubspaceReport check_ricci_subspace(const std::vector<CurvatureValue>& ws, const std::vector<ComponentArray>& vs,
                                         const IndexSignature& value_signature) {
  RicciSubspaceReport rep;
  rep.order = static_cast<int>(vs.size()) - 1;
  if (vs.empty()) throw std::invalid_argument("check_ricci_subspace: empty tensor list");
  const int m = vs[0].dim();
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i].dim() != m || vs[i].signature().variances() !=
                                value_signature.with_lower_slots(static_cast<int>(i), false).variances())
      throw std::invalid_argument("check_ricci_subspace: tensor list entry " + std::to_string(i) + " has the wrong shape");
  if (rep.order >= 2 && static_cast<int>(ws.size()) < rep.order - 1)
    throw std::invalid_argument("check_ricci_subspace: curvature list must reach order r-2");
  for (int i = 0; i < static_cast<int>(ws.size()); ++i) check_curvature_shape(ws[static_cast<std::size_t>(i)], i, m);
  std::vector<const ComponentArray*> wp, vp;
  for (const auto& x : ws) wp.push_back(&x.w);
  for (const auto& x : vs) vp.push_back(&x);
  const int b = value_signature.rank();
  std::vector<std::string> names;
  for (int a = 0; a < b; ++a) names.push_back("A" + std::to_string(a + 1));
  for (int q = 2; q <= rep.order; ++q) {
    auto qnames = names;
    for (int i = 1; i <= q; ++i) qnames.push_back("μ" + std::to_string(i));
    for (int s = 2; s <= q; ++s) {
      const ComponentArray expect = commuted_derivative_expectation(wp, vp, value_signature.variances(), s, q);
      rep.equations.push_back({"Ricci identity", "order " + std::to_string(q) + " slots " + pair_label("μ", s), qnames,
                               commuted_residual(vs[static_cast<std::size_t>(q)], expect, static_cast<std::size_t>(b + s - 2))});
    }
  }
  for (const auto& r : rep.equations) rep.member = rep.member && r.zero();
  return rep;
}

// Decomposition and reconstruction

Rational reconstruction_weight(int r) {
  const auto n = static_cast<std::int64_t>(r + 2) * (r + 1) / 2;
  return make_rational(1, n);
}

PhiDecomposition phi_decompose(const ConnectionJet& l) {
  if (!l.symmetric()) throw std::invalid_argument("phi_decompose: needs a symmetric connection jet");
  const int r = l.order();
  if (r < 1) throw std::invalid_argument("phi_decompose: order must be >= 1");
  std::vector<int> slots(static_cast<std::size_t>(r + 2));
  std::iota(slots.begin(), slots.end(), 1);
  ComponentArray top = restructure(symmetrize(l.part(r), slots), IndexSignature({V::upper}).with_lower_slots(r + 2, true));
  return {std::move(top), l.truncated(r - 1), curvature_differentials(l, r - 1, r - 1).front()};
}

ConnectionJet psi_reconstruct(const ComponentArray& sym_top, const ConnectionJet& lower, const CurvatureValue& w) {
  const int r = lower.order() + 1;
  const int m = lower.dim();
  if (!lower.symmetric()) throw std::invalid_argument("psi_reconstruct: lower jet must be symmetric");
  if (!(sym_top.signature() == IndexSignature({V::upper}).with_lower_slots(r + 2, true)) || sym_top.dim() != m)
    throw std::invalid_argument("psi_reconstruct: symmetric top part has the wrong shape");
  if (w.order != r - 1 || w.w.dim() != m || !(w.w.signature() == curvature_signature(r - 1)))
    throw std::invalid_argument("psi_reconstruct: curvature value has the wrong shape");
  // D = w − R_{r−1}(lower ⊕ 0): the part of ∇^{r−1}R linear in the top coordinates,
  // D_ν^ρ_{λμ,rest} = X^ρ_{λν,μ rest} − X^ρ_{μν,λ rest}.
  std::vector<ComponentArray> parts = lower.parts();
  parts.emplace_back(m, ConnectionJet::part_signature(r, true));
  const ConnectionJet padded(m, true, parts);
  const ComponentArray poly = curvature_differentials(padded, r - 1, r - 1).front().w;
  auto d = [&](int ro, int nu, int la, int mu, const std::vector<int>& rest) -> Rational {
    std::vector<int> idx{nu, ro, la, mu};
    idx.insert(idx.end(), rest.begin(), rest.end());
    return w.w.at(idx) - poly.at(idx);
  };
  const Rational weight = reconstruction_weight(r);
  ComponentArray top(m, ConnectionJet::part_signature(r, true));
  for (std::size_t k = 0; k < top.size(); ++k) {
    const auto& idx = top.representative(k);
    const int ro = idx[0], a = idx[1], b = idx[2];
    const std::vector<int> c(idx.begin() + 3, idx.end());
    Rational acc;
    for (int i = 0; i < r; ++i) {
      std::vector<int> rest_i = c;
      rest_i.erase(rest_i.begin() + i);
      const int ci = c[static_cast<std::size_t>(i)];
      // pairs {a, c_i} and {b, c_i}
      acc += d(ro, a, b, ci, rest_i) + d(ro, b, a, ci, rest_i);
      for (int j = i + 1; j < r; ++j) {
        // pair {c_i, c_j}: through X_{a c_i | b ...}
        std::vector<int> rest_ij = rest_i;
        rest_ij.erase(rest_ij.begin() + (j - 1));
        rest_ij.insert(rest_ij.begin(), b);
        acc += d(ro, a, b, ci, rest_i) + d(ro, ci, a, c[static_cast<std::size_t>(j)], rest_ij);
      }
    }
    top.set_value(k, sym_top.at(idx) + weight * acc);
  }
  parts.back() = std::move(top);
  return ConnectionJet(m, true, std::move(parts));
}

// Reduction data

ReductionData reduce_first(const ConnectionJet& l, int k) {
  if (!l.symmetric()) throw std::invalid_argument("reduce_first: needs a symmetric connection jet");
  const int r = l.order();
  if (k < 1 || k > r + 2)
    throw std::invalid_argument("reduce_first: need 1 <= k <= r + 2 (k=" + std::to_string(k) + ", r=" + std::to_string(r) + ")");
  ReductionData d;
  d.k = k;
  d.r = r;
  if (k >= 2) d.base = l.truncated(k - 2);
  d.curvature_from = std::max(k - 2, 0);
  if (r - 1 >= d.curvature_from) d.curvature = curvature_differentials(l, d.curvature_from, r - 1);
  return d;
}

ReductionData reduce_second(const ConnectionJet& l, const TensorJet& t, int k) {
  if (!l.symmetric()) throw std::invalid_argument("reduce_second: needs a symmetric connection jet");
  const int r = t.order();
  if (l.order() != r - 1)
    throw std::invalid_argument("reduce_second: connection jet order must be tensor jet order - 1");
  if (k < 1 || k > r + 1)
    throw std::invalid_argument("reduce_second: need 1 <= k <= r + 1 (k=" + std::to_string(k) + ", r=" + std::to_string(r) + ")");
  ReductionData d;
  d.k = k;
  d.r = r;
  if (k >= 2) d.base = l.truncated(k - 2);
  d.tensor = t.truncated(k - 1);
  d.curvature_from = std::max(k - 2, 0);
  if (r - 2 >= d.curvature_from) d.curvature = curvature_differentials(l, d.curvature_from, r - 2);
  d.tensor_from = k;
  if (r >= k) {
    auto all = covariant_differential(l, t, r);
    d.tensor_differentials.assign(all.begin() + (k - 1), all.end());
  }
  return d;
}

namespace {

ComponentArray act_on_value(const DiffeoJet& g1, const ComponentArray& v) {
  return act_on_tensor(g1, TensorJet(v.dim(), v.signature(), {v})).part(0);
}

}  // namespace

ReductionData act_on_reduction(const DiffeoJet& g, const ReductionData& d) {
  if (g.order() < std::max(d.k, 1)) throw std::invalid_argument("act_on_reduction: diffeomorphism jet order too low");
  ReductionData out = d;
  const DiffeoJet g1 = g.truncated(1);
  if (d.base) out.base = act_on_connection(g.truncated(d.base->order() + 2), *d.base);
  for (auto& w : out.curvature) w.w = act_on_value(g1, w.w);
  if (d.tensor) out.tensor = act_on_tensor(g.truncated(d.tensor->order() + 1), *d.tensor);
  for (auto& v : out.tensor_differentials) v = act_on_value(g1, v);
  return out;
}

RicciData ricci_data(const ReductionData& d) {
  if (!d.tensor) throw std::invalid_argument("ricci_data: needs second-reduction data");
  RicciData out;
  out.value_signature = d.tensor->value_signature();
  const int k = d.k;
  if (k >= 3) out.ws = curvature_differentials(*d.base, 0, k - 3);
  out.ws.insert(out.ws.end(), d.curvature.begin(), d.curvature.end());
  out.vs.push_back(d.tensor->part(0));
  if (k >= 2) {
    auto low = covariant_differential(*d.base, *d.tensor, k - 1);
    out.vs.insert(out.vs.end(), low.begin(), low.end());
  }
  out.vs.insert(out.vs.end(), d.tensor_differentials.begin(), d.tensor_differentials.end());
  return out;
}

}  // namespace natop
