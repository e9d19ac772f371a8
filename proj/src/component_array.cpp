#include "natop/component_array.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace natop {

SymIndex::SymIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
}

std::size_t sym_index_count(int m, int k) {
  if (m < 1) throw std::invalid_argument("sym_index_count: dimension must be >= 1");
  if (k < 0) throw std::invalid_argument("sym_index_count: length must be >= 0");
  // binomial(m + k - 1, k), computed incrementally to stay exact
  std::size_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<std::size_t>(m - 1 + i) / static_cast<std::size_t>(i);
  return result;
}

std::vector<SymIndex> sym_indices(int m, int k) {
  if (m < 1 || k < 0) throw std::invalid_argument("sym_indices: need m >= 1, k >= 0");
  std::vector<SymIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(k), 0);
  while (true) {
    out.emplace_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == m - 1) --pos;
    if (pos < 0) break;
    const int v = cur[static_cast<std::size_t>(pos)] + 1;
    for (int i = pos; i < k; ++i) cur[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

IndexSignature::IndexSignature(std::vector<Variance> variances, std::vector<SlotGroup> groups)
    : variances_(std::move(variances)), groups_(std::move(groups)) {
  std::vector<bool> used(variances_.size(), false);
  for (auto& g : groups_) {
    std::sort(g.slots.begin(), g.slots.end());
    if (g.slots.size() < 2) throw std::invalid_argument("slot group needs at least two slots");
    for (int s : g.slots) {
      if (s < 0 || s >= rank()) throw std::invalid_argument("slot group refers to a missing slot");
      if (used[static_cast<std::size_t>(s)]) throw std::invalid_argument("slot groups overlap");
      used[static_cast<std::size_t>(s)] = true;
      if (variances_[static_cast<std::size_t>(s)] != variances_[static_cast<std::size_t>(g.slots.front())])
        throw std::invalid_argument("slot group mixes variances");
    }
  }
  std::sort(groups_.begin(), groups_.end(),
            [](const SlotGroup& a, const SlotGroup& b) { return a.slots.front() < b.slots.front(); });
}

IndexSignature IndexSignature::with_lower_slots(int count, bool symmetric) const {
  auto v = variances_;
  auto g = groups_;
  const int first = rank();
  for (int i = 0; i < count; ++i) v.push_back(Variance::lower);
  if (symmetric && count >= 2) {
    SlotGroup grp{Symmetry::symmetric, {}};
    for (int i = 0; i < count; ++i) grp.slots.push_back(first + i);
    g.push_back(std::move(grp));
  }
  return IndexSignature(std::move(v), std::move(g));
}

IndexSignature IndexSignature::without_groups() const { return IndexSignature(variances_); }

std::string IndexSignature::describe() const {
  std::string s;
  for (auto v : variances_) s += v == Variance::upper ? 'u' : 'l';
  for (const auto& g : groups_) {
    s += g.kind == Symmetry::symmetric ? " sym(" : " alt(";
    for (std::size_t i = 0; i < g.slots.size(); ++i) s += (i ? "," : "") + std::to_string(g.slots[i]);
    s += ')';
  }
  return s;
}

namespace detail {

struct Layout {
  int dim = 0;
  IndexSignature sig;
  std::size_t full_size = 1;
  std::vector<std::int32_t> rep_of_full;  // -1: class forced to zero
  std::vector<std::int8_t> sign_of_full;
  std::vector<std::vector<int>> reps;
};

namespace {

// Returns sign (0 if forced zero) and writes the canonical tuple.
int canonicalize(const IndexSignature& sig, std::span<const int> idx, std::vector<int>& out) {
  out.assign(idx.begin(), idx.end());
  int sign = 1;
  std::vector<int> vals;
  for (const auto& g : sig.groups()) {
    vals.clear();
    for (int s : g.slots) vals.push_back(out[static_cast<std::size_t>(s)]);
    if (g.kind == Symmetry::antisymmetric) {
      // insertion sort counting transpositions
      for (std::size_t i = 1; i < vals.size(); ++i)
        for (std::size_t j = i; j > 0 && vals[j - 1] > vals[j]; --j) {
          std::swap(vals[j - 1], vals[j]);
          sign = -sign;
        }
      for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] == vals[i - 1]) return 0;
    } else {
      std::sort(vals.begin(), vals.end());
    }
    for (std::size_t i = 0; i < g.slots.size(); ++i) out[static_cast<std::size_t>(g.slots[i])] = vals[i];
  }
  return sign;
}

std::size_t linear_index(int dim, std::span<const int> idx) {
  std::size_t lin = 0;
  for (int v : idx) lin = lin * static_cast<std::size_t>(dim) + static_cast<std::size_t>(v);
  return lin;
}

std::shared_ptr<const Layout> build_layout(int dim, const IndexSignature& sig) {
  auto L = std::make_shared<Layout>();
  L->dim = dim;
  L->sig = sig;
  for (int i = 0; i < sig.rank(); ++i) L->full_size *= static_cast<std::size_t>(dim);
  L->rep_of_full.assign(L->full_size, -1);
  L->sign_of_full.assign(L->full_size, 0);
  std::vector<std::int32_t> rep_id(L->full_size, -1);
  std::vector<int> canon;
  for_each_index(dim, sig.rank(), [&](std::span<const int> idx) {
    const int s = canonicalize(sig, idx, canon);
    if (s != 0 && std::equal(canon.begin(), canon.end(), idx.begin())) {
      rep_id[linear_index(dim, idx)] = static_cast<std::int32_t>(L->reps.size());
      L->reps.push_back(canon);
    }
  });
  for_each_index(dim, sig.rank(), [&](std::span<const int> idx) {
    const int s = canonicalize(sig, idx, canon);
    const auto lin = linear_index(dim, idx);
    if (s == 0) return;
    L->rep_of_full[lin] = rep_id[linear_index(dim, canon)];
    L->sign_of_full[lin] = static_cast<std::int8_t>(s);
  });
  return L;
}

using LayoutKey = std::tuple<int, std::string>;

std::shared_ptr<const Layout> layout_for(int dim, const IndexSignature& sig) {
  static std::mutex mutex;
  static std::map<LayoutKey, std::shared_ptr<const Layout>> cache;
  LayoutKey key{dim, sig.describe()};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto L = build_layout(dim, sig);
  cache.emplace(std::move(key), L);
  return L;
}

}  // namespace
}  // namespace detail

void for_each_index(int dim, int rank, const std::function<void(std::span<const int>)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(rank), 0);
  if (dim <= 0) return;
  while (true) {
    fn(idx);
    int pos = rank - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == dim - 1) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++idx[static_cast<std::size_t>(pos)];
  }
}

ComponentArray::ComponentArray() : ComponentArray(1, IndexSignature{}) {}

ComponentArray::ComponentArray(int dim, IndexSignature signature) {
  if (dim < 1) throw std::invalid_argument("ComponentArray: dimension must be >= 1");
  layout_ = detail::layout_for(dim, signature);
  values_.assign(layout_->reps.size(), Rational(0));
}

int ComponentArray::dim() const noexcept { return layout_->dim; }
int ComponentArray::rank() const noexcept { return layout_->sig.rank(); }
const IndexSignature& ComponentArray::signature() const noexcept { return layout_->sig; }
std::size_t ComponentArray::full_size() const noexcept { return layout_->full_size; }

const std::vector<int>& ComponentArray::representative(std::size_t k) const { return layout_->reps.at(k); }

Rational ComponentArray::at(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != rank()) throw std::invalid_argument("ComponentArray::at: wrong index length");
  for (int v : index)
    if (v < 0 || v >= dim()) throw std::out_of_range("ComponentArray::at: index value out of range");
  const auto lin = detail::linear_index(dim(), index);
  const auto rep = layout_->rep_of_full[lin];
  if (rep < 0) return Rational(0);
  const auto& v = values_[static_cast<std::size_t>(rep)];
  return layout_->sign_of_full[lin] > 0 ? v : Rational(-v);
}

void ComponentArray::set(std::span<const int> index, const Rational& v) {
  if (static_cast<int>(index.size()) != rank()) throw std::invalid_argument("ComponentArray::set: wrong index length");
  for (int x : index)
    if (x < 0 || x >= dim()) throw std::out_of_range("ComponentArray::set: index value out of range");
  const auto lin = detail::linear_index(dim(), index);
  const auto rep = layout_->rep_of_full[lin];
  if (rep < 0) {
    if (!natop::is_zero(v)) throw std::invalid_argument("ComponentArray::set: component is forced to zero by antisymmetry");
    return;
  }
  values_[static_cast<std::size_t>(rep)] = layout_->sign_of_full[lin] > 0 ? v : Rational(-v);
}

bool ComponentArray::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const Rational& q) { return natop::is_zero(q); });
}

bool operator==(const ComponentArray& a, const ComponentArray& b) {
  return a.dim() == b.dim() && a.signature() == b.signature() && a.values_ == b.values_;
}

namespace {

// Removes the named slots from existing groups (dropping groups that shrink
// below two members) and adds a new group over them.
IndexSignature regroup(const IndexSignature& sig, const std::vector<int>& slots, Symmetry kind) {
  std::vector<SlotGroup> groups;
  for (const auto& g : sig.groups()) {
    SlotGroup kept{g.kind, {}};
    for (int s : g.slots)
      if (std::find(slots.begin(), slots.end(), s) == slots.end()) kept.slots.push_back(s);
    if (kept.slots.size() >= 2) groups.push_back(std::move(kept));
  }
  if (slots.size() >= 2) groups.push_back(SlotGroup{kind, slots});
  return IndexSignature(sig.variances(), std::move(groups));
}

void check_slots(const ComponentArray& t, const std::vector<int>& slots) {
  for (int s : slots)
    if (s < 0 || s >= t.rank()) throw std::invalid_argument("slot out of range");
  for (std::size_t i = 1; i < slots.size(); ++i) {
    if (t.signature().variance(slots[i]) != t.signature().variance(slots[0]))
      throw std::invalid_argument("slot variance mismatch");
    for (std::size_t j = 0; j < i; ++j)
      if (slots[i] == slots[j]) throw std::invalid_argument("repeated slot");
  }
}

}  // namespace

ComponentArray symmetrize(const ComponentArray& t, std::vector<int> slots) {
  check_slots(t, slots);
  std::sort(slots.begin(), slots.end());
  ComponentArray out(t.dim(), regroup(t.signature(), slots, Symmetry::symmetric));
  std::vector<int> perm(slots.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  const Rational weight(1, static_cast<unsigned long>(perms.size()));
  std::vector<int> idx;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& rep = out.representative(k);
    Rational acc(0);
    for (const auto& p : perms) {
      idx = rep;
      for (std::size_t i = 0; i < slots.size(); ++i) idx[static_cast<std::size_t>(slots[i])] = rep[static_cast<std::size_t>(slots[static_cast<std::size_t>(p[i])])];
      acc += t.at(idx);
    }
    out.set_value(k, acc * weight);
  }
  return out;
}

ComponentArray alternate(const ComponentArray& t, int slot_a, int slot_b) {
  std::vector<int> slots{std::min(slot_a, slot_b), std::max(slot_a, slot_b)};
  check_slots(t, slots);
  ComponentArray out(t.dim(), regroup(t.signature(), slots, Symmetry::antisymmetric));
  std::vector<int> idx;
  const Rational half(1, 2);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& rep = out.representative(k);
    idx = rep;
    std::swap(idx[static_cast<std::size_t>(slots[0])], idx[static_cast<std::size_t>(slots[1])]);
    out.set_value(k, (t.at(rep) - t.at(idx)) * half);
  }
  return out;
}

ComponentArray restructure(const ComponentArray& t, IndexSignature target) {
  if (target.variances() != t.signature().variances())
    throw std::invalid_argument("restructure: variance signature mismatch");
  ComponentArray out(t.dim(), std::move(target));
  for (std::size_t k = 0; k < out.size(); ++k) out.set_value(k, t.at(out.representative(k)));
  return out;
}

}  // namespace natop
