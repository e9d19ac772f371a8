#pragma once

// Canonical storage for multi-indexed component arrays with declared slot
// symmetries. Index values are 0-based internally (1-based only in JSON and
// human-facing reports).

#include "natop/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace natop {

enum class Variance : std::uint8_t { upper, lower };

enum class Symmetry : std::uint8_t { symmetric, antisymmetric };

struct SlotGroup {
  Symmetry kind = Symmetry::symmetric;
  std::vector<int> slots;  // sorted, size >= 2

  friend bool operator==(const SlotGroup&, const SlotGroup&) = default;
};

/// A nondecreasing tuple of index values; the canonical form of an unordered
/// multiset of indices.
class SymIndex {
 public:
  SymIndex() = default;
  explicit SymIndex(std::vector<int> entries);

  [[nodiscard]] const std::vector<int>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  friend bool operator==(const SymIndex&, const SymIndex&) = default;
  friend auto operator<=>(const SymIndex&, const SymIndex&) = default;

 private:
  std::vector<int> entries_;
};

/// binomial(m + k - 1, k): number of canonical SymIndex values of length k
/// over m index values. Throws std::invalid_argument when m < 1 or k < 0.
std::size_t sym_index_count(int m, int k);

/// All SymIndex values of length k over 0..m-1 in lexicographic order.
std::vector<SymIndex> sym_indices(int m, int k);

/// Ordered slot variances plus disjoint symmetry groups.
class IndexSignature {
 public:
  IndexSignature() = default;
  explicit IndexSignature(std::vector<Variance> variances, std::vector<SlotGroup> groups = {});

  [[nodiscard]] int rank() const noexcept { return static_cast<int>(variances_.size()); }
  [[nodiscard]] Variance variance(int slot) const { return variances_.at(static_cast<std::size_t>(slot)); }
  [[nodiscard]] const std::vector<Variance>& variances() const noexcept { return variances_; }
  [[nodiscard]] const std::vector<SlotGroup>& groups() const noexcept { return groups_; }

  /// Signature with `count` extra lower slots appended; when `symmetric` and
  /// count >= 2 they form a new symmetric group.
  [[nodiscard]] IndexSignature with_lower_slots(int count, bool symmetric) const;
  /// Same variances, no symmetry groups.
  [[nodiscard]] IndexSignature without_groups() const;

  [[nodiscard]] std::string describe() const;

  friend bool operator==(const IndexSignature&, const IndexSignature&) = default;

 private:
  std::vector<Variance> variances_;
  std::vector<SlotGroup> groups_;
};

namespace detail {
struct Layout;
}

/// Dense table of Rational values, one per symmetry-class representative.
/// Canonical representatives are index tuples that are nondecreasing within
/// each symmetric group and strictly increasing within each antisymmetric
/// group, enumerated in lexicographic order.
class ComponentArray {
 public:
  ComponentArray();
  ComponentArray(int dim, IndexSignature signature);

  [[nodiscard]] int dim() const noexcept;
  [[nodiscard]] int rank() const noexcept;
  [[nodiscard]] const IndexSignature& signature() const noexcept;

  /// Number of stored representatives.
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const std::vector<int>& representative(std::size_t k) const;
  [[nodiscard]] const Rational& value(std::size_t k) const { return values_.at(k); }
  void set_value(std::size_t k, Rational v) { values_.at(k) = std::move(v); }

  /// Lookup with an arbitrary index tuple; permutations inside a declared
  /// group return the same value (up to sign for antisymmetric groups).
  [[nodiscard]] Rational at(std::span<const int> index) const;
  Rational at(std::initializer_list<int> index) const { return at(std::span<const int>(index.begin(), index.size())); }

  /// Sets the class of `index` so that at(index) == v afterwards. Throws
  /// std::invalid_argument if the class is forced to zero and v != 0.
  void set(std::span<const int> index, const Rational& v);
  void set(std::initializer_list<int> index, const Rational& v) { set(std::span<const int>(index.begin(), index.size()), v); }

  [[nodiscard]] bool is_zero() const;

  /// Number of full (unsymmetrized) index tuples, dim^rank.
  [[nodiscard]] std::size_t full_size() const noexcept;

  friend bool operator==(const ComponentArray& a, const ComponentArray& b);

 private:
  std::shared_ptr<const detail::Layout> layout_;
  std::vector<Rational> values_;
};

/// Visits every full index tuple of the given rank over 0..dim-1 in
/// lexicographic order.
void for_each_index(int dim, int rank, const std::function<void(std::span<const int>)>& fn);

/// Average over all permutations of `slots`. Requires identical variance.
ComponentArray symmetrize(const ComponentArray& t, std::vector<int> slots);

/// (T - T with the two slots swapped) / 2.
ComponentArray alternate(const ComponentArray& t, int slot_a, int slot_b);

/// Copy of `t` stored under a different signature with the same variances;
/// components are read through t.at, so any declared symmetry of the
/// target must already hold for the result to be faithful.
ComponentArray restructure(const ComponentArray& t, IndexSignature target);

}  // namespace natop
