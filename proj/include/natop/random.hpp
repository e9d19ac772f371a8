#pragma once

// Reproducible random inputs. std::mt19937_64 output is mapped to ranges with
// plain modulo so that a seed yields the same values on every platform
// (std::uniform_int_distribution is implementation-defined).

#include "natop/component_array.hpp"
#include "natop/jets.hpp"

#include <cstdint>
#include <random>

namespace natop {

class RationalRng {
 public:
  explicit RationalRng(std::uint64_t seed, int bound = 9) : eng_(seed), bound_(bound) {}

  /// Integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  /// p/q with |p| <= bound, 1 <= q <= bound.
  Rational rational();
  /// Like rational(), but zero with probability about `zero_fraction`.
  Rational sparse_rational(double zero_fraction);

  void fill(ComponentArray& a);

 private:
  std::mt19937_64 eng_;
  int bound_;
};

/// Random jet whose linear part is an invertible rational matrix.
DiffeoJet random_diffeo(RationalRng& rng, int dim, int order);
/// Random element of the kernel: identity up to order `identity_below - 1`,
/// random coefficients from order `identity_below` up to `order`.
DiffeoJet random_kernel_diffeo(RationalRng& rng, int dim, int order, int identity_below);
ConnectionJet random_connection(RationalRng& rng, int dim, int order, bool symmetric);
TensorJet random_tensor(RationalRng& rng, int dim, const IndexSignature& value_signature, int order);
CotangentFibrePoint random_fibre_point(RationalRng& rng, int dim);

}  // namespace natop
