// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hbmlab {

/// Largest variable count accepted by any dense (2^n) structure.
inline constexpr unsigned kMaxVariables = 20;

/// Throws a usage error unless 1 <= n <= kMaxVariables.
void check_variable_count(unsigned n);

/// A subset of V = {1..n} stored as a bitmask: bit i-1 is set iff variable i
/// is 1. The same value is a state vector x in {0,1}^n and a node of the
/// Boolean lattice. The empty mask is the bottom element.
struct Outcome {
  std::uint32_t bits = 0;
  unsigned n = 0;

  Outcome() = default;
  Outcome(std::uint32_t bits, unsigned n);

  /// Builds an outcome from 1-based variable indices.
  static Outcome of(std::initializer_list<unsigned> variables, unsigned n);
  static Outcome bottom(unsigned n) { return Outcome(0, n); }

  unsigned order() const noexcept { return std::popcount(bits); }
  bool is_bottom() const noexcept { return bits == 0; }
  /// Variable i (1-based) is set.
  bool has(unsigned i) const noexcept { return (bits >> (i - 1)) & 1u; }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Boolean lattice 2^V ordered by inclusion, addressed densely by bitmask.
class Lattice {
 public:
  explicit Lattice(unsigned n);

  unsigned n() const noexcept { return n_; }
  std::size_t size() const noexcept { return std::size_t{1} << n_; }
  Outcome at(std::uint32_t bits) const { return Outcome(bits, n_); }
  Outcome top() const { return Outcome(static_cast<std::uint32_t>(size() - 1), n_); }

 private:
  unsigned n_;
};

/// s <= x in the inclusion order.
bool leq(const Outcome& s, const Outcome& x);
int zeta(const Outcome& s, const Outcome& x);
/// Möbius function of the Boolean lattice: (-1)^{|x|-|s|} if s <= x, else 0.
int mobius(const Outcome& s, const Outcome& x);

/// Canonical order: ascending popcount, ties by ascending mask value.
bool canonical_less(std::uint32_t a, std::uint32_t b) noexcept;

/// All 2^n masks in canonical order (bottom first, top last).
std::vector<std::uint32_t> canonical_masks(unsigned n);

/// B = { x != bottom : |x| <= k } in canonical order.
std::vector<Outcome> model_index_set(unsigned n, unsigned k);

/// |B| = sum_{i=1..k} C(n, i).
std::size_t model_index_set_size(unsigned n, unsigned k);

enum class Direction {
  kDown,  // g(x) = sum over s <= x
  kUp,    // g(x) = sum over s >= x
};

/// Subset-sum (zeta) transform in O(n 2^n). values.size() must be a power of
/// two 2^n with 1 <= n <= kMaxVariables.
std::vector<double> fast_zeta_transform(std::span<const double> values,
                                        Direction direction);

/// Inverse of fast_zeta_transform for the same direction.
std::vector<double> fast_mobius_transform(std::span<const double> values,
                                          Direction direction);

/// Infers n from a dense vector length; throws on non powers of two.
unsigned variables_for_length(std::size_t length);

}  // namespace hbmlab
