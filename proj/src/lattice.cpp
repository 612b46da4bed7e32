// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/lattice.hpp"

#include <algorithm>
#include <string>

#include "hbmlab/errors.hpp"

namespace hbmlab {

void check_variable_count(unsigned n) {
  if (n < 1 || n > kMaxVariables)
    fail(ErrorKind::kUsage, "variable count n=" + std::to_string(n) +
                                " outside [1, " + std::to_string(kMaxVariables) +
                                "] (dense 2^n cap)");
}

Outcome::Outcome(std::uint32_t bits, unsigned n) : bits(bits), n(n) {
  check_variable_count(n);
  if (n < 32 && (bits >> n) != 0)
    fail(ErrorKind::kUsage, "outcome mask " + std::to_string(bits) +
                                " does not fit in n=" + std::to_string(n));
}

Outcome Outcome::of(std::initializer_list<unsigned> variables, unsigned n) {
  std::uint32_t bits = 0;
  for (unsigned v : variables) {
    if (v < 1 || v > n)
      fail(ErrorKind::kUsage, "variable index " + std::to_string(v) +
                                  " outside [1, " + std::to_string(n) + "]");
    bits |= 1u << (v - 1);
  }
  return Outcome(bits, n);
}

Lattice::Lattice(unsigned n) : n_(n) { check_variable_count(n); }

namespace {

void check_same_n(const Outcome& a, const Outcome& b) {
  if (a.n != b.n)
    fail(ErrorKind::kUsage, "outcomes defined on different n (" +
                                std::to_string(a.n) + " vs " +
                                std::to_string(b.n) + ")");
}

}  // namespace

bool leq(const Outcome& s, const Outcome& x) {
  check_same_n(s, x);
  return (s.bits & x.bits) == s.bits;
}

int zeta(const Outcome& s, const Outcome& x) { return leq(s, x) ? 1 : 0; }

int mobius(const Outcome& s, const Outcome& x) {
  if (!leq(s, x)) return 0;
  return (std::popcount(x.bits ^ s.bits) & 1) ? -1 : 1;
}

bool canonical_less(std::uint32_t a, std::uint32_t b) noexcept {
  const int pa = std::popcount(a), pb = std::popcount(b);
  return pa != pb ? pa < pb : a < b;
}

std::vector<std::uint32_t> canonical_masks(unsigned n) {
  check_variable_count(n);
  std::vector<std::uint32_t> masks(std::size_t{1} << n);
  for (std::size_t i = 0; i < masks.size(); ++i)
    masks[i] = static_cast<std::uint32_t>(i);
  std::sort(masks.begin(), masks.end(), canonical_less);
  return masks;
}

std::vector<Outcome> model_index_set(unsigned n, unsigned k) {
  check_variable_count(n);
  if (k < 1 || k > n)
    fail(ErrorKind::kUsage, "interaction order k=" + std::to_string(k) +
                                " outside [1, n=" + std::to_string(n) + "]");
  std::vector<Outcome> out;
  out.reserve(model_index_set_size(n, k));
  for (std::uint32_t mask : canonical_masks(n)) {
    const unsigned order = std::popcount(mask);
    if (order == 0) continue;
    if (order > k) break;
    out.emplace_back(mask, n);
  }
  return out;
}

std::size_t model_index_set_size(unsigned n, unsigned k) {
  std::size_t total = 0, binom = 1;
  for (unsigned i = 1; i <= k && i <= n; ++i) {
    binom = binom * (n - i + 1) / i;
    total += binom;
  }
  return total;
}

unsigned variables_for_length(std::size_t length) {
  if (length < 2 || !std::has_single_bit(length))
    fail(ErrorKind::kUsage, "dense vector length " + std::to_string(length) +
                                " is not 2^n with n >= 1");
  const unsigned n = static_cast<unsigned>(std::countr_zero(length));
  check_variable_count(n);
  return n;
}

namespace {

// sign = +1 accumulates (zeta), sign = -1 differences (Möbius).
std::vector<double> subset_transform(std::span<const double> values,
                                     Direction direction, double sign) {
  const unsigned n = variables_for_length(values.size());
  std::vector<double> g(values.begin(), values.end());
  const std::size_t size = g.size();
  for (unsigned d = 0; d < n; ++d) {
    const std::size_t bit = std::size_t{1} << d;
    for (std::size_t x = 0; x < size; ++x) {
      if (!(x & bit)) continue;
      if (direction == Direction::kDown)
        g[x] += sign * g[x ^ bit];
      else
        g[x ^ bit] += sign * g[x];
    }
  }
  return g;
}

}  // namespace

std::vector<double> fast_zeta_transform(std::span<const double> values,
                                        Direction direction) {
  return subset_transform(values, direction, 1.0);
}

std::vector<double> fast_mobius_transform(std::span<const double> values,
                                          Direction direction) {
  return subset_transform(values, direction, -1.0);
}

}  // namespace hbmlab
