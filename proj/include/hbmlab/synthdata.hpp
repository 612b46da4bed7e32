// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hbmlab/distribution.hpp"

namespace hbmlab {

/// Default sample-size grid.
inline const std::vector<std::uint64_t> kDefaultSampleSizes = {
    10, 30, 50, 100, 300, 500, 1000, 3000, 5000, 10000, 30000, 50000};
inline constexpr std::size_t kDefaultReplicates = 24;

struct ExperimentGrid {
  unsigned n = 10;
  std::vector<std::uint64_t> sample_sizes = kDefaultSampleSizes;
  std::size_t replicates = kDefaultReplicates;
  std::uint64_t base_seed = 0;
  std::vector<unsigned> hbm_orders = {1, 4, 7, 10};
  std::vector<unsigned> rbm_hidden = {0, 5, 10, 15};

  void validate() const;
};

/// Stable per-role seed; see derive_seed() in random.hpp for the algorithm.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::string_view role,
                             std::uint64_t index);

/// 2^n independent U[0,1) draws normalized to sum to one. A draw of exactly
/// zero is replaced by 2^-53, the smallest nonzero value of the draw grid.
DenseDistribution generate_true_distribution(unsigned n, std::uint64_t seed);

/// Multinomial(N, p) counts by inverse-CDF sampling of N categorical draws.
EmpiricalDataset draw_dataset(const DenseDistribution& p, std::uint64_t sample_size,
                              std::uint64_t seed);

}  // namespace hbmlab
