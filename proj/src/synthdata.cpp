// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/synthdata.hpp"

#include <algorithm>

#include "hbmlab/errors.hpp"
#include "hbmlab/lattice.hpp"
#include "hbmlab/random.hpp"

namespace hbmlab {

void ExperimentGrid::validate() const {
  check_variable_count(n);
  require(!sample_sizes.empty(), "sample_sizes must not be empty");
  require(std::is_sorted(sample_sizes.begin(), sample_sizes.end()) &&
              std::adjacent_find(sample_sizes.begin(), sample_sizes.end()) ==
                  sample_sizes.end(),
          "sample_sizes must be strictly ascending");
  require(sample_sizes.front() >= 1, "sample sizes must be >= 1");
  require(replicates >= 1, "replicates must be >= 1");
  for (unsigned k : hbm_orders)
    require(k >= 1 && k <= n, "HBM order " + std::to_string(k) + " outside [1, n]");
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::string_view role,
                             std::uint64_t index) {
  return derive_seed(base_seed, role, index);
}

DenseDistribution generate_true_distribution(unsigned n, std::uint64_t seed) {
  check_variable_count(n);
  Rng rng(seed);
  std::vector<double> draws(std::size_t{1} << n);
  double sum = 0.0;
  for (double& d : draws) {
    d = rng.uniform();
    if (d == 0.0) d = 0x1.0p-53;
    sum += d;
  }
  for (double& d : draws) d /= sum;
  // Division leaves the sum within a few ulps of one.
  return DenseDistribution(n, std::move(draws));
}

EmpiricalDataset draw_dataset(const DenseDistribution& p, std::uint64_t sample_size,
                              std::uint64_t seed) {
  require(sample_size >= 1, "sample size N must be >= 1");
  std::vector<double> cdf(p.size());
  double running = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    running += p[x];
    cdf[x] = running;
  }
  // Draws landing beyond the rounded total fall into the last outcome with
  // positive probability.
  std::size_t last = p.size() - 1;
  while (last > 0 && p[last] == 0.0) --last;

  Rng rng(seed);
  std::vector<std::uint64_t> counts(p.size(), 0);
  for (std::uint64_t draw = 0; draw < sample_size; ++draw) {
    const double u = rng.uniform() * running;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t x = static_cast<std::size_t>(it - cdf.begin());
    if (x > last) x = last;
    ++counts[x];
  }
  return EmpiricalDataset(p.n(), std::move(counts));
}

}  // namespace hbmlab
