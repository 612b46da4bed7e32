// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "hbmlab/errors.hpp"
#include "hbmlab/synthdata.hpp"

using namespace hbmlab;

TEST_SUITE("synthdata") {

TEST_CASE("true distribution") {
  const auto p = generate_true_distribution(6, 1);
  double total = 0.0;
  for (double v : p.probs()) total += v;
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(p.strictly_positive());
  const auto again = generate_true_distribution(6, 1);
  CHECK(std::equal(p.probs().begin(), p.probs().end(), again.probs().begin()));
  const auto other = generate_true_distribution(6, 2);
  double tv = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) tv += std::abs(p[x] - other[x]);
  CHECK(tv > 0.0);
}

TEST_CASE("dataset draws") {
  const auto p = generate_true_distribution(3, 4);
  const auto one = draw_dataset(p, 1, 5);
  int nonzero = 0;
  for (auto c : one.counts()) {
    if (c != 0) {
      ++nonzero;
      CHECK(c == 1);
    }
  }
  CHECK(nonzero == 1);

  std::vector<double> spike(8, 1e-4 / 7.0);
  spike[5] = 1.0 - 1e-4;
  const auto peaked = draw_dataset(DenseDistribution(3, spike), 10000, 6);
  CHECK(peaked.counts()[5] >= 9990);

  const auto q = generate_true_distribution(4, 7);
  const auto big = draw_dataset(q, 1000000, 8);
  for (std::size_t x = 0; x < 16; ++x)
    CHECK(std::abs(static_cast<double>(big.counts()[x]) / 1e6 - q[x]) < 5e-3);
  const auto same = draw_dataset(q, 1000, 9);
  CHECK(std::equal(same.counts().begin(), same.counts().end(), draw_dataset(q, 1000, 9).counts().begin()));
}

TEST_CASE("replicate seeds") {
  CHECK(replicate_seed(3, "dataset", 0) == replicate_seed(3, "dataset", 0));
  CHECK(replicate_seed(3, "dataset", 0) != replicate_seed(3, "dataset", 1));
  CHECK(replicate_seed(3, "dataset", 2) != replicate_seed(3, "gibbs", 2));
  CHECK(replicate_seed(3, "dataset", 2) != replicate_seed(4, "dataset", 2));
}

TEST_CASE("grid validation") {
  ExperimentGrid grid;
  CHECK_NOTHROW(grid.validate());
  grid.sample_sizes = {50, 10};
  CHECK_THROWS_AS(grid.validate(), Error);
  grid.sample_sizes = {10, 50};
  grid.hbm_orders = {11};
  CHECK_THROWS_AS(grid.validate(), Error);
  CHECK(kDefaultSampleSizes.size() == 12);
  CHECK(kDefaultReplicates == 24);
}

}
