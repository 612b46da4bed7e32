// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

#include "hbmlab/distribution.hpp"
#include "hbmlab/errors.hpp"
#include "oracles.hpp"

using namespace hbmlab;
using doctest::Approx;

namespace {

// p(empty)=0.1, p({2})=0.2, p({1})=0.3, p({1,2})=0.4; bit 0 is variable 1.
DenseDistribution four_point() { return DenseDistribution(2, {0.1, 0.3, 0.2, 0.4}); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kUsage;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hbmlab_test_" + name)).string();
}

}  // namespace

TEST_SUITE("distribution") {

TEST_CASE("dense distribution validation") {
  CHECK(four_point().strictly_positive());
  CHECK_FALSE(DenseDistribution(1, {0.0, 1.0}).strictly_positive());
  CHECK_THROWS_AS(DenseDistribution(1, {-0.1, 1.1}), Error);
  CHECK_THROWS_AS(DenseDistribution(1, {0.5, 0.6}), Error);
  CHECK_THROWS_AS(DenseDistribution(2, {0.5, 0.5}), Error);
  CHECK_NOTHROW(DenseDistribution(1, {0.5, 0.5 + 5e-10}));
}

TEST_CASE("theta of the uniform distribution") {
  const auto t = theta_from_p(DenseDistribution::uniform(2));
  CHECK(t.theta[0] == Approx(-2.0 * std::numbers::ln2));
  for (std::size_t x = 1; x < 4; ++x) CHECK(std::abs(t.theta[x]) < 1e-15);
}

TEST_CASE("theta of the four point example") {
  const auto t = theta_from_p(four_point());
  CHECK(t.theta[1] == Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(t.theta[2] == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(t.theta[3] == Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
  CHECK(t.theta[0] == Approx(std::log(0.1)).epsilon(1e-12));
  const auto back = p_from_theta(t).distribution;
  for (std::size_t x = 0; x < 4; ++x) CHECK(back[x] == Approx(four_point()[x]).epsilon(1e-12));
  CHECK(t.is_normalized());
}

TEST_CASE("theta round trip on random normalized theta") {
  const auto p = DenseDistribution(5, oracle::random_probs(32, 21));
  const auto theta = theta_from_p(p);
  const auto again = theta_from_p(p_from_theta(theta).distribution);
  CHECK(oracle::max_abs_diff(again.theta, theta.theta) < 1e-9);
}

TEST_CASE("p from theta") {
  std::vector<double> theta(8, 0.0);
  theta[0] = -3.0 * std::numbers::ln2;
  const auto r = p_from_theta({3, theta});
  for (double v : r.distribution.probs()) CHECK(v == Approx(0.125));
  CHECK(std::abs(r.log_correction) < 1e-15);

  const auto single = p_from_theta({1, {0.0, std::log(3.0)}});
  CHECK(single.distribution[1] == Approx(0.75).epsilon(1e-14));
  CHECK(single.log_correction == Approx(std::log(4.0)));

  const double inf = std::numeric_limits<double>::infinity();
  CHECK(kind_of([&] { p_from_theta({1, {0.0, inf}}); }) == ErrorKind::kNumericRange);
  CHECK(kind_of([&] { p_from_theta({2, {0.0, 1e308, 1e308, 0.0}}); }) == ErrorKind::kNumericRange);
}

TEST_CASE("theta needs a strictly positive distribution") {
  CHECK(kind_of([] { theta_from_p(DenseDistribution(1, {0.0, 1.0})); }) == ErrorKind::kDomain);
}

TEST_CASE("eta coordinates") {
  const auto e = eta_from_p(four_point());
  CHECK(e.eta[0] == Approx(1.0));
  CHECK(e.eta[1] == Approx(0.7));
  CHECK(e.eta[2] == Approx(0.6));
  CHECK(e.eta[3] == Approx(0.4));
  const auto p = p_from_eta(e);
  for (std::size_t x = 0; x < 4; ++x) CHECK(p[x] == Approx(four_point()[x]).epsilon(1e-12));

  const auto u = eta_from_p(DenseDistribution::uniform(3));
  for (std::uint32_t x = 0; x < 8; ++x) CHECK(u.eta[x] == Approx(std::ldexp(1.0, -std::popcount(x))));
  const auto back = p_from_eta(u);
  for (double v : back.probs()) CHECK(v == Approx(0.125));
}

TEST_CASE("eta is monotone and eta(bottom) is one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = eta_from_p(DenseDistribution(4, oracle::random_probs(16, seed)));
    CHECK(e.eta[0] == Approx(1.0).epsilon(1e-15));
    for (std::uint32_t s = 0; s < 16; ++s)
      for (std::uint32_t x = 0; x < 16; ++x)
        if (oracle::subset(s, x)) {
          CHECK(e.eta[x] <= e.eta[s] + 1e-15);
          CHECK(e.eta[x] >= 0.0);
        }
  }
}

TEST_CASE("eta round trip on 100 random distributions") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto probs = oracle::random_probs(64, 1000 + seed);
    const auto back = p_from_eta(eta_from_p(DenseDistribution(6, probs)));
    worst = std::max(worst, oracle::max_abs_diff({back.probs().begin(), back.probs().end()}, probs));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("inconsistent eta") {
  // eta({1}) + eta({2}) - eta({1,2}) > 1 gives p(empty) < 0.
  CHECK(kind_of([] { p_from_eta({2, {1.0, 0.9, 0.9, 0.5}}); }) == ErrorKind::kInconsistentEta);
  CHECK(kind_of([] { p_from_eta({1, {0.9, 0.5}}); }) == ErrorKind::kUsage);
}

TEST_CASE("kl divergence") {
  const auto p = four_point();
  CHECK(kl_divergence(p, p) == 0.0);
  double expected = 0.0;
  for (double q : {0.1, 0.2, 0.3, 0.4}) expected += 0.25 * std::log(0.25 / q);
  CHECK(kl_divergence(DenseDistribution::uniform(2), p) == Approx(expected).epsilon(1e-14));
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const DenseDistribution a(5, oracle::random_probs(32, 2 * seed));
    const DenseDistribution b(5, oracle::random_probs(32, 2 * seed + 1));
    CHECK(kl_divergence(a, b) >= 0.0);
  }
  CHECK(kind_of([&] { kl_divergence(p, DenseDistribution(2, {0.0, 0.5, 0.25, 0.25})); }) ==
        ErrorKind::kDivergenceUndefined);
  CHECK(kl_divergence(DenseDistribution(1, {0.0, 1.0}), DenseDistribution(1, {0.5, 0.5})) ==
        Approx(std::log(2.0)));
}

TEST_CASE("kl divergence in log space") {
  const auto p = four_point();
  const std::vector<double> log_q = {std::log(0.25), std::log(0.25), std::log(0.25), std::log(0.25)};
  CHECK(kl_divergence_log(p, log_q) == Approx(kl_divergence(p, DenseDistribution::uniform(2))));
}

TEST_CASE("empirical distribution") {
  const auto uniform = empirical_distribution(EmpiricalDataset(2, {1, 1, 1, 1}));
  for (double v : uniform.probs()) CHECK(v == 0.25);
  const auto degenerate = empirical_distribution(EmpiricalDataset(1, {0, 10}));
  CHECK(degenerate[0] == 0.0);
  CHECK(degenerate[1] == 1.0);
  CHECK_FALSE(degenerate.strictly_positive());
  const auto prop = empirical_distribution(EmpiricalDataset(2, {10, 20, 30, 40}));
  CHECK(prop[0] == Approx(0.1));
  CHECK(prop[3] == Approx(0.4));
  CHECK(kind_of([] { EmpiricalDataset(2, {0, 0, 0, 0}); }) == ErrorKind::kUsage);
  CHECK_THROWS_AS(EmpiricalDataset(2, {1, 2, 3}), Error);
}

TEST_CASE("log sum exp") {
  const std::vector<double> v = {1000.0, 1000.0};
  CHECK(log_sum_exp(v) == Approx(1000.0 + std::numbers::ln2));
}

TEST_CASE("distribution files round trip") {
  const auto path = temp_path("dist.dist");
  const DenseDistribution p(3, oracle::random_probs(8, 5));
  save_distribution(path, p, {{"seed", "42"}});
  const auto loaded = load_distribution(path);
  CHECK(loaded.provenance.at("seed") == "42");
  for (std::size_t x = 0; x < 8; ++x) CHECK(loaded.distribution[x] == p[x]);

  const auto counts_path = temp_path("data.counts");
  const EmpiricalDataset data(2, {3, 0, 5, 2});
  save_dataset(counts_path, data, {{"replicate", "7"}});
  const auto d = load_dataset(counts_path);
  CHECK(d.dataset.total() == 10);
  CHECK(d.dataset.counts()[2] == 5);
  CHECK(d.provenance.at("replicate") == "7");

  CHECK_THROWS_AS(load_distribution(counts_path), Error);
  CHECK_THROWS_AS(load_dataset(path), Error);
  CHECK_THROWS_AS(load_dataset(temp_path("missing.counts")), Error);
}

}
