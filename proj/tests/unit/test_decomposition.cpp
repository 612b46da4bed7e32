// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "hbmlab/decomposition.hpp"
#include "hbmlab/errors.hpp"
#include "hbmlab/synthdata.hpp"
#include "oracles.hpp"

using namespace hbmlab;
using doctest::Approx;

namespace {

FitConfig tight() {
  FitConfig fit;
  fit.max_iterations = 1000000;
  fit.eta_tolerance = 1e-10;
  fit.trace_interval = 1000000;
  return fit;
}

DenseDistribution product_of_marginals(const DenseDistribution& p) {
  const unsigned n = p.n();
  std::vector<double> out(p.size(), 1.0);
  for (unsigned i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::uint32_t x = 0; x < p.size(); ++x) mean += ((x >> i) & 1u) ? p[x] : 0.0;
    for (std::uint32_t x = 0; x < p.size(); ++x) out[x] *= ((x >> i) & 1u) ? mean : 1.0 - mean;
  }
  return DenseDistribution(n, out);
}

DenseDistribution fit_order(const EmpiricalDataset& data, unsigned k) {
  return exact_distribution(
      fit_mle(eta_from_p(empirical_distribution(data)), HbmModel(data.n(), k), tight(), {}, {}).model);
}

}  // namespace

TEST_SUITE("decomposition") {

TEST_CASE("saturated projection is the truth") {
  const auto p = generate_true_distribution(4, 1);
  const auto proj = project_true_hbm(p, 4, tight());
  CHECK(bias(p, proj) < 1e-12);
  CHECK(proj.method == ProjectionMethod::kExact);
  CHECK(proj.achieved_eta_gap < 1e-10);
}

TEST_CASE("order one projection is the product of marginals") {
  const auto product = product_of_marginals(generate_true_distribution(3, 2));
  CHECK(bias(product, project_true_hbm(product, 1, tight())) < 1e-12);

  const auto p = generate_true_distribution(4, 3);
  const auto proj = project_true_hbm(p, 1, tight());
  CHECK(bias(p, proj) == Approx(kl_divergence(p, product_of_marginals(p))).epsilon(1e-9));
}

TEST_CASE("bias is non-increasing in the order") {
  const auto p = generate_true_distribution(4, 4);
  double previous = HUGE_VAL;
  for (unsigned k = 1; k <= 4; ++k) {
    const double b = bias(p, project_true_hbm(p, k, tight()));
    CHECK(b <= previous + 1e-12);
    CHECK(b >= -1e-9);
    previous = b;
  }
  CHECK(previous < 1e-12);
}

TEST_CASE("projection needs a positive truth") {
  CHECK_THROWS_AS(project_true_hbm(DenseDistribution(2, {0.0, 0.5, 0.25, 0.25}), 1, tight()), Error);
}

TEST_CASE("variance estimate") {
  const auto p = generate_true_distribution(3, 5);
  const std::vector<DenseDistribution> same(3, p);
  const auto zero = variance_estimate(p, same);
  CHECK(zero.mean == 0.0);
  CHECK(zero.used == 3);

  // theta shifted by +d and -d on one singleton.
  const auto theta = theta_from_p(p);
  auto up = theta, down = theta;
  up.theta[1] += 0.2;
  down.theta[1] -= 0.2;
  const std::vector<DenseDistribution> pair = {p_from_theta(up).distribution, p_from_theta(down).distribution};
  const double a = kl_divergence(p, pair[0]), b = kl_divergence(p, pair[1]);
  CHECK(a > 0.0);
  CHECK(b > 0.0);
  CHECK(variance_estimate(p, pair).mean == Approx((a + b) / 2.0));
  CHECK(variance_estimate(p, pair).stderr_mean == Approx(std::abs(a - b) / 2.0));

  const std::vector<DenseDistribution> with_hole = {p, DenseDistribution(3, {0, 0.2, 0.1, 0.1, 0.1, 0.1, 0.2, 0.2})};
  const auto excluded = variance_estimate(p, with_hole);
  CHECK(excluded.used == 1);
  CHECK(excluded.excluded == 1);
  CHECK(excluded.errors.size() == 1);
  CHECK_THROWS_AS(variance_estimate(p, std::vector<DenseDistribution>{p}), Error);
}

TEST_CASE("pythagorean residual") {
  const auto p = generate_true_distribution(3, 6);
  const auto proj = project_true_hbm(p, 2, tight());
  CHECK(std::abs(pythagoras_check(p, proj.projected, proj.projected, 2)) < 1e-12);

  const auto data = draw_dataset(p, 200, 7);
  const auto fitted = fit_order(data, 2);
  CHECK(std::abs(pythagoras_check(p, proj.projected, fitted, 2)) < 1e-6);

  // Independent pairs on n=2: every product distribution lies in S(B) for k=1.
  const auto p2 = DenseDistribution(2, {0.1, 0.3, 0.2, 0.4});
  const auto prod = product_of_marginals(p2);
  const auto other = DenseDistribution(2, {0.6 * 0.3, 0.4 * 0.3, 0.6 * 0.7, 0.4 * 0.7});
  const double closed = kl_divergence(p2, other) - kl_divergence(p2, prod) - kl_divergence(prod, other);
  CHECK(std::abs(pythagoras_check(p2, prod, other, 1)) < 1e-9);
  CHECK(std::abs(closed) < 1e-9);

  try {
    pythagoras_check(p2, p2, other, 1);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kPrecondition);
  }
}

TEST_CASE("hbm decomposition rows") {
  const auto p = generate_true_distribution(3, 8);
  HbmDecompositionConfig cfg;
  cfg.orders = {1, 3};
  cfg.sample_sizes = {20, 200};
  cfg.replicates = 6;
  cfg.base_seed = 9;
  cfg.fit = tight();
  cfg.fit.max_iterations = 20000;
  cfg.fit.eta_tolerance = 1e-8;
  cfg.projection = tight();
  cfg.workers = 2;
  const auto rows = decompose_hbm(p, cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].complexity == 1);
  CHECK(rows[0].sample_size == 20);
  CHECK(rows[3].complexity == 3);
  CHECK(rows[3].param_count == 7);
  for (const auto& row : rows) {
    CHECK(row.status == "ok");
    CHECK(row.replicates_ok == 6);
    CHECK(row.seeds.size() == 6);
    CHECK(row.bias >= -1e-9);
    CHECK(row.variance >= -1e-9);
    CHECK(std::abs(row.pythagoras_residual) < 1e-6);
    CHECK(row.total - row.bias - row.variance == Approx(row.pythagoras_residual).epsilon(1e-6));
  }
  CHECK(rows[2].bias < 1e-12);
  CHECK(rows[3].total == Approx(rows[3].variance).epsilon(1e-6));

  cfg.workers = 1;
  const auto serial = decompose_hbm(p, cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(serial[i].variance == rows[i].variance);
    CHECK(serial[i].total == rows[i].total);
  }
}

TEST_CASE("variance shrinks with sample size") {
  const auto p = generate_true_distribution(4, 10);
  HbmDecompositionConfig cfg;
  cfg.orders = {2};
  cfg.sample_sizes = {50, 5000};
  cfg.replicates = 24;
  cfg.base_seed = 11;
  cfg.fit.max_iterations = 20000;
  cfg.projection = tight();
  const auto rows = decompose_hbm(p, cfg);
  CHECK(rows[1].variance < rows[0].variance);
}

TEST_CASE("rbm decomposition rows") {
  const auto p = generate_true_distribution(3, 12);
  RbmDecompositionConfig cfg;
  cfg.hidden_counts = {0, 2};
  cfg.sample_sizes = {50, 500};
  cfg.replicates = 4;
  cfg.base_seed = 13;
  cfg.cd.target_updates = 500;
  cfg.mle_sample_size = 20000;
  cfg.workers = 2;
  const auto result = decompose_rbm(p, cfg);
  REQUIRE(result.rows.size() == 4);
  REQUIRE(result.proxies.size() == 2);
  CHECK(result.rows[0].mode == "cd");
  CHECK(result.rows[2].param_count == 11);
  for (const auto& row : result.rows) CHECK(row.status == "ok");
  // With no hidden units the large-sample fit is close to the product of marginals.
  CHECK(result.proxies[0].bias == Approx(kl_divergence(p, product_of_marginals(p))).epsilon(0.05));
}

TEST_CASE("shared dataset seeds") {
  CHECK(dataset_seed(1, 10, 0) == dataset_seed(1, 10, 0));
  CHECK(dataset_seed(1, 10, 0) != dataset_seed(1, 30, 0));
  CHECK(dataset_seed(1, 10, 0) != dataset_seed(1, 10, 1));
}

}
