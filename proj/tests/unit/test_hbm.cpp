// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "hbmlab/errors.hpp"
#include "hbmlab/hbm.hpp"
#include "hbmlab/synthdata.hpp"
#include "hbmlab/verify.hpp"
#include "oracles.hpp"

using namespace hbmlab;
using doctest::Approx;

namespace {

double naive_log_z(const HbmModel& m) {
  double z = 0.0;
  for (std::uint32_t x = 0; x < (1u << m.n()); ++x) {
    double u = 0.0;
    for (const auto& s : m.index_set())
      if (oracle::subset(s.bits, x)) u += m.theta_of(s.bits);
    z += std::exp(u);
  }
  return std::log(z);
}

FitConfig tight() {
  FitConfig fit;
  fit.max_iterations = 1000000;
  fit.eta_tolerance = 1e-10;
  fit.trace_interval = 1000;
  return fit;
}

}  // namespace

TEST_SUITE("hbm") {

TEST_CASE("uniform model") {
  const HbmModel m(4, 2);
  CHECK(m.parameter_count() == 10);
  CHECK(m.normalized());
  CHECK(m.theta_bottom() == Approx(-4.0 * std::numbers::ln2));
  for (std::uint32_t x = 0; x < 16; ++x) CHECK(unnormalized_log_prob(m, Outcome(x, 4)) == 0.0);
  CHECK(exact_log_z(m) == Approx(4.0 * std::numbers::ln2));
  const auto eta = exact_eta(m);
  for (std::uint32_t x = 0; x < 16; ++x) CHECK(eta.eta[x] == Approx(std::ldexp(1.0, -std::popcount(x))));
  CHECK_THROWS_AS(HbmModel(21, 1), Error);
  CHECK_THROWS_AS(HbmModel(4, 5), Error);
}

TEST_CASE("theta is zero off the index set") {
  const auto m = random_hbm(5, 2, 3);
  for (std::uint32_t x = 1; x < 32; ++x)
    if (std::popcount(x) > 2) CHECK(m.theta_of(x) == 0.0);
}

TEST_CASE("unnormalized log probability") {
  HbmModel m(2, 2);
  const std::vector<double> theta = {0.3, -1.1, 2.5};  // {1}, {2}, {1,2}
  m.set_theta(theta);
  CHECK_FALSE(m.normalized());
  CHECK(unnormalized_log_prob(m, Outcome::of({1, 2}, 2)) == Approx(0.3 - 1.1 + 2.5));
  CHECK(unnormalized_log_prob(m, Outcome::of({2}, 2)) == Approx(-1.1));

  const auto r = random_hbm(4, 3, 9);
  const auto all = unnormalized_log_probs(r);
  for (std::uint32_t x = 0; x < 16; ++x) {
    double expected = 0.0;
    for (std::uint32_t s = 1; s < 16; ++s)
      if (oracle::subset(s, x)) expected += r.theta_of(s);
    CHECK(unnormalized_log_prob(r, Outcome(x, 4)) == Approx(expected).epsilon(1e-13));
    CHECK(all[x] == Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("exact log Z") {
  HbmModel one(1, 1);
  one.set_theta(std::vector<double>{std::log(3.0)});
  CHECK(exact_log_z(one) == Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(exact_eta(one).eta[1] == Approx(0.75).epsilon(1e-14));
  CHECK(gibbs_conditional(one, Outcome::bottom(1), 1) == Approx(0.75).epsilon(1e-14));

  const auto r = random_hbm(6, 3, 17);
  CHECK(std::exp(exact_log_z(r)) == Approx(std::exp(naive_log_z(r))).epsilon(1e-12));
}

TEST_CASE("exact eta agrees with the distribution module") {
  const auto r = random_hbm(5, 3, 4);
  const auto a = exact_eta(r);
  const auto b = eta_from_p(exact_distribution(r));
  CHECK(oracle::max_abs_diff(a.eta, b.eta) < 1e-14);
}

TEST_CASE("normalized flag means probabilities sum to one") {
  const auto r = random_hbm(4, 2, 8);
  REQUIRE(r.normalized());
  double total = 0.0;
  for (double lp : model_log_probs(r)) total += std::exp(lp);
  CHECK(total == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gibbs conditional") {
  HbmModel m(2, 2);
  for (std::uint32_t x = 0; x < 4; ++x) CHECK(gibbs_conditional(m, Outcome(x, 2), 1) == 0.5);
  const double c = 1.7;
  m.set_theta(std::vector<double>{0.0, 0.4, c});
  const double logistic_c = 1.0 / (1.0 + std::exp(-c));
  CHECK(gibbs_conditional(m, Outcome::of({2}, 2), 1) == Approx(logistic_c).epsilon(1e-14));
  CHECK(gibbs_conditional(m, Outcome::of({1, 2}, 2), 1) == Approx(logistic_c).epsilon(1e-14));
  CHECK(gibbs_conditional(m, Outcome::bottom(2), 1) == Approx(0.5));
}

TEST_CASE("gibbs sampling of the uniform model") {
  const HbmModel m(4, 4);
  GibbsConfig cfg;
  cfg.seed = 5;
  const auto samples = gibbs_sample(m, cfg);
  REQUIRE(samples.size() == 10000);
  for (unsigned i = 1; i <= 4; ++i) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.has(i);
    mean /= 10000.0;
    CHECK(mean >= 0.47);
    CHECK(mean <= 0.53);
  }
  CHECK(gibbs_sample(m, cfg) == samples);
  cfg.temperature = 2.0;
  CHECK_THROWS_AS(gibbs_sample(m, cfg), Error);
}

TEST_CASE("gibbs eta within four binomial sigma") {
  const auto m = random_hbm(4, 2, 31);
  GibbsConfig cfg;
  cfg.num_samples = 50000;
  cfg.seed = 77;
  const auto est = estimate_eta(gibbs_sample(m, cfg), 4);
  const auto exact = exact_eta(m);
  for (std::uint32_t x = 1; x < 16; ++x) {
    const double sigma = std::sqrt(exact.eta[x] * (1.0 - exact.eta[x]) / 50000.0);
    CHECK(std::abs(est.eta[x] - exact.eta[x]) <= 4.0 * sigma);
  }
}

TEST_CASE("estimate eta") {
  const std::vector<Outcome> top(5, Outcome(7, 3));
  for (double v : estimate_eta(top, 3).eta) CHECK(v == 1.0);
  const std::vector<Outcome> bottom(5, Outcome::bottom(3));
  const auto b = estimate_eta(bottom, 3);
  CHECK(b.eta[0] == 1.0);
  for (std::size_t x = 1; x < 8; ++x) CHECK(b.eta[x] == 0.0);
  const std::vector<Outcome> each = {Outcome(0, 2), Outcome(1, 2), Outcome(2, 2), Outcome(3, 2)};
  CHECK(estimate_eta(each, 2).eta[1] == 0.5);
  CHECK(estimate_eta(each, 2).eta[3] == 0.25);
  CHECK_THROWS_AS(estimate_eta(std::vector<Outcome>{}, 2), Error);
}

TEST_CASE("AIS on the uniform model is exact") {
  const HbmModel m(4, 2);
  AisConfig cfg;
  cfg.num_intermediate = 50;
  cfg.num_runs = 10;
  const auto r = ais_log_z(m, cfg);
  for (double w : r.log_weights) CHECK(w == 0.0);
  CHECK(r.log_z_estimate == 4.0 * std::numbers::ln2);
  CHECK(r.log_z0 == 4.0 * std::numbers::ln2);
}

TEST_CASE("AIS accuracy on a random model") {
  const auto m = random_hbm(4, 3, 12);
  AisConfig cfg;
  cfg.seed = 3;
  CHECK(std::abs(ais_log_z(m, cfg).log_z_estimate - exact_log_z(m)) <= 0.05);
  cfg.workers = 3;
  const double threaded = ais_log_z(m, cfg).log_z_estimate;
  cfg.workers = 1;
  CHECK(threaded == ais_log_z(m, cfg).log_z_estimate);
}

TEST_CASE("AIS schedule validation") {
  AisConfig cfg;
  cfg.num_intermediate = 2;
  cfg.schedule = {0.0, 0.7, 0.5};
  CHECK_THROWS_AS(ais_log_z(HbmModel(2, 1), cfg), Error);
  cfg.schedule = {0.0, 0.3, 1.0};
  CHECK_NOTHROW(ais_log_z(HbmModel(2, 1), cfg));
}

TEST_CASE("saturated fit reproduces the data") {
  const DenseDistribution p(4, oracle::random_probs(16, 40));
  const auto fit = fit_mle(eta_from_p(p), HbmModel(4, 4), tight(), {}, {});
  CHECK(fit.diagnostics.converged);
  CHECK(kl_divergence(p, exact_distribution(fit.model)) < 1e-8);
  CHECK(fit.trace.back().gradient_norm < 1e-6);
}

TEST_CASE("order one fit recovers a product distribution") {
  const double m1 = 0.2, m2 = 0.65, m3 = 0.9;
  std::vector<double> probs(8);
  for (std::uint32_t x = 0; x < 8; ++x)
    probs[x] = ((x & 1) ? m1 : 1 - m1) * ((x & 2) ? m2 : 1 - m2) * ((x & 4) ? m3 : 1 - m3);
  const DenseDistribution p(3, probs);
  const auto fit = fit_mle(eta_from_p(p), HbmModel(3, 1), tight(), {}, {});
  CHECK(kl_divergence(p, exact_distribution(fit.model)) < 1e-8);
}

TEST_CASE("order two fit matches moments on B") {
  const DenseDistribution p(4, oracle::random_probs(16, 41));
  FitConfig fit_cfg;
  fit_cfg.max_iterations = 200000;
  const auto target = eta_from_p(p);
  const auto fit = fit_mle(target, HbmModel(4, 2), fit_cfg, {}, {});
  const auto eta = exact_eta(fit.model);
  for (const auto& x : fit.model.index_set()) CHECK(std::abs(eta.eta[x.bits] - target.eta[x.bits]) < 1e-6);
  for (std::uint32_t x = 1; x < 16; ++x)
    if (std::popcount(x) > 2) CHECK(fit.model.theta_of(x) == 0.0);
  CHECK(fit.model.theta_bottom() == Approx(-exact_log_z(fit.model)).epsilon(1e-12));
}

TEST_CASE("log likelihood increases along an exact fit") {
  const auto data = draw_dataset(DenseDistribution(4, oracle::random_probs(16, 42)), 300, 9);
  FitConfig cfg;
  cfg.trace_interval = 5;
  cfg.max_iterations = 500;
  const auto fit = fit_mle(eta_from_p(empirical_distribution(data)), HbmModel(4, 2), cfg, {}, {});
  REQUIRE(fit.trace.size() > 10);
  for (std::size_t i = 1; i < fit.trace.size(); ++i)
    CHECK(fit.trace[i].mean_log_likelihood >= fit.trace[i - 1].mean_log_likelihood - 1e-12);
}

TEST_CASE("log likelihood identities") {
  const EmpiricalDataset data(3, {4, 0, 1, 2, 7, 3, 1, 2});
  const HbmModel uniform(3, 2);
  CHECK(log_likelihood(uniform, data, exact_log_z(uniform)) ==
        Approx(-20.0 * 3.0 * std::numbers::ln2));

  const EmpiricalDataset full(3, {4, 1, 1, 2, 7, 3, 1, 2});
  const auto p_hat = empirical_distribution(full);
  const auto fit = fit_mle(eta_from_p(p_hat), HbmModel(3, 3), tight(), {}, {});
  double entropy = 0.0;
  for (double v : p_hat.probs()) entropy -= v * std::log(v);
  CHECK(log_likelihood(fit.model, full, exact_log_z(fit.model)) ==
        Approx(-21.0 * entropy).epsilon(1e-8));
}

TEST_CASE("sampled mode reports AIS log Z near the exact value") {
  const DenseDistribution p(4, oracle::random_probs(16, 43));
  FitConfig cfg;
  cfg.mode = FitMode::kSampled;
  cfg.max_iterations = 40;
  cfg.trace_interval = 20;
  cfg.learning_rate = 0.5;
  GibbsConfig gibbs;
  gibbs.num_samples = 2000;
  gibbs.burn_in = 100;
  const auto fit = fit_mle(eta_from_p(p), HbmModel(4, 2), cfg, gibbs, AisConfig{});
  REQUIRE(fit.trace.size() == 3);
  for (const auto& row : fit.trace) {
    CHECK(row.log_z_sampled);
    CHECK(std::abs(row.log_z - row.exact_log_z) <= 0.05);
  }
  CHECK(fit.model.theta_bottom() == -fit.trace.back().log_z);
}

TEST_CASE("divergence raises with diagnostics") {
  std::vector<double> probs(16, 1.0 / 16.0);
  probs[0] += 0.002;
  probs[15] -= 0.002;
  FitConfig cfg;
  cfg.learning_rate = 1e4;
  cfg.trace_interval = 1;
  try {
    fit_mle(eta_from_p(DenseDistribution(4, probs)), HbmModel(4, 4), cfg, {}, {});
    FAIL("expected divergence");
  } catch (const FitDivergedError& e) {
    CHECK(e.kind() == ErrorKind::kNonConvergence);
    CHECK(e.diagnostics().initial_gradient_norm < 0.01);
    CHECK(e.diagnostics().final_gradient_norm > 100.0 * e.diagnostics().initial_gradient_norm);
    CHECK_FALSE(e.trace().empty());
  }
}

TEST_CASE("model file round trip") {
  const auto m = random_hbm(5, 3, 10);
  const auto path = (std::filesystem::temp_directory_path() / "hbmlab_test_model.hbm").string();
  save_hbm(path, m, {{"seed", "10"}});
  const auto loaded = load_hbm(path);
  CHECK(loaded.model.k() == 3);
  CHECK(loaded.model.normalized());
  CHECK(loaded.model.theta() == m.theta());
  CHECK(loaded.model.theta_bottom() == m.theta_bottom());
  CHECK(loaded.provenance.at("seed") == "10");
}

}
