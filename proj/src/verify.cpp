// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "hbmlab/decomposition.hpp"
#include "hbmlab/distribution.hpp"
#include "hbmlab/random.hpp"
#include "hbmlab/synthdata.hpp"

namespace hbmlab {

HbmModel random_hbm(unsigned n, unsigned k, std::uint64_t seed, double scale) {
  HbmModel m(n, k);
  Rng rng(seed);
  std::vector<double> theta(m.parameter_count());
  for (double& t : theta) t = scale * (2.0 * rng.uniform() - 1.0);
  m.set_theta(theta);
  m.set_theta_bottom(-exact_log_z(m), true);
  return m;
}

DenseDistribution random_positive_distribution(unsigned n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> p(std::size_t{1} << n);
  double sum = 0.0;
  for (double& v : p) sum += v = 0.05 + 0.95 * rng.uniform();
  for (double& v : p) v /= sum;
  return DenseDistribution(n, std::move(p));
}

namespace {

using MobiusFn = std::function<int(const Outcome&, const Outcome&)>;

CheckResult make(std::string name, double measured, double threshold, bool passed,
                 std::string detail = {}) {
  return {std::move(name), passed, measured, threshold, std::move(detail)};
}

// mu(x, x) = 1, mu(s, x) = -sum_{s <= t < x} mu(s, t).
std::map<std::pair<std::uint32_t, std::uint32_t>, int> recursive_mobius(unsigned n) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> mu;
  const auto order = canonical_masks(n);
  for (std::uint32_t s : order)
    for (std::uint32_t x : order) {
      if ((s & x) != s) continue;
      if (s == x) {
        mu[{s, x}] = 1;
        continue;
      }
      int sum = 0;
      for (std::uint32_t t = x;; t = (t - 1) & x) {
        if ((s & t) == s && t != x) sum += mu.at({s, t});
        if (t == 0) break;
      }
      mu[{s, x}] = -sum;
    }
  return mu;
}

CheckResult check_mobius_closed_form(const MobiusFn& mobius_fn) {
  std::size_t mismatches = 0, pairs = 0;
  for (unsigned n = 1; n <= 5; ++n)
    for (const auto& [key, value] : recursive_mobius(n)) {
      ++pairs;
      if (mobius_fn(Outcome(key.first, n), Outcome(key.second, n)) != value) ++mismatches;
    }
  return make("mobius_closed_form_vs_recursion", static_cast<double>(mismatches), 0.0,
              mismatches == 0,
              std::to_string(pairs) + " comparable pairs for n=1..5");
}

std::vector<double> naive_transform(std::span<const double> f, unsigned n, bool up,
                                    const MobiusFn* mobius_fn) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> out(size, 0.0);
  for (std::uint32_t x = 0; x < size; ++x)
    for (std::uint32_t s = 0; s < size; ++s) {
      const bool related = up ? (x & s) == x : (s & x) == s;
      if (!related) continue;
      const double w = mobius_fn == nullptr
                           ? 1.0
                           : up ? (*mobius_fn)(Outcome(x, n), Outcome(s, n))
                                : (*mobius_fn)(Outcome(s, n), Outcome(x, n));
      out[x] += w * f[s];
    }
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

CheckResult check_fast_transforms(std::uint64_t seed) {
  double worst = 0.0;
  for (unsigned n = 1; n <= 8; ++n) {
    Rng rng(derive_seed(seed, "verify-transform", n));
    std::vector<double> f(std::size_t{1} << n);
    for (double& v : f) v = 2.0 * rng.uniform() - 1.0;
    const MobiusFn mu = hbmlab::mobius;
    for (Direction dir : {Direction::kDown, Direction::kUp}) {
      const bool up = dir == Direction::kUp;
      worst = std::max(worst, max_abs_diff(fast_zeta_transform(f, dir),
                                           naive_transform(f, n, up, nullptr)));
      worst = std::max(worst, max_abs_diff(fast_mobius_transform(f, dir),
                                           naive_transform(f, n, up, &mu)));
    }
  }
  constexpr double kTol = 1e-9;
  return make("fast_transforms_vs_naive", worst, kTol, worst < kTol, "n=1..8, both directions");
}

CheckResult check_theta_round_trip(const MobiusFn& mobius_fn, std::uint64_t seed) {
  double worst = 0.0;
  for (unsigned n = 2; n <= 6; ++n)
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto p = random_positive_distribution(n, derive_seed(seed, "verify-theta", n * 100 + i));
      std::vector<double> log_p(p.size());
      for (std::size_t x = 0; x < p.size(); ++x) log_p[x] = std::log(p[x]);
      const auto naive = naive_transform(log_p, n, false, &mobius_fn);
      const auto library = theta_from_p(p);
      worst = std::max(worst, max_abs_diff(naive, library.theta));
      const auto back = p_from_theta({n, naive}).distribution;
      worst = std::max(worst, max_abs_diff(back.probs(), p.probs()));
    }
  constexpr double kTol = 1e-9;
  return make("theta_round_trip", worst, kTol, worst < kTol,
              "p -> theta -> p, 10 distributions per n=2..6");
}

CheckResult check_eta_round_trip(const MobiusFn& mobius_fn, std::uint64_t seed) {
  double worst = 0.0;
  for (unsigned n = 2; n <= 6; ++n)
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto p = random_positive_distribution(n, derive_seed(seed, "verify-eta", n * 100 + i));
      const auto eta = eta_from_p(p);
      const auto naive = naive_transform(eta.eta, n, true, &mobius_fn);
      worst = std::max(worst, max_abs_diff(naive, p.probs()));
      worst = std::max(worst, max_abs_diff(p_from_eta(eta).probs(), p.probs()));
    }
  constexpr double kTol = 1e-9;
  return make("eta_round_trip", worst, kTol, worst < kTol,
              "p -> eta -> p, 10 distributions per n=2..6");
}

CheckResult check_gradient(std::uint64_t seed) {
  constexpr unsigned n = 4, k = 2;
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    auto model = random_hbm(n, k, derive_seed(seed, "verify-grad-model", i));
    const auto data = draw_dataset(random_positive_distribution(n, derive_seed(seed, "verify-grad-p", i)),
                                   200, derive_seed(seed, "verify-grad-data", i));
    const double total = static_cast<double>(data.total());
    const auto eta_hat = eta_from_p(empirical_distribution(data));
    const auto eta_b = exact_eta(model);
    for (std::size_t pos = 0; pos < model.parameter_count(); ++pos) {
      const double base = model.theta_at(pos);
      auto ll = [&](double value) {
        HbmModel probe = model;
        probe.set_theta_at(pos, value);
        return log_likelihood(probe, data, exact_log_z(probe)) / total;
      };
      const double fd = (ll(base + h) - ll(base - h)) / (2.0 * h);
      const std::uint32_t bits = model.index_set()[pos].bits;
      worst = std::max(worst, std::abs(fd - (eta_hat.eta[bits] - eta_b.eta[bits])));
    }
  }
  constexpr double kTol = 1e-4;
  return make("gradient_finite_difference", worst, kTol, worst < kTol,
              "n=4, k=2, 5 instances, central difference h=1e-5");
}

double stationarity_error(const HbmModel& m) {
  const auto p = exact_distribution(m);
  const unsigned n = m.n();
  double worst = 0.0;
  for (unsigned i = 1; i <= n; ++i) {
    const std::uint32_t bit = 1u << (i - 1);
    std::vector<double> moved(p.size(), 0.0);
    for (std::uint32_t x = 0; x < p.size(); ++x) {
      const double on = gibbs_conditional(m, Outcome(x, n), i);
      moved[x | bit] += p[x] * on;
      moved[x & ~bit] += p[x] * (1.0 - on);
    }
    worst = std::max(worst, max_abs_diff(moved, p.probs()));
  }
  return worst;
}

CheckResult check_gibbs_stationarity(std::uint64_t seed) {
  double worst = 0.0;
  for (unsigned n = 2; n <= 4; ++n)
    for (unsigned k = 1; k <= n; ++k)
      worst = std::max(worst, stationarity_error(random_hbm(n, k, derive_seed(seed, "verify-stationary", n * 10 + k))));
  constexpr double kTol = 1e-12;
  return make("gibbs_kernel_stationarity", worst, kTol, worst < kTol,
              "max over i of |P T_i - P|, n=2..4, every k");
}

CheckResult check_gibbs_eta(std::uint64_t seed) {
  constexpr unsigned n = 4;
  std::size_t within = 0, total = 0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto m = random_hbm(n, 2, derive_seed(seed, "verify-gibbs-model", i));
    GibbsConfig cfg;
    cfg.seed = derive_seed(seed, "verify-gibbs-chain", i);
    const auto samples = gibbs_sample(m, cfg);
    const auto estimate = estimate_eta(samples, n);
    const auto exact = exact_eta(m);
    const double count = static_cast<double>(samples.size());
    for (std::size_t x = 1; x < exact.eta.size(); ++x) {
      const double e = exact.eta[x];
      const double sigma = std::sqrt(e * (1.0 - e) / count);
      ++total;
      if (std::abs(estimate.eta[x] - e) <= 4.0 * sigma) ++within;
    }
  }
  const double fraction = static_cast<double>(within) / static_cast<double>(total);
  return make("gibbs_eta_within_4_sigma", fraction, 0.95, fraction >= 0.95,
              "n=4, k=2, M=10000, 5 models; fraction of coordinates");
}

CheckResult check_ais(std::uint64_t seed, unsigned workers) {
  const auto m = random_hbm(4, 2, derive_seed(seed, "verify-ais-model", 0));
  AisConfig cfg;
  cfg.seed = derive_seed(seed, "verify-ais-runs", 0);
  cfg.workers = workers;
  const double delta = std::abs(ais_log_z(m, cfg).log_z_estimate - exact_log_z(m));
  constexpr double kTol = 0.05;
  return make("ais_log_z_abs_error", delta, kTol, delta <= kTol,
              "n=4, k=2, K=1000, M=100");
}

FitConfig tight_fit() {
  FitConfig fit;
  fit.learning_rate = 0.1;
  fit.max_iterations = 1000000;
  fit.eta_tolerance = 1e-10;
  fit.trace_interval = 1000000;
  return fit;
}

CheckResult check_pythagoras(std::uint64_t seed) {
  constexpr unsigned n = 4;
  double worst = 0.0;
  for (unsigned k = 1; k <= 3; ++k) {
    const auto p_star = random_positive_distribution(n, derive_seed(seed, "verify-pyth-p", k));
    const auto data = draw_dataset(p_star, 1000, derive_seed(seed, "verify-pyth-data", k));
    const auto projection = project_true_hbm(p_star, k, tight_fit());
    const auto fitted = fit_mle(eta_from_p(empirical_distribution(data)), HbmModel(n, k),
                                tight_fit(), {}, {});
    const auto p_hat_b = exact_distribution(fitted.model);
    worst = std::max(worst, std::abs(pythagoras_check(p_star, projection.projected, p_hat_b, k)));
  }
  constexpr double kTol = 1e-6;
  return make("pythagoras_residual", worst, kTol, worst < kTol, "n=4, k=1..3, N=1000");
}

CheckResult check_saturated(std::uint64_t seed) {
  constexpr unsigned n = 4;
  const auto data = draw_dataset(random_positive_distribution(n, derive_seed(seed, "verify-sat-p", 0)),
                                 5000, derive_seed(seed, "verify-sat-data", 0));
  const auto empirical = empirical_distribution(data);
  const auto fitted = fit_mle(eta_from_p(empirical), HbmModel(n, n), tight_fit(), {}, {});
  const double kl = kl_divergence(empirical, exact_distribution(fitted.model));
  constexpr double kTol = 1e-8;
  return make("saturated_fit_kl", kl, kTol, kl < kTol, "n=4, k=4, N=5000");
}

template <typename Fn>
CheckResult guarded(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return make(name, std::nan(""), 0.0, false, std::string("raised: ") + e.what());
  }
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  const std::uint64_t seed = options.seed;
  std::vector<CheckResult> out;
  out.push_back(guarded("mobius_closed_form_vs_recursion",
                        [&] { return check_mobius_closed_form(options.mobius); }));
  out.push_back(guarded("fast_transforms_vs_naive", [&] { return check_fast_transforms(seed); }));
  out.push_back(guarded("theta_round_trip",
                        [&] { return check_theta_round_trip(options.mobius, seed); }));
  out.push_back(guarded("eta_round_trip",
                        [&] { return check_eta_round_trip(options.mobius, seed); }));
  out.push_back(guarded("gradient_finite_difference", [&] { return check_gradient(seed); }));
  out.push_back(guarded("gibbs_kernel_stationarity", [&] { return check_gibbs_stationarity(seed); }));
  out.push_back(guarded("gibbs_eta_within_4_sigma", [&] { return check_gibbs_eta(seed); }));
  out.push_back(guarded("ais_log_z_abs_error", [&] { return check_ais(seed, options.workers); }));
  out.push_back(guarded("pythagoras_residual", [&] { return check_pythagoras(seed); }));
  out.push_back(guarded("saturated_fit_kl", [&] { return check_saturated(seed); }));
  return out;
}

std::string to_json_line(const CheckResult& result) {
  nlohmann::ordered_json j;
  j["check"] = result.name;
  j["passed"] = result.passed;
  if (std::isfinite(result.measured))
    j["measured"] = result.measured;
  else
    j["measured"] = nullptr;
  j["threshold"] = result.threshold;
  j["detail"] = result.detail;
  return j.dump();
}

}  // namespace hbmlab
