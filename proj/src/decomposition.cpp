// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/decomposition.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "hbmlab/errors.hpp"
#include "hbmlab/parallel.hpp"
#include "hbmlab/synthdata.hpp"

namespace hbmlab {

const char* to_string(ProjectionMethod method) {
  switch (method) {
    case ProjectionMethod::kExact: return "exact";
    case ProjectionMethod::kSampled: return "sampled";
    case ProjectionMethod::kLargeSample: return "large-sample";
  }
  return "?";
}

ProjectionResult project_true_hbm(const DenseDistribution& p_star, unsigned k,
                                  const FitConfig& fit) {
  if (!p_star.strictly_positive())
    fail(ErrorKind::kUsage, "projection needs a strictly positive P*");
  FitConfig exact = fit;
  exact.mode = FitMode::kExact;
  const auto target = eta_from_p(p_star);
  auto result = fit_mle(target, HbmModel(p_star.n(), k), exact, GibbsConfig{},
                        AisConfig{});
  return {exact_distribution(result.model), result.diagnostics.final_gradient_norm,
          ProjectionMethod::kExact, result.diagnostics.iterations};
}

double bias(const DenseDistribution& p_star, const ProjectionResult& projection) {
  return kl_divergence(p_star, projection.projected);
}

namespace {

VarianceEstimate summarize(std::span<const std::optional<double>> values,
                           std::vector<std::string> errors) {
  VarianceEstimate out;
  out.errors = std::move(errors);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& v : values) {
    if (!v) {
      ++out.excluded;
      continue;
    }
    ++out.used;
    sum += *v;
  }
  if (out.used == 0) return out;
  out.mean = sum / static_cast<double>(out.used);
  for (const auto& v : values)
    if (v) sum_sq += (*v - out.mean) * (*v - out.mean);
  if (out.used > 1)
    out.stderr_mean = std::sqrt(sum_sq / static_cast<double>(out.used - 1) /
                                static_cast<double>(out.used));
  return out;
}

}  // namespace

VarianceEstimate variance_estimate(const DenseDistribution& p_star_b,
                                   std::span<const DenseDistribution> fitted) {
  require(fitted.size() >= 2, "variance estimate needs at least 2 replicates");
  std::vector<std::optional<double>> values(fitted.size());
  std::vector<std::string> errors;
  for (std::size_t r = 0; r < fitted.size(); ++r) {
    try {
      values[r] = kl_divergence(p_star_b, fitted[r]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDivergenceUndefined) throw;
      errors.push_back("replicate " + std::to_string(r) + ": " + e.what());
    }
  }
  return summarize(values, std::move(errors));
}

VarianceEstimate variance_estimate_log(const DenseDistribution& p_star_b,
                                       std::span<const std::vector<double>> log_fitted) {
  require(log_fitted.size() >= 2, "variance estimate needs at least 2 replicates");
  std::vector<std::optional<double>> values(log_fitted.size());
  std::vector<std::string> errors;
  for (std::size_t r = 0; r < log_fitted.size(); ++r) {
    try {
      values[r] = kl_divergence_log(p_star_b, log_fitted[r]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDivergenceUndefined) throw;
      errors.push_back("replicate " + std::to_string(r) + ": " + e.what());
    }
  }
  return summarize(values, std::move(errors));
}

double off_manifold_theta(const DenseDistribution& p, unsigned k) {
  if (!p.strictly_positive())
    fail(ErrorKind::kPrecondition,
         "distribution has zeros, so it is not in any S(B)");
  const auto theta = theta_from_p(p);
  double worst = 0.0;
  for (std::size_t x = 1; x < theta.theta.size(); ++x)
    if (static_cast<unsigned>(std::popcount(x)) > k)
      worst = std::max(worst, std::abs(theta.theta[x]));
  return worst;
}

double pythagoras_check(const DenseDistribution& p_star,
                        const DenseDistribution& p_star_b,
                        const DenseDistribution& p_hat_b, unsigned k) {
  constexpr double kManifoldTolerance = 1e-6;
  for (const auto* p : {&p_star_b, &p_hat_b}) {
    const double off = off_manifold_theta(*p, k);
    if (off > kManifoldTolerance)
      fail(ErrorKind::kPrecondition,
           "distribution is not in S(B): |theta| off B reaches " +
               std::to_string(off));
  }
  return kl_divergence(p_star, p_hat_b) - kl_divergence(p_star, p_star_b) -
         kl_divergence(p_star_b, p_hat_b);
}

std::uint64_t dataset_seed(std::uint64_t base_seed, std::uint64_t sample_size,
                           std::size_t replicate) {
  return replicate_seed(base_seed, "dataset:N=" + std::to_string(sample_size),
                        replicate);
}

namespace {

using Clock = std::chrono::steady_clock;

// Outcome of one (complexity, N, replicate) work item.
struct ReplicateOutcome {
  std::optional<std::vector<double>> log_q;
  std::string error;
  double seconds = 0.0;
};

std::string cell_role(const char* what, unsigned complexity, std::uint64_t n) {
  return std::string(what) + ":c=" + std::to_string(complexity) +
         ":N=" + std::to_string(n);
}

DecompositionReport aggregate(const DenseDistribution& p_star,
                              const DenseDistribution& reference, double bias_value,
                              std::span<const ReplicateOutcome> outcomes,
                              DecompositionReport row) {
  std::vector<std::optional<double>> totals(outcomes.size());
  std::vector<std::optional<double>> variances(outcomes.size());
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    row.wall_time_s += outcomes[r].seconds;
    if (!outcomes[r].log_q) {
      row.errors.push_back("replicate " + std::to_string(r) + ": " + outcomes[r].error);
      continue;
    }
    try {
      const double total = kl_divergence_log(p_star, *outcomes[r].log_q);
      const double var = kl_divergence_log(reference, *outcomes[r].log_q);
      totals[r] = total;
      variances[r] = var;
    } catch (const Error& e) {
      row.errors.push_back("replicate " + std::to_string(r) + ": " + e.what());
    }
  }
  const auto total = summarize(totals, {});
  const auto var = summarize(variances, {});
  row.replicate_count = outcomes.size();
  row.replicates_ok = var.used;
  row.bias = bias_value;
  row.variance = var.mean;
  row.variance_stderr = var.stderr_mean;
  row.total = total.mean;
  row.pythagoras_residual = row.total - (row.bias + row.variance);
  row.status = var.used == outcomes.size() ? "ok" : var.used == 0 ? "failed" : "partial";
  return row;
}

}  // namespace

std::vector<DecompositionReport> decompose_hbm(const DenseDistribution& p_star,
                                               const HbmDecompositionConfig& cfg) {
  const unsigned n = p_star.n();
  require(!cfg.sample_sizes.empty() && cfg.replicates >= 1,
          "decomposition needs sample sizes and replicates");
  cfg.fit.validate();
  cfg.projection.validate();

  std::vector<ProjectionResult> projections;
  for (unsigned k : cfg.orders) projections.push_back(project_true_hbm(p_star, k, cfg.projection));

  const std::size_t n_sizes = cfg.sample_sizes.size();
  const std::size_t per_order = n_sizes * cfg.replicates;
  std::vector<ReplicateOutcome> outcomes(cfg.orders.size() * per_order);

  parallel_for(outcomes.size(), cfg.workers, [&](std::size_t item) {
    const unsigned k = cfg.orders[item / per_order];
    const std::uint64_t size = cfg.sample_sizes[(item % per_order) / cfg.replicates];
    const std::size_t r = item % cfg.replicates;
    const auto start = Clock::now();
    auto& out = outcomes[item];
    try {
      const auto data = draw_dataset(p_star, size, dataset_seed(cfg.base_seed, size, r));
      GibbsConfig gibbs = cfg.gibbs;
      gibbs.seed = replicate_seed(cfg.base_seed, cell_role("gibbs", k, size), r);
      AisConfig ais = cfg.ais;
      ais.seed = replicate_seed(cfg.base_seed, cell_role("ais", k, size), r);
      ais.workers = 1;
      const auto fitted = fit_mle(eta_from_p(empirical_distribution(data)),
                                  HbmModel(n, k), cfg.fit, gibbs, ais);
      out.log_q = model_log_probs(fitted.model);
    } catch (const Error& e) {
      out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  });

  std::vector<DecompositionReport> rows;
  for (std::size_t o = 0; o < cfg.orders.size(); ++o) {
    const unsigned k = cfg.orders[o];
    const double bias_value = bias(p_star, projections[o]);
    for (std::size_t s = 0; s < n_sizes; ++s) {
      DecompositionReport row;
      row.family = "hbm";
      row.n = n;
      row.complexity = k;
      row.param_count = model_index_set_size(n, k);
      row.mode = cfg.fit.mode == FitMode::kExact ? "exact" : "sampled";
      row.sample_size = cfg.sample_sizes[s];
      for (std::size_t r = 0; r < cfg.replicates; ++r)
        row.seeds.push_back(dataset_seed(cfg.base_seed, row.sample_size, r));
      const std::size_t first = o * per_order + s * cfg.replicates;
      rows.push_back(aggregate(p_star, projections[o].projected, bias_value,
                               std::span(outcomes).subspan(first, cfg.replicates),
                               std::move(row)));
    }
  }
  return rows;
}

RbmDecomposition decompose_rbm(const DenseDistribution& p_star,
                               const RbmDecompositionConfig& cfg) {
  const unsigned n = p_star.n();
  require(!cfg.sample_sizes.empty() && cfg.replicates >= 1,
          "decomposition needs sample sizes and replicates");
  require(cfg.mle_sample_size >= 1, "mle_sample_size must be >= 1");
  cfg.cd.validate();

  // Two independent large-sample fits per hidden count; the first is the
  // reference, their mutual KL is the reference noise floor.
  const std::size_t n_hidden = cfg.hidden_counts.size();
  std::vector<DenseDistribution> proxies(2 * n_hidden, DenseDistribution::uniform(n));
  parallel_for(proxies.size(), cfg.workers, [&](std::size_t item) {
    const unsigned m = cfg.hidden_counts[item / 2];
    const std::size_t copy = item % 2;
    const auto data = draw_dataset(p_star, cfg.mle_sample_size,
                                   replicate_seed(cfg.base_seed, "mle-dataset", copy));
    CdConfig cd = cfg.cd;
    cd.seed = replicate_seed(cfg.base_seed, "mle-cd:m=" + std::to_string(m), copy);
    cd.trace_points = 1;
    const auto init = RbmModel::random_init(
        n, m, replicate_seed(cfg.base_seed, "mle-init:m=" + std::to_string(m), copy));
    proxies[item] = exact_visible_marginal(train_cd(init, data, cd).model);
  });

  RbmDecomposition result;
  for (std::size_t h = 0; h < n_hidden; ++h)
    result.proxies.push_back({cfg.hidden_counts[h],
                              kl_divergence(p_star, proxies[2 * h]),
                              kl_divergence(proxies[2 * h], proxies[2 * h + 1])});

  const std::size_t n_sizes = cfg.sample_sizes.size();
  const std::size_t per_hidden = n_sizes * cfg.replicates;
  std::vector<ReplicateOutcome> outcomes(n_hidden * per_hidden);
  parallel_for(outcomes.size(), cfg.workers, [&](std::size_t item) {
    const unsigned m = cfg.hidden_counts[item / per_hidden];
    const std::uint64_t size = cfg.sample_sizes[(item % per_hidden) / cfg.replicates];
    const std::size_t r = item % cfg.replicates;
    const auto start = Clock::now();
    auto& out = outcomes[item];
    try {
      const auto data = draw_dataset(p_star, size, dataset_seed(cfg.base_seed, size, r));
      CdConfig cd = cfg.cd;
      cd.seed = replicate_seed(cfg.base_seed, cell_role("rbm-cd", m, size), r);
      cd.trace_points = 1;
      const auto init = RbmModel::random_init(
          n, m, replicate_seed(cfg.base_seed, cell_role("rbm-init", m, size), r));
      const auto q = exact_visible_marginal(train_cd(init, data, cd).model);
      std::vector<double> log_q(q.size());
      for (std::size_t x = 0; x < q.size(); ++x) log_q[x] = std::log(q[x]);
      out.log_q = std::move(log_q);
    } catch (const Error& e) {
      out.error = e.what();
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  });

  for (std::size_t h = 0; h < n_hidden; ++h) {
    const unsigned m = cfg.hidden_counts[h];
    for (std::size_t s = 0; s < n_sizes; ++s) {
      DecompositionReport row;
      row.family = "rbm";
      row.n = n;
      row.complexity = m;
      row.param_count = (n + m) + std::size_t{n} * m;
      row.mode = "cd";
      row.sample_size = cfg.sample_sizes[s];
      for (std::size_t r = 0; r < cfg.replicates; ++r)
        row.seeds.push_back(dataset_seed(cfg.base_seed, row.sample_size, r));
      const std::size_t first = h * per_hidden + s * cfg.replicates;
      result.rows.push_back(aggregate(p_star, proxies[2 * h], result.proxies[h].bias,
                                      std::span(outcomes).subspan(first, cfg.replicates),
                                      std::move(row)));
    }
  }
  return result;
}

}  // namespace hbmlab
