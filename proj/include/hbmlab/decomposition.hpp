// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbmlab/distribution.hpp"
#include "hbmlab/hbm.hpp"
#include "hbmlab/rbm.hpp"

namespace hbmlab {

enum class ProjectionMethod { kExact, kSampled, kLargeSample };
const char* to_string(ProjectionMethod method);

/// P*_B together with how well it matches eta* on B.
struct ProjectionResult {
  DenseDistribution projected;
  double achieved_eta_gap;  // max over B of |eta*(x) - eta_B(x)|
  ProjectionMethod method;
  std::size_t iterations;
};

/// Exact-mode fit of the order-k model to eta(P*) restricted to B.
ProjectionResult project_true_hbm(const DenseDistribution& p_star, unsigned k,
                                  const FitConfig& fit);

/// KL(P*, P*_B).
double bias(const DenseDistribution& p_star, const ProjectionResult& projection);

struct VarianceEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
  std::vector<std::string> errors;  // one entry per excluded replicate
};

/// Mean over replicates of KL(P*_B, fitted_r), with its standard error.
/// Replicates whose KL is undefined are excluded and counted.
VarianceEstimate variance_estimate(const DenseDistribution& p_star_b,
                                   std::span<const DenseDistribution> fitted);

/// Same, for fitted models given as log-probabilities.
VarianceEstimate variance_estimate_log(const DenseDistribution& p_star_b,
                                       std::span<const std::vector<double>> log_fitted);

/// D(P*, P-hat_B) - D(P*, P*_B) - D(P*_B, P-hat_B). Both model distributions
/// must lie in S(B) for the order-k index set (theta off B within 1e-6).
double pythagoras_check(const DenseDistribution& p_star,
                        const DenseDistribution& p_star_b,
                        const DenseDistribution& p_hat_b, unsigned k);

/// Largest |theta(x)| over x outside B and the bottom element.
double off_manifold_theta(const DenseDistribution& p, unsigned k);

struct DecompositionReport {
  std::string family;  // "hbm" | "rbm"
  unsigned n = 0;
  unsigned complexity = 0;  // k or hidden count
  std::size_t param_count = 0;
  std::string mode;  // "exact" | "sampled" | "cd"
  std::uint64_t sample_size = 0;
  std::size_t replicate_count = 0;
  std::size_t replicates_ok = 0;
  std::vector<std::uint64_t> seeds;  // dataset seeds, replicate order
  double bias = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double total = 0.0;
  double pythagoras_residual = 0.0;  // total - (bias + variance)
  double wall_time_s = 0.0;
  std::string status;  // "ok" | "partial" | "failed"
  std::vector<std::string> errors;
};

struct HbmDecompositionConfig {
  std::vector<unsigned> orders;
  std::vector<std::uint64_t> sample_sizes;
  std::size_t replicates = 24;
  std::uint64_t base_seed = 0;
  FitConfig fit;         // per-replicate fits; mode selects exact or sampled
  FitConfig projection;  // always run in exact mode
  GibbsConfig gibbs;
  AisConfig ais;
  unsigned workers = 1;
};

struct RbmDecompositionConfig {
  std::vector<unsigned> hidden_counts;
  std::vector<std::uint64_t> sample_sizes;
  std::size_t replicates = 24;
  std::uint64_t base_seed = 0;
  CdConfig cd;
  std::uint64_t mle_sample_size = 1000000;
  unsigned workers = 1;
};

/// Quality of the large-sample RBM reference for one hidden count.
struct RbmProxyQuality {
  unsigned hidden = 0;
  double bias = 0.0;         // KL(P*, proxy)
  double noise_floor = 0.0;  // KL(proxy, independent second proxy)
};

struct RbmDecomposition {
  std::vector<DecompositionReport> rows;
  std::vector<RbmProxyQuality> proxies;
};

/// Dataset seed shared by both families for (N, replicate).
std::uint64_t dataset_seed(std::uint64_t base_seed, std::uint64_t sample_size,
                           std::size_t replicate);

/// One row per (order, sample size) in that nesting order.
std::vector<DecompositionReport> decompose_hbm(const DenseDistribution& p_star,
                                               const HbmDecompositionConfig& cfg);

/// One row per (hidden count, sample size) in that nesting order.
RbmDecomposition decompose_rbm(const DenseDistribution& p_star,
                               const RbmDecompositionConfig& cfg);

}  // namespace hbmlab
