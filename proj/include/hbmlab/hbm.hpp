// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbmlab/distribution.hpp"
#include "hbmlab/errors.hpp"
#include "hbmlab/lattice.hpp"

namespace hbmlab {

/// k-th order Boltzmann machine in log-linear form. Parameters live on
/// B = model_index_set(n, k); theta(x) is zero off B by construction.
/// theta_bottom holds -log Z when normalized() is true.
class HbmModel {
 public:
  /// Uniform model: theta_B = 0, theta_bottom = -n log 2, normalized.
  HbmModel(unsigned n, unsigned k);

  unsigned n() const noexcept { return n_; }
  unsigned k() const noexcept { return k_; }
  const std::vector<Outcome>& index_set() const noexcept { return index_set_; }
  std::size_t parameter_count() const noexcept { return index_set_.size(); }

  /// theta over B, aligned with index_set().
  std::vector<double> theta() const;
  double theta_at(std::size_t position) const { return dense_[index_set_[position].bits]; }
  /// theta(x) for any outcome; 0 off B. Bottom returns theta_bottom().
  double theta_of(std::uint32_t mask) const { return dense_[mask]; }

  /// Replaces theta over B; clears the normalized flag.
  void set_theta(std::span<const double> theta_b);
  void set_theta_at(std::size_t position, double value);

  double theta_bottom() const noexcept { return dense_[0]; }
  bool normalized() const noexcept { return normalized_; }
  void set_theta_bottom(double value, bool normalized);

  /// Dense theta over all 2^n outcomes including theta_bottom.
  const std::vector<double>& dense_theta() const noexcept { return dense_; }

  /// Positions in index_set() of the terms containing variable i (1-based).
  const std::vector<std::uint32_t>& terms_containing(unsigned i) const {
    return terms_by_variable_[i - 1];
  }

 private:
  unsigned n_;
  unsigned k_;
  std::vector<Outcome> index_set_;
  std::vector<double> dense_;
  std::vector<std::vector<std::uint32_t>> terms_by_variable_;
  bool normalized_;
};

struct GibbsConfig {
  std::size_t num_samples = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  /// Boltzmann constant C; only 1.0 is supported.
  double temperature = 1.0;

  void validate() const;
};

struct AisConfig {
  std::size_t num_intermediate = 1000;
  std::size_t num_runs = 100;
  std::uint64_t seed = 0;
  /// Explicit beta_0..beta_K; empty means the linear grid k/K.
  std::vector<double> schedule;
  unsigned workers = 1;

  std::vector<double> betas() const;
  void validate() const;
};

struct AisResult {
  double log_z_estimate;
  std::vector<double> log_weights;
  double log_z0;
};

enum class FitMode { kExact, kSampled };

struct FitConfig {
  double learning_rate = 0.1;
  std::size_t max_iterations = 10000;
  double eta_tolerance = 1e-6;
  FitMode mode = FitMode::kExact;
  /// A trace row (and, in sampled mode, an AIS run) every this many iterations.
  std::size_t trace_interval = 100;

  void validate() const;
};

struct FitTraceRow {
  std::size_t iteration;
  double gradient_norm;      // max over B of |target_eta - model_eta|
  double mean_log_likelihood;  // log-likelihood / N
  double log_z;
  bool log_z_sampled;
  /// Exact log Z alongside a sampled estimate (n <= 16); NaN otherwise.
  double exact_log_z;
};

struct FitDiagnostics {
  std::size_t iterations = 0;
  double initial_gradient_norm = 0.0;
  double final_gradient_norm = 0.0;
  bool converged = false;
};

struct FitResult {
  HbmModel model;
  FitDiagnostics diagnostics;
  std::vector<FitTraceRow> trace;
};

/// Thrown by fit_mle when the gradient norm explodes.
class FitDivergedError : public Error {
 public:
  FitDivergedError(const std::string& what, FitDiagnostics diagnostics,
                   std::vector<FitTraceRow> trace)
      : Error(ErrorKind::kNonConvergence, what),
        diagnostics_(diagnostics),
        trace_(std::move(trace)) {}

  const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  const std::vector<FitTraceRow>& trace() const noexcept { return trace_; }

 private:
  FitDiagnostics diagnostics_;
  std::vector<FitTraceRow> trace_;
};

/// sum_{s in B, s <= x} theta(s); theta_bottom is not included.
double unnormalized_log_prob(const HbmModel& m, const Outcome& x);
/// The same for every outcome at once, O(n 2^n).
std::vector<double> unnormalized_log_probs(const HbmModel& m);

double exact_log_z(const HbmModel& m);
DenseDistribution exact_distribution(const HbmModel& m);
EtaCoordinates exact_eta(const HbmModel& m);

/// Log-probabilities using the stored theta_bottom (not renormalized).
std::vector<double> model_log_probs(const HbmModel& m);

/// P(x_i = 1 | x_{-i}) for 1-based variable i.
double gibbs_conditional(const HbmModel& m, const Outcome& x, unsigned i);

/// Systematic-scan chain; each sample is the state after a full sweep.
std::vector<Outcome> gibbs_sample(const HbmModel& m, const GibbsConfig& cfg);

/// eta-hat(x) = fraction of samples s with s >= x.
EtaCoordinates estimate_eta(std::span<const Outcome> samples, unsigned n);

/// Annealed importance sampling from the uniform base model.
AisResult ais_log_z(const HbmModel& m, const AisConfig& cfg);

/// Gradient ascent on the log-likelihood: theta(x) += lr (target(x) - eta_B(x)).
/// target is a full eta vector; only entries on B are used.
FitResult fit_mle(const EtaCoordinates& target, const HbmModel& initial,
                  const FitConfig& fit, const GibbsConfig& gibbs,
                  const AisConfig& ais);

/// N sum_x p-hat(x) (unnormalized_log_prob(x) - log_z).
double log_likelihood(const HbmModel& m, const EmpiricalDataset& data,
                      double log_z);

// ---------------------------------------------------------------------------

void save_hbm(const std::string& path, const HbmModel& m,
              const Provenance& provenance = {});
struct HbmFile {
  HbmModel model;
  Provenance provenance;
};
HbmFile load_hbm(const std::string& path);

}  // namespace hbmlab
