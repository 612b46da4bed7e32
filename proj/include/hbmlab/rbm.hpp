// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbmlab/distribution.hpp"
#include "hbmlab/lattice.hpp"
#include "hbmlab/random.hpp"

namespace hbmlab {

/// Bipartite machine with n visible and m hidden binary units.
/// Energy: -(b_v.v + b_h.h + v' W h), W is n x m. m = 0 is allowed.
class RbmModel {
 public:
  /// All-zero parameters.
  RbmModel(unsigned n, unsigned m);

  /// Zero biases, weights uniform in [-scale, scale].
  static RbmModel random_init(unsigned n, unsigned m, std::uint64_t seed,
                              double scale = 0.01);

  unsigned n() const noexcept { return n_; }
  unsigned m() const noexcept { return m_; }

  const Eigen::VectorXd& visible_bias() const noexcept { return b_v_; }
  const Eigen::VectorXd& hidden_bias() const noexcept { return b_h_; }
  const Eigen::MatrixXd& weights() const noexcept { return w_; }
  Eigen::VectorXd& visible_bias() noexcept { return b_v_; }
  Eigen::VectorXd& hidden_bias() noexcept { return b_h_; }
  Eigen::MatrixXd& weights() noexcept { return w_; }

  bool all_finite() const;

 private:
  unsigned n_;
  unsigned m_;
  Eigen::VectorXd b_v_;
  Eigen::VectorXd b_h_;
  Eigen::MatrixXd w_;
};

struct CdConfig {
  double learning_rate = 0.1;
  unsigned cd_steps = 1;
  /// 0 derives the epoch count from target_updates and the dataset size.
  std::size_t epochs = 0;
  std::size_t target_updates = 10000;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  /// Use p(h'|v') instead of a sampled h' in the negative statistics.
  bool hidden_probabilities = false;
  /// Upper bound on the number of trace rows recorded by train_cd.
  std::size_t trace_points = 100;

  void validate() const;
  std::size_t epochs_for(std::uint64_t sample_size) const;
};

/// Parameter increment produced by one CD minibatch.
struct RbmDelta {
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;
};

/// The four states entering the update for one training vector.
struct CdChainStates {
  Eigen::VectorXd v, h, v_neg, h_neg;
};

struct CdTraceRow {
  std::size_t epoch;
  std::size_t updates;
  double kl;  // KL(P-hat, model visible marginal)
};

struct RbmTrainResult {
  RbmModel model;
  std::vector<CdTraceRow> trace;
};

Eigen::VectorXd visible_vector(const Outcome& v);

/// p(h_j = 1 | v) = sigmoid(b_h + W' v).
Eigen::VectorXd hidden_conditional(const RbmModel& model, const Eigen::VectorXd& v);
/// p(v_i = 1 | h) = sigmoid(b_v + W h).
Eigen::VectorXd visible_conditional(const RbmModel& model, const Eigen::VectorXd& h);

/// Batch average of eps (v h^T - v' h'^T), eps (v - v'), eps (h - h').
RbmDelta cd_delta(const RbmModel& model, double learning_rate,
                  std::span<const CdChainStates> states);

/// Samples the CD chains for `batch` and returns the averaged delta. When
/// `log` is non-null the sampled states are appended to it.
RbmDelta cd_update(const RbmModel& model, std::span<const Outcome> batch,
                   const CdConfig& cfg, Rng& rng,
                   std::vector<CdChainStates>* log = nullptr);

void apply_delta(RbmModel& model, const RbmDelta& delta);

/// Shuffled minibatch CD over `epochs` passes of the dataset.
RbmTrainResult train_cd(const RbmModel& initial, const EmpiricalDataset& data,
                        const CdConfig& cfg);

/// Visible marginal with the hidden layer summed out analytically:
/// log p*(v) = b_v.v + sum_j softplus(b_h_j + (W' v)_j). Needs n <= 20.
DenseDistribution exact_visible_marginal(const RbmModel& model);

/// Brute-force log Z over all 2^(n+m) joint states. Needs n + m <= 20.
double exact_log_z_rbm(const RbmModel& model);

/// Energy of a joint configuration.
double rbm_energy(const RbmModel& model, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& h);

/// (n + m) + n m.
std::size_t parameter_count(const RbmModel& model);

void save_rbm(const std::string& path, const RbmModel& model,
              const Provenance& provenance = {});
struct RbmFile {
  RbmModel model;
  Provenance provenance;
};
RbmFile load_rbm(const std::string& path);

}  // namespace hbmlab
