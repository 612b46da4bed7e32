// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hbmlab {

/// Sum-to-one tolerance enforced on construction.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Probability vector over all 2^n outcomes, indexed by outcome mask.
class DenseDistribution {
 public:
  /// Rejects negative entries and sums off 1 by more than 1e-9.
  DenseDistribution(unsigned n, std::vector<double> probs);

  static DenseDistribution uniform(unsigned n);

  unsigned n() const noexcept { return n_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t x) const { return probs_[x]; }
  bool strictly_positive() const noexcept { return strictly_positive_; }

 private:
  unsigned n_;
  std::vector<double> probs_;
  bool strictly_positive_;
};

/// Natural coordinates theta(x) for every outcome, theta(bottom) included.
/// Not required to be normalized; see is_normalized().
struct ThetaCoordinates {
  unsigned n = 0;
  std::vector<double> theta;

  ThetaCoordinates() = default;
  ThetaCoordinates(unsigned n, std::vector<double> theta);

  /// sum_x exp(sum_{s<=x} theta(s)) == 1 within `tolerance`.
  bool is_normalized(double tolerance = kNormalizationTolerance) const;
};

/// Expectation coordinates eta(x) = P(all variables in x are 1).
struct EtaCoordinates {
  unsigned n = 0;
  std::vector<double> eta;

  EtaCoordinates() = default;
  EtaCoordinates(unsigned n, std::vector<double> eta);
};

/// Outcome counts of a sample of size N.
class EmpiricalDataset {
 public:
  EmpiricalDataset(unsigned n, std::vector<std::uint64_t> counts);

  unsigned n() const noexcept { return n_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }

 private:
  unsigned n_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_;
};

/// theta(x) = sum_s mu(s, x) log p(s). Requires a strictly positive p.
ThetaCoordinates theta_from_p(const DenseDistribution& p);

struct RenormalizedDistribution {
  DenseDistribution distribution;
  /// log of the factor divided out; 0 when theta was already normalized.
  double log_correction;
};

/// p(x) = exp(sum_{s<=x} theta(s)), renormalized in log space.
RenormalizedDistribution p_from_theta(const ThetaCoordinates& theta);

/// eta(x) = sum_{s >= x} p(s).
EtaCoordinates eta_from_p(const DenseDistribution& p);

/// p(x) = sum_s mu(x, s) eta(s). Entries in [-1e-9, 0) are clamped to 0;
/// anything more negative is an inconsistent-eta error.
DenseDistribution p_from_eta(const EtaCoordinates& eta);

/// sum_x p(x) log(p(x)/q(x)) with 0 log 0 = 0.
double kl_divergence(const DenseDistribution& p, const DenseDistribution& q);

/// Same, with q given as (possibly approximately normalized) log-probabilities.
double kl_divergence_log(const DenseDistribution& p,
                         std::span<const double> log_q);

DenseDistribution empirical_distribution(const EmpiricalDataset& data);

/// Numerically stable log(sum exp(v)).
double log_sum_exp(std::span<const double> values);

// ---------------------------------------------------------------------------
// Files

using Provenance = std::map<std::string, std::string>;

struct DistributionFile {
  DenseDistribution distribution;
  Provenance provenance;
};

struct DatasetFile {
  EmpiricalDataset dataset;
  Provenance provenance;
};

void save_distribution(const std::string& path, const DenseDistribution& p,
                       const Provenance& provenance = {});
DistributionFile load_distribution(const std::string& path);

void save_dataset(const std::string& path, const EmpiricalDataset& data,
                  const Provenance& provenance = {});
DatasetFile load_dataset(const std::string& path);

}  // namespace hbmlab
