// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hbmlab/errors.hpp"
#include "hbmlab/lattice.hpp"
#include "hbmlab/textio.hpp"

namespace hbmlab {

namespace {

void check_length(unsigned n, std::size_t length, const char* what) {
  check_variable_count(n);
  if (length != (std::size_t{1} << n))
    fail(ErrorKind::kUsage, std::string(what) + " has length " +
                                std::to_string(length) + ", expected 2^" +
                                std::to_string(n));
}

void check_same_n(unsigned a, unsigned b) {
  if (a != b)
    fail(ErrorKind::kUsage, "distributions defined on different n (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
}

}  // namespace

DenseDistribution::DenseDistribution(unsigned n, std::vector<double> probs)
    : n_(n), probs_(std::move(probs)), strictly_positive_(true) {
  check_length(n, probs_.size(), "probability vector");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      fail(ErrorKind::kUsage, "probability entries must be finite and >= 0");
    if (p == 0.0) strictly_positive_ = false;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance)
    fail(ErrorKind::kUsage, "probabilities sum to " + format_double(sum) +
                                ", not 1 within 1e-9");
}

DenseDistribution DenseDistribution::uniform(unsigned n) {
  check_variable_count(n);
  const std::size_t size = std::size_t{1} << n;
  return DenseDistribution(n, std::vector<double>(size, 1.0 / size));
}

ThetaCoordinates::ThetaCoordinates(unsigned n, std::vector<double> theta)
    : n(n), theta(std::move(theta)) {
  check_length(n, this->theta.size(), "theta vector");
}

bool ThetaCoordinates::is_normalized(double tolerance) const {
  const auto log_p = fast_zeta_transform(theta, Direction::kDown);
  double sum = 0.0;
  for (double v : log_p) sum += std::exp(v);
  return std::abs(sum - 1.0) <= tolerance;
}

EtaCoordinates::EtaCoordinates(unsigned n, std::vector<double> eta)
    : n(n), eta(std::move(eta)) {
  check_length(n, this->eta.size(), "eta vector");
}

EmpiricalDataset::EmpiricalDataset(unsigned n, std::vector<std::uint64_t> counts)
    : n_(n), counts_(std::move(counts)), total_(0) {
  check_length(n, counts_.size(), "count vector");
  for (std::uint64_t c : counts_) total_ += c;
  if (total_ == 0) fail(ErrorKind::kUsage, "dataset has sample size N = 0");
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

ThetaCoordinates theta_from_p(const DenseDistribution& p) {
  if (!p.strictly_positive())
    fail(ErrorKind::kDomain,
         "theta coordinates need a strictly positive distribution (log 0)");
  std::vector<double> log_p(p.size());
  std::transform(p.probs().begin(), p.probs().end(), log_p.begin(),
                 [](double v) { return std::log(v); });
  return ThetaCoordinates(p.n(), fast_mobius_transform(log_p, Direction::kDown));
}

RenormalizedDistribution p_from_theta(const ThetaCoordinates& theta) {
  auto log_p = fast_zeta_transform(theta.theta, Direction::kDown);
  for (double v : log_p)
    if (!std::isfinite(v))
      fail(ErrorKind::kNumericRange,
           "non-finite log-probability from theta; work in log space");
  const double correction = log_sum_exp(log_p);
  if (!std::isfinite(correction))
    fail(ErrorKind::kNumericRange, "normalizer overflowed");
  for (double& v : log_p) v = std::exp(v - correction);
  return {DenseDistribution(theta.n, std::move(log_p)), correction};
}

EtaCoordinates eta_from_p(const DenseDistribution& p) {
  return EtaCoordinates(p.n(), fast_zeta_transform(p.probs(), Direction::kUp));
}

DenseDistribution p_from_eta(const EtaCoordinates& eta) {
  if (std::abs(eta.eta.at(0) - 1.0) > kNormalizationTolerance)
    fail(ErrorKind::kUsage, "eta(bottom) must be 1, got " +
                                format_double(eta.eta.at(0)));
  auto p = fast_mobius_transform(eta.eta, Direction::kUp);
  for (double& v : p) {
    if (v < -kNormalizationTolerance)
      fail(ErrorKind::kInconsistentEta,
           "eta coordinates imply a negative probability " + format_double(v));
    if (v < 0.0) v = 0.0;
  }
  return DenseDistribution(eta.n, std::move(p));
}

double kl_divergence(const DenseDistribution& p, const DenseDistribution& q) {
  check_same_n(p.n(), q.n());
  double kl = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0)
      fail(ErrorKind::kDivergenceUndefined,
           "KL undefined: q(" + std::to_string(x) + ") = 0 where p > 0");
    kl += p[x] * std::log(p[x] / q[x]);
  }
  return kl;
}

double kl_divergence_log(const DenseDistribution& p,
                         std::span<const double> log_q) {
  if (log_q.size() != p.size())
    fail(ErrorKind::kUsage, "log_q length does not match distribution");
  double kl = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (!std::isfinite(log_q[x]))
      fail(ErrorKind::kDivergenceUndefined,
           "KL undefined: log q(" + std::to_string(x) + ") is not finite");
    kl += p[x] * (std::log(p[x]) - log_q[x]);
  }
  return kl;
}

DenseDistribution empirical_distribution(const EmpiricalDataset& data) {
  if (data.total() == 0) fail(ErrorKind::kUsage, "empty dataset");
  std::vector<double> probs(data.counts().size());
  const double total = static_cast<double>(data.total());
  for (std::size_t x = 0; x < probs.size(); ++x)
    probs[x] = static_cast<double>(data.counts()[x]) / total;
  return DenseDistribution(data.n(), std::move(probs));
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kDistributionFormatVersion = 1;

void add_provenance(RecordFile& file, const Provenance& provenance) {
  for (const auto& [key, value] : provenance) file.set("provenance." + key, value);
}

Provenance read_provenance(const RecordFile& file) {
  Provenance out;
  for (const auto& [key, value] : file.header)
    if (key.rfind("provenance.", 0) == 0) out[key.substr(11)] = value;
  return out;
}

struct ParsedRecords {
  unsigned n;
  std::vector<std::string> values;  // indexed by mask
};

ParsedRecords parse_dense_records(const RecordFile& file,
                                  const std::string& path) {
  const unsigned n = parse_unsigned(file.get("n"));
  check_variable_count(n);
  const std::size_t size = std::size_t{1} << n;
  if (file.records.size() != size)
    fail(ErrorKind::kIo, "'" + path + "' has " +
                             std::to_string(file.records.size()) +
                             " records, expected " + std::to_string(size));
  ParsedRecords out{n, std::vector<std::string>(size)};
  std::vector<bool> seen(size, false);
  for (const auto& record : file.records) {
    const auto fields = split_whitespace(record);
    if (fields.size() != 2) fail(ErrorKind::kIo, "malformed record '" + record + "'");
    const std::uint64_t mask = parse_u64(fields[0]);
    if (mask >= size || seen[mask])
      fail(ErrorKind::kIo, "bad or duplicate outcome in record '" + record + "'");
    seen[mask] = true;
    out.values[mask] = fields[1];
  }
  return out;
}

}  // namespace

void save_distribution(const std::string& path, const DenseDistribution& p,
                       const Provenance& provenance) {
  RecordFile file;
  file.format = "dense";
  file.version = kDistributionFormatVersion;
  file.set("n", std::to_string(p.n()));
  file.set("kind", "distribution");
  add_provenance(file, provenance);
  for (std::uint32_t mask : canonical_masks(p.n()))
    file.records.push_back(std::to_string(mask) + ' ' + format_double(p[mask]));
  write_record_file(path, file);
}

DistributionFile load_distribution(const std::string& path) {
  const auto file = read_record_file(path, "dense", kDistributionFormatVersion);
  if (file.get("kind") != "distribution")
    fail(ErrorKind::kIo, "'" + path + "' holds '" + file.get("kind") +
                             "', not a distribution");
  auto parsed = parse_dense_records(file, path);
  std::vector<double> probs(parsed.values.size());
  for (std::size_t x = 0; x < probs.size(); ++x)
    probs[x] = parse_double(parsed.values[x]);
  return {DenseDistribution(parsed.n, std::move(probs)), read_provenance(file)};
}

void save_dataset(const std::string& path, const EmpiricalDataset& data,
                  const Provenance& provenance) {
  RecordFile file;
  file.format = "dense";
  file.version = kDistributionFormatVersion;
  file.set("n", std::to_string(data.n()));
  file.set("kind", "counts");
  file.set("total", std::to_string(data.total()));
  add_provenance(file, provenance);
  for (std::uint32_t mask : canonical_masks(data.n()))
    file.records.push_back(std::to_string(mask) + ' ' +
                           std::to_string(data.counts()[mask]));
  write_record_file(path, file);
}

DatasetFile load_dataset(const std::string& path) {
  const auto file = read_record_file(path, "dense", kDistributionFormatVersion);
  if (file.get("kind") != "counts")
    fail(ErrorKind::kIo, "'" + path + "' holds '" + file.get("kind") +
                             "', not counts");
  auto parsed = parse_dense_records(file, path);
  std::vector<std::uint64_t> counts(parsed.values.size());
  for (std::size_t x = 0; x < counts.size(); ++x)
    counts[x] = parse_u64(parsed.values[x]);
  EmpiricalDataset data(parsed.n, std::move(counts));
  if (file.has("total") && parse_u64(file.get("total")) != data.total())
    fail(ErrorKind::kIo, "'" + path + "' total does not match its counts");
  return {std::move(data), read_provenance(file)};
}

}  // namespace hbmlab
