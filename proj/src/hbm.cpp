// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/hbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hbmlab/parallel.hpp"
#include "hbmlab/random.hpp"
#include "hbmlab/textio.hpp"

namespace hbmlab {

HbmModel::HbmModel(unsigned n, unsigned k)
    : n_(n),
      k_(k),
      index_set_(model_index_set(n, k)),
      dense_(std::size_t{1} << n, 0.0),
      terms_by_variable_(n),
      normalized_(true) {
  dense_[0] = -static_cast<double>(n) * std::numbers::ln2;
  for (std::size_t pos = 0; pos < index_set_.size(); ++pos)
    for (unsigned i = 1; i <= n; ++i)
      if (index_set_[pos].has(i))
        terms_by_variable_[i - 1].push_back(static_cast<std::uint32_t>(pos));
}

std::vector<double> HbmModel::theta() const {
  std::vector<double> out(index_set_.size());
  for (std::size_t pos = 0; pos < out.size(); ++pos) out[pos] = theta_at(pos);
  return out;
}

void HbmModel::set_theta(std::span<const double> theta_b) {
  require(theta_b.size() == index_set_.size(),
          "theta has " + std::to_string(theta_b.size()) + " entries, model has " +
              std::to_string(index_set_.size()) + " parameters");
  for (std::size_t pos = 0; pos < theta_b.size(); ++pos)
    dense_[index_set_[pos].bits] = theta_b[pos];
  normalized_ = false;
}

void HbmModel::set_theta_at(std::size_t position, double value) {
  require(position < index_set_.size(), "parameter position out of range");
  dense_[index_set_[position].bits] = value;
  normalized_ = false;
}

void HbmModel::set_theta_bottom(double value, bool normalized) {
  dense_[0] = value;
  normalized_ = normalized;
}

void GibbsConfig::validate() const {
  require(num_samples >= 1, "Gibbs num_samples must be >= 1");
  require(temperature == 1.0, "Gibbs temperature C must be 1.0");
}

std::vector<double> AisConfig::betas() const {
  if (!schedule.empty()) return schedule;
  std::vector<double> out(num_intermediate + 1);
  for (std::size_t k = 0; k <= num_intermediate; ++k)
    out[k] = static_cast<double>(k) / static_cast<double>(num_intermediate);
  return out;
}

void AisConfig::validate() const {
  require(num_runs >= 1, "AIS num_runs must be >= 1");
  require(num_intermediate >= 1, "AIS num_intermediate must be >= 1");
  if (!schedule.empty()) {
    require(schedule.size() == num_intermediate + 1,
            "AIS schedule must hold num_intermediate + 1 betas");
    require(schedule.front() == 0.0 && schedule.back() == 1.0,
            "AIS schedule must start at 0 and end at 1");
    for (std::size_t k = 1; k < schedule.size(); ++k)
      require(schedule[k] > schedule[k - 1],
              "AIS schedule must be strictly increasing");
  }
}

void FitConfig::validate() const {
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning rate must be > 0");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(eta_tolerance >= 0.0, "eta_tolerance must be >= 0");
  require(trace_interval >= 1, "trace_interval must be >= 1");
}

namespace {

void check_outcome(const HbmModel& m, const Outcome& x) {
  require(x.n == m.n(), "outcome is defined on n=" + std::to_string(x.n) +
                            ", model on n=" + std::to_string(m.n()));
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double unnormalized_log_prob_bits(const HbmModel& m, std::uint32_t x) {
  const auto& dense = m.dense_theta();
  const std::size_t lower_set = std::size_t{1} << std::popcount(x);
  double sum = 0.0;
  if (lower_set <= m.parameter_count()) {
    // Off-B entries of the dense vector are zero; skip only the bottom.
    for (std::uint32_t s = x; s != 0; s = (s - 1) & x) sum += dense[s];
  } else {
    for (const auto& s : m.index_set())
      if ((s.bits & x) == s.bits) sum += dense[s.bits];
  }
  return sum;
}

// log P(x_i=1 | rest) - log P(x_i=0 | rest): the sum of every B-term that
// contains i and whose other members are set in x.
double local_field(const HbmModel& m, std::uint32_t x, unsigned i) {
  const std::uint32_t with_i = x | (1u << (i - 1));
  const auto& dense = m.dense_theta();
  const auto& index = m.index_set();
  double field = 0.0;
  for (std::uint32_t pos : m.terms_containing(i)) {
    const std::uint32_t s = index[pos].bits;
    if ((s & with_i) == s) field += dense[s];
  }
  return field;
}

std::uint32_t random_state(Rng& rng, unsigned n) {
  return static_cast<std::uint32_t>(rng.engine()() >> (64 - n));
}

void sweep(const HbmModel& m, std::uint32_t& x, double beta, Rng& rng) {
  for (unsigned i = 1; i <= m.n(); ++i) {
    const double p = logistic(beta * local_field(m, x, i));
    const std::uint32_t bit = 1u << (i - 1);
    if (rng.uniform() < p)
      x |= bit;
    else
      x &= ~bit;
  }
}

struct ExactState {
  double log_z;
  std::vector<double> probs;
};

ExactState exact_state(const HbmModel& m) {
  auto u = unnormalized_log_probs(m);
  const double log_z = log_sum_exp(u);
  for (double& v : u) v = std::exp(v - log_z);
  return {log_z, std::move(u)};
}

}  // namespace

double unnormalized_log_prob(const HbmModel& m, const Outcome& x) {
  check_outcome(m, x);
  return unnormalized_log_prob_bits(m, x.bits);
}

std::vector<double> unnormalized_log_probs(const HbmModel& m) {
  std::vector<double> theta = m.dense_theta();
  theta[0] = 0.0;
  return fast_zeta_transform(theta, Direction::kDown);
}

double exact_log_z(const HbmModel& m) {
  return log_sum_exp(unnormalized_log_probs(m));
}

DenseDistribution exact_distribution(const HbmModel& m) {
  return DenseDistribution(m.n(), exact_state(m).probs);
}

EtaCoordinates exact_eta(const HbmModel& m) {
  return EtaCoordinates(m.n(),
                        fast_zeta_transform(exact_state(m).probs, Direction::kUp));
}

std::vector<double> model_log_probs(const HbmModel& m) {
  return fast_zeta_transform(m.dense_theta(), Direction::kDown);
}

double gibbs_conditional(const HbmModel& m, const Outcome& x, unsigned i) {
  check_outcome(m, x);
  require(i >= 1 && i <= m.n(), "variable index " + std::to_string(i) +
                                    " outside [1, " + std::to_string(m.n()) + "]");
  return logistic(local_field(m, x.bits, i));
}

std::vector<Outcome> gibbs_sample(const HbmModel& m, const GibbsConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::uint32_t x = random_state(rng, m.n());
  for (std::size_t t = 0; t < cfg.burn_in; ++t) sweep(m, x, 1.0, rng);
  std::vector<Outcome> samples;
  samples.reserve(cfg.num_samples);
  for (std::size_t t = 0; t < cfg.num_samples; ++t) {
    sweep(m, x, 1.0, rng);
    samples.emplace_back(x, m.n());
  }
  return samples;
}

EtaCoordinates estimate_eta(std::span<const Outcome> samples, unsigned n) {
  require(!samples.empty(), "estimate_eta needs at least one sample");
  check_variable_count(n);
  std::vector<double> freq(std::size_t{1} << n, 0.0);
  for (const auto& s : samples) {
    require(s.n == n, "sample defined on a different n");
    freq[s.bits] += 1.0;
  }
  const double total = static_cast<double>(samples.size());
  for (double& f : freq) f /= total;
  return EtaCoordinates(n, fast_zeta_transform(freq, Direction::kUp));
}

AisResult ais_log_z(const HbmModel& m, const AisConfig& cfg) {
  cfg.validate();
  const auto betas = cfg.betas();
  const std::size_t steps = betas.size() - 1;
  std::vector<double> log_weights(cfg.num_runs);
  parallel_for(cfg.num_runs, cfg.workers, [&](std::size_t run) {
    Rng rng(derive_seed(cfg.seed, "ais-run", run));
    std::uint32_t x = random_state(rng, m.n());
    double log_w = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
      log_w += (betas[k] - betas[k - 1]) * unnormalized_log_prob_bits(m, x);
      if (k < steps) sweep(m, x, betas[k], rng);
    }
    log_weights[run] = log_w;
  });
  const double log_z0 = static_cast<double>(m.n()) * std::numbers::ln2;
  const double log_mean =
      log_sum_exp(log_weights) - std::log(static_cast<double>(cfg.num_runs));
  return {log_z0 + log_mean, std::move(log_weights), log_z0};
}

namespace {

// The gradient norm may grow 100x over its starting value before the fit is
// declared divergent; below this absolute level growth is not treated as
// divergence (the starting norm can be ~0 when the target is near uniform).
constexpr double kDivergenceGrowth = 100.0;
constexpr double kDivergenceFloor = 0.05;
constexpr unsigned kAuditMaxVariables = 16;

double mean_log_likelihood(const HbmModel& m, const EtaCoordinates& target,
                           double log_z) {
  double sum = 0.0;
  for (std::size_t pos = 0; pos < m.parameter_count(); ++pos)
    sum += m.theta_at(pos) * target.eta[m.index_set()[pos].bits];
  return sum - log_z;
}

}  // namespace

FitResult fit_mle(const EtaCoordinates& target, const HbmModel& initial,
                  const FitConfig& fit, const GibbsConfig& gibbs,
                  const AisConfig& ais) {
  fit.validate();
  require(target.n == initial.n(), "target eta defined on n=" +
                                       std::to_string(target.n) + ", model on n=" +
                                       std::to_string(initial.n()));
  for (const auto& x : initial.index_set()) {
    const double t = target.eta[x.bits];
    require(t >= 0.0 && t <= 1.0, "target eta outside [0, 1]");
  }
  const bool sampled = fit.mode == FitMode::kSampled;
  if (sampled) {
    gibbs.validate();
    ais.validate();
  }

  HbmModel model = initial;
  const auto& index = model.index_set();
  const std::size_t params = index.size();
  std::vector<double> gradient(params);
  FitDiagnostics diag;
  std::vector<FitTraceRow> trace;

  auto sampled_log_z = [&](std::size_t iteration) {
    AisConfig run = ais;
    run.seed = derive_seed(ais.seed, "fit-ais", iteration);
    return ais_log_z(model, run).log_z_estimate;
  };

  for (std::size_t it = 0;; ++it) {
    std::vector<double> model_eta;
    double log_z = 0.0;
    if (sampled) {
      GibbsConfig chain = gibbs;
      chain.seed = derive_seed(gibbs.seed, "fit-gibbs", it);
      model_eta = estimate_eta(gibbs_sample(model, chain), model.n()).eta;
    } else {
      auto state = exact_state(model);
      log_z = state.log_z;
      model_eta = fast_zeta_transform(state.probs, Direction::kUp);
    }

    double norm = 0.0;
    bool finite = true;
    for (std::size_t pos = 0; pos < params; ++pos) {
      gradient[pos] = target.eta[index[pos].bits] - model_eta[index[pos].bits];
      norm = std::max(norm, std::abs(gradient[pos]));
      finite = finite && std::isfinite(gradient[pos]);
    }
    if (it == 0) diag.initial_gradient_norm = norm;
    diag.final_gradient_norm = norm;
    diag.iterations = it;

    const bool done = norm < fit.eta_tolerance || it == fit.max_iterations;
    if (it % fit.trace_interval == 0 || done) {
      double audit = std::numeric_limits<double>::quiet_NaN();
      if (sampled) {
        log_z = sampled_log_z(it);
        if (model.n() <= kAuditMaxVariables) audit = exact_log_z(model);
      } else {
        audit = log_z;
      }
      trace.push_back({it, norm, mean_log_likelihood(model, target, log_z),
                       log_z, sampled, audit});
    }

    if (!finite || (norm > kDivergenceGrowth * diag.initial_gradient_norm &&
                    norm > kDivergenceFloor)) {
      throw FitDivergedError(
          "gradient ascent diverged at iteration " + std::to_string(it) +
              " (gradient norm " + format_double(norm) + ", initial " +
              format_double(diag.initial_gradient_norm) + ")",
          diag, std::move(trace));
    }
    if (norm < fit.eta_tolerance) {
      diag.converged = true;
      if (!sampled) model.set_theta_bottom(-log_z, true);
      break;
    }
    if (it == fit.max_iterations) {
      if (!sampled) model.set_theta_bottom(-log_z, true);
      break;
    }
    for (std::size_t pos = 0; pos < params; ++pos)
      model.set_theta_at(pos, model.theta_at(pos) + fit.learning_rate * gradient[pos]);
  }

  if (sampled) model.set_theta_bottom(-trace.back().log_z, true);
  return {std::move(model), diag, std::move(trace)};
}

double log_likelihood(const HbmModel& m, const EmpiricalDataset& data,
                      double log_z) {
  require(data.n() == m.n(), "dataset and model defined on different n");
  double sum = 0.0;
  for (std::size_t x = 0; x < data.counts().size(); ++x) {
    const std::uint64_t c = data.counts()[x];
    if (c == 0) continue;
    sum += static_cast<double>(c) *
           (unnormalized_log_prob_bits(m, static_cast<std::uint32_t>(x)) - log_z);
  }
  return sum;
}

// ---------------------------------------------------------------------------

namespace {
constexpr int kHbmFormatVersion = 1;
}

void save_hbm(const std::string& path, const HbmModel& m,
              const Provenance& provenance) {
  RecordFile file;
  file.format = "hbm";
  file.version = kHbmFormatVersion;
  file.set("n", std::to_string(m.n()));
  file.set("k", std::to_string(m.k()));
  file.set("normalized", m.normalized() ? "1" : "0");
  file.set("theta_bottom", format_double(m.theta_bottom()));
  file.set("parameters", std::to_string(m.parameter_count()));
  for (const auto& [key, value] : provenance) file.set("provenance." + key, value);
  for (std::size_t pos = 0; pos < m.parameter_count(); ++pos)
    file.records.push_back(std::to_string(m.index_set()[pos].bits) + ' ' +
                           format_double(m.theta_at(pos)));
  write_record_file(path, file);
}

HbmFile load_hbm(const std::string& path) {
  const auto file = read_record_file(path, "hbm", kHbmFormatVersion);
  HbmModel model(parse_unsigned(file.get("n")), parse_unsigned(file.get("k")));
  if (file.records.size() != model.parameter_count())
    fail(ErrorKind::kIo, "'" + path + "' parameter count does not match (n, k)");
  std::vector<double> theta(model.parameter_count());
  for (std::size_t pos = 0; pos < theta.size(); ++pos) {
    const auto fields = split_whitespace(file.records[pos]);
    if (fields.size() != 2 || parse_u64(fields[0]) != model.index_set()[pos].bits)
      fail(ErrorKind::kIo, "'" + path + "' record " + std::to_string(pos) +
                               " is out of canonical order");
    theta[pos] = parse_double(fields[1]);
  }
  model.set_theta(theta);
  model.set_theta_bottom(parse_double(file.get("theta_bottom")),
                         file.get("normalized") == "1");
  Provenance provenance;
  for (const auto& [key, value] : file.header)
    if (key.rfind("provenance.", 0) == 0) provenance[key.substr(11)] = value;
  return {std::move(model), std::move(provenance)};
}

}  // namespace hbmlab
