// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/rbm.hpp"

#include <algorithm>
#include <cmath>

#include "hbmlab/errors.hpp"
#include "hbmlab/textio.hpp"

namespace hbmlab {

RbmModel::RbmModel(unsigned n, unsigned m)
    : n_(n),
      m_(m),
      b_v_(Eigen::VectorXd::Zero(n)),
      b_h_(Eigen::VectorXd::Zero(m)),
      w_(Eigen::MatrixXd::Zero(n, m)) {
  check_variable_count(n);
}

RbmModel RbmModel::random_init(unsigned n, unsigned m, std::uint64_t seed,
                               double scale) {
  RbmModel model(n, m);
  Rng rng(seed);
  for (unsigned i = 0; i < n; ++i)
    for (unsigned j = 0; j < m; ++j)
      model.w_(i, j) = scale * (2.0 * rng.uniform() - 1.0);
  return model;
}

bool RbmModel::all_finite() const {
  return b_v_.allFinite() && b_h_.allFinite() && w_.allFinite();
}

void CdConfig::validate() const {
  require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "CD learning rate must be > 0");
  require(cd_steps >= 1, "cd_steps must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(epochs >= 1 || target_updates >= 1,
          "either epochs or target_updates must be positive");
}

std::size_t CdConfig::epochs_for(std::uint64_t sample_size) const {
  if (epochs > 0) return epochs;
  const std::size_t per_epoch = (sample_size + batch_size - 1) / batch_size;
  return std::max<std::size_t>(
      1, (target_updates + per_epoch / 2) / std::max<std::size_t>(1, per_epoch));
}

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double a) { return 1.0 / (1.0 + std::exp(-a)); });
}

double softplus(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

Eigen::VectorXd sample_bernoulli(const Eigen::VectorXd& p, Rng& rng) {
  Eigen::VectorXd out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = rng.uniform() < p[i] ? 1.0 : 0.0;
  return out;
}

Eigen::VectorXd bits_vector(std::uint32_t bits, unsigned width) {
  Eigen::VectorXd v(width);
  for (unsigned i = 0; i < width; ++i) v[i] = (bits >> i) & 1u ? 1.0 : 0.0;
  return v;
}

double visible_log_unnormalized(const RbmModel& model, const Eigen::VectorXd& v) {
  double value = model.visible_bias().dot(v);
  const Eigen::VectorXd field = model.hidden_bias() + model.weights().transpose() * v;
  for (Eigen::Index j = 0; j < field.size(); ++j) value += softplus(field[j]);
  return value;
}

}  // namespace

Eigen::VectorXd visible_vector(const Outcome& v) { return bits_vector(v.bits, v.n); }

Eigen::VectorXd hidden_conditional(const RbmModel& model, const Eigen::VectorXd& v) {
  require(v.size() == model.n(), "visible state has wrong length");
  return sigmoid(model.hidden_bias() + model.weights().transpose() * v);
}

Eigen::VectorXd visible_conditional(const RbmModel& model, const Eigen::VectorXd& h) {
  require(h.size() == model.m(), "hidden state has wrong length");
  return sigmoid(model.visible_bias() + model.weights() * h);
}

RbmDelta cd_delta(const RbmModel& model, double learning_rate,
                  std::span<const CdChainStates> states) {
  require(!states.empty(), "CD batch is empty");
  RbmDelta delta{Eigen::MatrixXd::Zero(model.n(), model.m()),
                 Eigen::VectorXd::Zero(model.n()),
                 Eigen::VectorXd::Zero(model.m())};
  for (const auto& s : states) {
    delta.weights += s.v * s.h.transpose() - s.v_neg * s.h_neg.transpose();
    delta.visible_bias += s.v - s.v_neg;
    delta.hidden_bias += s.h - s.h_neg;
  }
  const double scale = learning_rate / static_cast<double>(states.size());
  delta.weights *= scale;
  delta.visible_bias *= scale;
  delta.hidden_bias *= scale;
  return delta;
}

RbmDelta cd_update(const RbmModel& model, std::span<const Outcome> batch,
                   const CdConfig& cfg, Rng& rng,
                   std::vector<CdChainStates>* log) {
  require(!batch.empty(), "CD batch is empty");
  std::vector<CdChainStates> states;
  states.reserve(batch.size());
  for (const auto& x : batch) {
    require(x.n == model.n(), "training vector has wrong n");
    CdChainStates s;
    s.v = visible_vector(x);
    s.h = sample_bernoulli(hidden_conditional(model, s.v), rng);
    Eigen::VectorXd h_chain = s.h;
    for (unsigned step = 0; step < cfg.cd_steps; ++step) {
      s.v_neg = sample_bernoulli(visible_conditional(model, h_chain), rng);
      const Eigen::VectorXd p_h = hidden_conditional(model, s.v_neg);
      h_chain = sample_bernoulli(p_h, rng);
      s.h_neg = cfg.hidden_probabilities ? p_h : h_chain;
    }
    states.push_back(std::move(s));
  }
  RbmDelta delta = cd_delta(model, cfg.learning_rate, states);
  if (log) log->insert(log->end(), states.begin(), states.end());
  return delta;
}

void apply_delta(RbmModel& model, const RbmDelta& delta) {
  model.weights() += delta.weights;
  model.visible_bias() += delta.visible_bias;
  model.hidden_bias() += delta.hidden_bias;
}

RbmTrainResult train_cd(const RbmModel& initial, const EmpiricalDataset& data,
                        const CdConfig& cfg) {
  cfg.validate();
  require(data.n() == initial.n(), "dataset and RBM defined on different n");
  RbmModel model = initial;
  const auto p_hat = empirical_distribution(data);

  std::vector<Outcome> rows;
  rows.reserve(data.total());
  for (std::size_t x = 0; x < data.counts().size(); ++x)
    for (std::uint64_t c = 0; c < data.counts()[x]; ++c)
      rows.emplace_back(static_cast<std::uint32_t>(x), data.n());

  const std::size_t epochs = cfg.epochs_for(data.total());
  const std::size_t interval =
      std::max<std::size_t>(1, epochs / std::max<std::size_t>(1, cfg.trace_points));
  std::vector<CdTraceRow> trace;
  trace.push_back({0, 0, kl_divergence(p_hat, exact_visible_marginal(model))});

  Rng rng(cfg.seed);
  std::size_t updates = 0;
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(rows.begin(), rows.end(), rng.engine());
    for (std::size_t start = 0; start < rows.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, rows.size() - start);
      apply_delta(model, cd_update(model, std::span(rows).subspan(start, len), cfg, rng));
      ++updates;
    }
    if (!model.all_finite())
      fail(ErrorKind::kNonConvergence,
           "CD training produced non-finite parameters at epoch " +
               std::to_string(epoch));
    if (epoch % interval == 0 || epoch == epochs)
      trace.push_back(
          {epoch, updates, kl_divergence(p_hat, exact_visible_marginal(model))});
  }
  return {std::move(model), std::move(trace)};
}

DenseDistribution exact_visible_marginal(const RbmModel& model) {
  const std::size_t size = std::size_t{1} << model.n();
  std::vector<double> log_p(size);
  for (std::size_t x = 0; x < size; ++x)
    log_p[x] = visible_log_unnormalized(
        model, bits_vector(static_cast<std::uint32_t>(x), model.n()));
  const double log_z = log_sum_exp(log_p);
  for (double& v : log_p) v = std::exp(v - log_z);
  return DenseDistribution(model.n(), std::move(log_p));
}

double rbm_energy(const RbmModel& model, const Eigen::VectorXd& v,
                  const Eigen::VectorXd& h) {
  require(v.size() == model.n() && h.size() == model.m(),
          "joint state has wrong shape");
  return -(model.visible_bias().dot(v) + model.hidden_bias().dot(h) +
           v.dot(model.weights() * h));
}

double exact_log_z_rbm(const RbmModel& model) {
  const unsigned total = model.n() + model.m();
  if (total > kMaxVariables)
    fail(ErrorKind::kUsage, "exact RBM partition function needs n + m <= " +
                                std::to_string(kMaxVariables));
  std::vector<double> neg_energy(std::size_t{1} << total);
  for (std::size_t state = 0; state < neg_energy.size(); ++state) {
    const auto bits = static_cast<std::uint32_t>(state);
    neg_energy[state] = -rbm_energy(model, bits_vector(bits, model.n()),
                                    bits_vector(bits >> model.n(), model.m()));
  }
  return log_sum_exp(neg_energy);
}

std::size_t parameter_count(const RbmModel& model) {
  return (model.n() + model.m()) + std::size_t{model.n()} * model.m();
}

// ---------------------------------------------------------------------------

namespace {
constexpr int kRbmFormatVersion = 1;

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

Eigen::VectorXd parse_row(const std::string& line, const char* tag,
                          Eigen::Index expected) {
  const auto fields = split_whitespace(line);
  if (fields.empty() || fields[0] != tag ||
      static_cast<Eigen::Index>(fields.size()) != expected + 1)
    fail(ErrorKind::kIo, std::string("malformed RBM record, expected '") + tag + "'");
  Eigen::VectorXd out(expected);
  for (Eigen::Index i = 0; i < expected; ++i) out[i] = parse_double(fields[i + 1]);
  return out;
}
}  // namespace

void save_rbm(const std::string& path, const RbmModel& model,
              const Provenance& provenance) {
  RecordFile file;
  file.format = "rbm";
  file.version = kRbmFormatVersion;
  file.set("n", std::to_string(model.n()));
  file.set("m", std::to_string(model.m()));
  for (const auto& [key, value] : provenance) file.set("provenance." + key, value);
  file.records.push_back(("visible_bias " + join(model.visible_bias())));
  file.records.push_back(("hidden_bias " + join(model.hidden_bias())));
  for (unsigned i = 0; i < model.n(); ++i)
    file.records.push_back("weights " + join(model.weights().row(i).transpose()));
  for (auto& r : file.records)
    while (!r.empty() && r.back() == ' ') r.pop_back();
  write_record_file(path, file);
}

RbmFile load_rbm(const std::string& path) {
  const auto file = read_record_file(path, "rbm", kRbmFormatVersion);
  RbmModel model(parse_unsigned(file.get("n")), parse_unsigned(file.get("m")));
  if (file.records.size() != 2 + model.n())
    fail(ErrorKind::kIo, "'" + path + "' has the wrong number of records");
  model.visible_bias() = parse_row(file.records[0], "visible_bias", model.n());
  model.hidden_bias() = parse_row(file.records[1], "hidden_bias", model.m());
  for (unsigned i = 0; i < model.n(); ++i)
    model.weights().row(i) = parse_row(file.records[2 + i], "weights", model.m()).transpose();
  Provenance provenance;
  for (const auto& [key, value] : file.header)
    if (key.rfind("provenance.", 0) == 0) provenance[key.substr(11)] = value;
  return {std::move(model), std::move(provenance)};
}

}  // namespace hbmlab
