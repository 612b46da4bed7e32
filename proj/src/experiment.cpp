// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hbmlab/errors.hpp"
#include "hbmlab/parallel.hpp"
#include "hbmlab/plots.hpp"
#include "hbmlab/random.hpp"
#include "hbmlab/textio.hpp"
#include "hbmlab/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hbmlab {

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::kConfig, msg); }

void reject_unknown(const json& object, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + where + key + "'");
  }
}

const json& object_at(const json& parent, const std::string& key, const std::string& where) {
  const json& v = parent.at(key);
  if (!v.is_object()) config_error("'" + where + key + "' must be an object");
  return v;
}

std::uint64_t get_u64(const json& v, const std::string& name) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    config_error("'" + name + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double get_double(const json& v, const std::string& name) {
  if (!v.is_number()) config_error("'" + name + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) config_error("'" + name + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) config_error("'" + name + "' must be a string");
  return v.get<std::string>();
}

template <typename T>
std::vector<T> get_u64_array(const json& v, const std::string& name) {
  if (!v.is_array()) config_error("'" + name + "' must be an array");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(static_cast<T>(get_u64(e, name + "[]")));
  return out;
}

void parse_fit(const json& j, const std::string& where, FitConfig& fit) {
  reject_unknown(j, where, {"learning_rate", "max_iterations", "eta_tolerance", "trace_interval"});
  if (j.contains("learning_rate")) fit.learning_rate = get_double(j["learning_rate"], where + "learning_rate");
  if (j.contains("max_iterations")) fit.max_iterations = get_u64(j["max_iterations"], where + "max_iterations");
  if (j.contains("eta_tolerance")) fit.eta_tolerance = get_double(j["eta_tolerance"], where + "eta_tolerance");
  if (j.contains("trace_interval")) fit.trace_interval = get_u64(j["trace_interval"], where + "trace_interval");
}

FitMode parse_mode(const std::string& text) {
  if (text == "exact") return FitMode::kExact;
  if (text == "sampled") return FitMode::kSampled;
  config_error("mode must be 'exact' or 'sampled', got '" + text + "'");
}

std::string hex64(std::uint64_t v) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(v));
  return buffer;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::kIo, "write to '" + path.string() + "' failed");
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig:
    case ErrorKind::kUsage:
    case ErrorKind::kIo:
      return kExitConfigError;
    case ErrorKind::kNonConvergence:
      return kExitPartialFailure;
    default:
      return kExitInvariantFailure;
  }
}

// Runs a command body, mapping exceptions to exit codes and stderr lines.
template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariantFailure;
  }
}

// Config from --config (defaults when absent) with command-line overrides.
RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_run_config(opts.config_path);
  if (opts.mode) cfg.mode = parse_mode(*opts.mode);
  if (opts.seed) cfg.grid.base_seed = *opts.seed;
  if (opts.workers) cfg.workers = opts.workers;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

unsigned worker_count(const RunConfig& cfg) {
  return cfg.workers == 0 ? default_workers() : cfg.workers;
}

void prepare_output_dir(const std::string& dir, bool force) {
  if (fs::exists(dir) && !force)
    fail(ErrorKind::kConfig,
         "output directory '" + dir + "' exists; pass --force to overwrite");
  fs::create_directories(dir);
}

Provenance base_provenance(const RunConfig& cfg) {
  return {{"tool_version", kToolVersion},
          {"config_hash", cfg.config_hash},
          {"base_seed", std::to_string(cfg.grid.base_seed)}};
}

DenseDistribution truth_for(const RunConfig& cfg) {
  return generate_true_distribution(cfg.grid.n,
                                    replicate_seed(cfg.grid.base_seed, "truth", 0));
}

std::string dataset_file_name(std::uint64_t size, std::size_t r, std::size_t replicates) {
  const int width = std::max<int>(2, static_cast<int>(std::to_string(replicates - 1).size()));
  std::ostringstream name;
  name << 'N' << size << "_r" << std::setw(width) << std::setfill('0') << r << ".counts";
  return name.str();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  reject_unknown(j, "", {"n", "base_seed", "sample_sizes", "replicates", "families",
                         "hbm_orders", "rbm_hidden", "mode", "output_dir", "workers",
                         "fit", "projection", "gibbs", "ais", "cd",
                         "rbm_mle_sample_size"});

  RunConfig cfg;
  auto& grid = cfg.grid;
  if (j.contains("n")) {
    const std::uint64_t n = get_u64(j["n"], "n");
    if (n > kMaxVariables)
      config_error("n=" + std::to_string(n) + " exceeds the dense cap of " +
                   std::to_string(kMaxVariables) + " variables");
    if (n == 0) config_error("n must be >= 1");
    grid.n = static_cast<unsigned>(n);
  }
  if (j.contains("base_seed")) grid.base_seed = get_u64(j["base_seed"], "base_seed");
  if (j.contains("sample_sizes")) grid.sample_sizes = get_u64_array<std::uint64_t>(j["sample_sizes"], "sample_sizes");
  if (j.contains("replicates")) grid.replicates = get_u64(j["replicates"], "replicates");
  if (j.contains("hbm_orders")) grid.hbm_orders = get_u64_array<unsigned>(j["hbm_orders"], "hbm_orders");
  if (j.contains("rbm_hidden")) grid.rbm_hidden = get_u64_array<unsigned>(j["rbm_hidden"], "rbm_hidden");
  if (j.contains("families")) {
    if (!j["families"].is_array()) config_error("'families' must be an array");
    cfg.families.clear();
    for (const auto& f : j["families"]) {
      const auto name = get_string(f, "families[]");
      if (name != "hbm" && name != "rbm") config_error("unknown family '" + name + "'");
      for (const auto& seen : cfg.families)
        if (seen == name) config_error("family '" + name + "' listed twice");
      cfg.families.push_back(name);
    }
    if (cfg.families.empty()) config_error("'families' must not be empty");
  }
  if (j.contains("mode")) cfg.mode = parse_mode(get_string(j["mode"], "mode"));
  if (j.contains("output_dir")) cfg.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("workers")) cfg.workers = static_cast<unsigned>(get_u64(j["workers"], "workers"));
  if (j.contains("rbm_mle_sample_size"))
    cfg.rbm_mle_sample_size = get_u64(j["rbm_mle_sample_size"], "rbm_mle_sample_size");

  if (j.contains("fit")) parse_fit(object_at(j, "fit", ""), "fit.", cfg.fit);
  if (j.contains("projection")) parse_fit(object_at(j, "projection", ""), "projection.", cfg.projection);
  if (j.contains("gibbs")) {
    const auto& g = object_at(j, "gibbs", "");
    reject_unknown(g, "gibbs.", {"num_samples", "burn_in"});
    if (g.contains("num_samples")) cfg.gibbs.num_samples = get_u64(g["num_samples"], "gibbs.num_samples");
    if (g.contains("burn_in")) cfg.gibbs.burn_in = get_u64(g["burn_in"], "gibbs.burn_in");
  }
  if (j.contains("ais")) {
    const auto& a = object_at(j, "ais", "");
    reject_unknown(a, "ais.", {"num_intermediate", "num_runs"});
    if (a.contains("num_intermediate")) cfg.ais.num_intermediate = get_u64(a["num_intermediate"], "ais.num_intermediate");
    if (a.contains("num_runs")) cfg.ais.num_runs = get_u64(a["num_runs"], "ais.num_runs");
  }
  if (j.contains("cd")) {
    const auto& c = object_at(j, "cd", "");
    reject_unknown(c, "cd.", {"learning_rate", "cd_steps", "epochs", "target_updates",
                              "batch_size", "hidden_probabilities", "trace_points"});
    if (c.contains("learning_rate")) cfg.cd.learning_rate = get_double(c["learning_rate"], "cd.learning_rate");
    if (c.contains("cd_steps")) cfg.cd.cd_steps = static_cast<unsigned>(get_u64(c["cd_steps"], "cd.cd_steps"));
    if (c.contains("epochs")) cfg.cd.epochs = get_u64(c["epochs"], "cd.epochs");
    if (c.contains("target_updates")) cfg.cd.target_updates = get_u64(c["target_updates"], "cd.target_updates");
    if (c.contains("batch_size")) cfg.cd.batch_size = get_u64(c["batch_size"], "cd.batch_size");
    if (c.contains("hidden_probabilities"))
      cfg.cd.hidden_probabilities = get_bool(c["hidden_probabilities"], "cd.hidden_probabilities");
    if (c.contains("trace_points")) cfg.cd.trace_points = get_u64(c["trace_points"], "cd.trace_points");
  }

  try {
    grid.validate();
    if (grid.replicates < 2) config_error("replicates must be >= 2 for a variance estimate");
    for (unsigned k : grid.hbm_orders)
      if (k < 1 || k > grid.n)
        config_error("hbm_orders entry " + std::to_string(k) + " outside [1, n=" +
                     std::to_string(grid.n) + "]");
    if (grid.hbm_orders.empty()) config_error("hbm_orders must not be empty");
    if (grid.rbm_hidden.empty()) config_error("rbm_hidden must not be empty");
    if (cfg.rbm_mle_sample_size < 1) config_error("rbm_mle_sample_size must be >= 1");
    cfg.fit.validate();
    cfg.projection.validate();
    cfg.gibbs.validate();
    cfg.ais.validate();
    cfg.cd.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    config_error(e.what());
  }
  cfg.fit.mode = cfg.mode;
  cfg.config_hash = hex64(fnv1a64(json_text));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return parse_run_config(text);
}

const std::vector<std::string>& results_csv_columns() {
  static const std::vector<std::string> columns = {
      "family", "n", "complexity", "param_count", "mode", "sample_size",
      "replicates_ok", "bias_nats", "variance_nats", "variance_stderr",
      "total_nats", "pythagoras_residual", "base_seed", "wall_time_s", "status"};
  return columns;
}

std::string results_csv_row(const DecompositionReport& row, std::uint64_t base_seed) {
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.6f", row.wall_time_s);
  std::ostringstream line;
  line << row.family << ',' << row.n << ',' << row.complexity << ',' << row.param_count
       << ',' << row.mode << ',' << row.sample_size << ',' << row.replicates_ok << ','
       << format_double(row.bias) << ',' << format_double(row.variance) << ','
       << format_double(row.variance_stderr) << ',' << format_double(row.total) << ','
       << format_double(row.pythagoras_residual) << ',' << base_seed << ',' << wall
       << ',' << row.status;
  return line.str();
}

std::string results_csv(const std::vector<DecompositionReport>& rows,
                        std::uint64_t base_seed) {
  std::string out;
  const auto& columns = results_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) out += results_csv_row(row, base_seed) + '\n';
  return out;
}

int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    prepare_output_dir(cfg.output_dir, opts.force);
    const fs::path root(cfg.output_dir);
    const auto& grid = cfg.grid;

    Provenance truth_prov = base_provenance(cfg);
    truth_prov["role"] = "truth";
    truth_prov["seed"] = std::to_string(replicate_seed(grid.base_seed, "truth", 0));
    save_distribution((root / "truth.dist").string(), truth_for(cfg), truth_prov);

    fs::create_directories(root / "datasets");
    const auto p_star = truth_for(cfg);
    std::size_t files = 0;
    for (std::uint64_t size : grid.sample_sizes)
      for (std::size_t r = 0; r < grid.replicates; ++r) {
        const std::uint64_t seed = dataset_seed(grid.base_seed, size, r);
        Provenance prov = base_provenance(cfg);
        prov["role"] = "dataset";
        prov["sample_size"] = std::to_string(size);
        prov["replicate"] = std::to_string(r);
        prov["seed"] = std::to_string(seed);
        save_dataset((root / "datasets" / dataset_file_name(size, r, grid.replicates)).string(),
                     draw_dataset(p_star, size, seed), prov);
        ++files;
      }
    out << "wrote 1 truth file and " << files << " dataset files to " << root.string() << '\n';
    return static_cast<int>(kExitClean);
  });
}

namespace {

std::string hbm_trace_csv(const std::vector<FitTraceRow>& trace) {
  std::string out = "iteration,gradient_norm,mean_log_likelihood,log_z,log_z_sampled,exact_log_z\n";
  for (const auto& row : trace)
    out += std::to_string(row.iteration) + ',' + format_double(row.gradient_norm) + ',' +
           format_double(row.mean_log_likelihood) + ',' + format_double(row.log_z) + ',' +
           (row.log_z_sampled ? "1" : "0") + ',' +
           (std::isnan(row.exact_log_z) ? std::string() : format_double(row.exact_log_z)) + '\n';
  return out;
}

std::string rbm_trace_csv(const std::vector<CdTraceRow>& trace) {
  std::string out = "epoch,updates,kl\n";
  for (const auto& row : trace)
    out += std::to_string(row.epoch) + ',' + std::to_string(row.updates) + ',' +
           format_double(row.kl) + '\n';
  return out;
}

}  // namespace

int cmd_fit(const CommandOptions& opts, const std::string& family,
            const std::string& dataset_path, unsigned complexity, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&]() -> int {
    RunConfig cfg = resolve_config(opts);
    if (family != "hbm" && family != "rbm")
      config_error("model must be 'hbm' or 'rbm', got '" + family + "'");
    const auto loaded = load_dataset(dataset_path);
    const auto& data = loaded.dataset;
    const unsigned n = data.n();
    if (!opts.config_path.empty() && n != cfg.grid.n)
      config_error("dataset has n=" + std::to_string(n) + " but the config says n=" +
                   std::to_string(cfg.grid.n));
    const fs::path root(cfg.output_dir);
    fs::create_directories(root);
    const std::uint64_t base = cfg.grid.base_seed;
    Provenance prov = base_provenance(cfg);
    prov["dataset"] = dataset_path;

    if (family == "hbm") {
      if (complexity < 1 || complexity > n)
        config_error("order must lie in [1, n=" + std::to_string(n) + "]");
      const std::string stem = "hbm_k" + std::to_string(complexity);
      const fs::path model_path = root / (stem + ".hbm");
      const fs::path trace_path = root / (stem + "_trace.csv");
      if (fs::exists(model_path) && !opts.force)
        config_error("'" + model_path.string() + "' exists; pass --force to overwrite");
      FitConfig fit = cfg.fit;
      fit.mode = cfg.mode;
      GibbsConfig gibbs = cfg.gibbs;
      gibbs.seed = derive_seed(base, "fit-gibbs", complexity);
      AisConfig ais = cfg.ais;
      ais.seed = derive_seed(base, "fit-ais", complexity);
      ais.workers = worker_count(cfg);
      prov["mode"] = cfg.mode == FitMode::kExact ? "exact" : "sampled";
      try {
        const auto result = fit_mle(eta_from_p(empirical_distribution(data)),
                                    HbmModel(n, complexity), fit, gibbs, ais);
        write_file(trace_path, hbm_trace_csv(result.trace));
        save_hbm(model_path.string(), result.model, prov);
        const auto& d = result.diagnostics;
        if (!d.converged) {
          err << "fit did not converge: " << d.iterations << " iterations, gradient norm "
              << format_double(d.final_gradient_norm) << " (tolerance "
              << format_double(fit.eta_tolerance) << ")\n";
          return kExitPartialFailure;
        }
        out << "converged after " << d.iterations << " iterations, gradient norm "
            << format_double(d.final_gradient_norm) << "; wrote " << model_path.string() << '\n';
        return kExitClean;
      } catch (const FitDivergedError& e) {
        write_file(trace_path, hbm_trace_csv(e.trace()));
        err << "error: " << e.what() << "; partial trace in " << trace_path.string() << '\n';
        return kExitPartialFailure;
      }
    }

    const std::string stem = "rbm_m" + std::to_string(complexity);
    const fs::path model_path = root / (stem + ".rbm");
    const fs::path trace_path = root / (stem + "_trace.csv");
    if (fs::exists(model_path) && !opts.force)
      config_error("'" + model_path.string() + "' exists; pass --force to overwrite");
    CdConfig cd = cfg.cd;
    cd.seed = derive_seed(base, "fit-cd", complexity);
    const auto init = RbmModel::random_init(n, complexity, derive_seed(base, "fit-rbm-init", complexity));
    try {
      const auto result = train_cd(init, data, cd);
      write_file(trace_path, rbm_trace_csv(result.trace));
      save_rbm(model_path.string(), result.model, prov);
      out << "trained " << cd.epochs_for(data.total()) << " epochs, final KL "
          << format_double(result.trace.back().kl) << "; wrote " << model_path.string() << '\n';
      return kExitClean;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNonConvergence) throw;
      write_file(trace_path, rbm_trace_csv({}));
      err << "error: " << e.what() << '\n';
      return kExitPartialFailure;
    }
  });
}

int cmd_decompose(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const RunConfig cfg = resolve_config(opts);
    prepare_output_dir(cfg.output_dir, opts.force);
    const fs::path root(cfg.output_dir);
    const auto& grid = cfg.grid;
    const auto start = std::chrono::steady_clock::now();
    const auto p_star = truth_for(cfg);
    const unsigned workers = worker_count(cfg);

    std::vector<DecompositionReport> rows;
    std::vector<RbmProxyQuality> proxies;
    for (const auto& family : cfg.families) {
      if (family == "hbm") {
        HbmDecompositionConfig hc;
        hc.orders = grid.hbm_orders;
        hc.sample_sizes = grid.sample_sizes;
        hc.replicates = grid.replicates;
        hc.base_seed = grid.base_seed;
        hc.fit = cfg.fit;
        hc.fit.mode = cfg.mode;
        hc.projection = cfg.projection;
        hc.gibbs = cfg.gibbs;
        hc.ais = cfg.ais;
        hc.workers = workers;
        for (auto& row : decompose_hbm(p_star, hc)) rows.push_back(std::move(row));
      } else {
        RbmDecompositionConfig rc;
        rc.hidden_counts = grid.rbm_hidden;
        rc.sample_sizes = grid.sample_sizes;
        rc.replicates = grid.replicates;
        rc.base_seed = grid.base_seed;
        rc.cd = cfg.cd;
        rc.mle_sample_size = cfg.rbm_mle_sample_size;
        rc.workers = workers;
        auto result = decompose_rbm(p_star, rc);
        for (auto& row : result.rows) rows.push_back(std::move(row));
        proxies = std::move(result.proxies);
      }
    }

    const std::string csv = results_csv(rows, grid.base_seed);
    write_file(root / "results.csv", csv);
    fs::create_directories(root / "plots");
    for (const auto& plot : render_plots(csv)) write_file(root / "plots" / plot.name, plot.svg);

    // The identity total = bias + variance holds exactly for HBM rows fitted
    // in exact mode against an exact projection.
    constexpr double kResidualTolerance = 1e-6;
    std::vector<std::string> violations;
    std::size_t degraded = 0;
    for (const auto& row : rows) {
      if (row.status != "ok") ++degraded;
      if (row.family == "hbm" && row.mode == "exact" && row.replicates_ok > 0 &&
          !(std::abs(row.pythagoras_residual) < kResidualTolerance))
        violations.push_back("hbm k=" + std::to_string(row.complexity) + " N=" +
                             std::to_string(row.sample_size) + ": residual " +
                             format_double(row.pythagoras_residual));
    }

    nlohmann::ordered_json meta;
    meta["tool_version"] = kToolVersion;
    meta["config_hash"] = cfg.config_hash;
    meta["base_seed"] = grid.base_seed;
    meta["n"] = grid.n;
    meta["mode"] = cfg.mode == FitMode::kExact ? "exact" : "sampled";
    meta["replicates"] = grid.replicates;
    meta["row_count"] = rows.size();
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    meta["rbm_proxies"] = json::array();
    for (const auto& p : proxies)
      meta["rbm_proxies"].push_back({{"hidden", p.hidden}, {"bias", p.bias},
                                     {"noise_floor", p.noise_floor}});
    meta["row_errors"] = json::array();
    for (const auto& row : rows)
      for (const auto& e : row.errors)
        meta["row_errors"].push_back({{"family", row.family},
                                      {"complexity", row.complexity},
                                      {"sample_size", row.sample_size},
                                      {"error", e}});
    meta["invariant_violations"] = violations;
    write_file(root / "metadata.json", meta.dump(2) + '\n');

    out << "wrote " << rows.size() << " rows to " << (root / "results.csv").string() << '\n';
    if (!violations.empty()) {
      for (const auto& v : violations) err << "invariant violated: " << v << '\n';
      return kExitInvariantFailure;
    }
    if (degraded > 0) {
      err << degraded << " rows have failed replicates; see status column and metadata.json\n";
      return kExitPartialFailure;
    }
    return kExitClean;
  });
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const RunConfig cfg = resolve_config(opts);
    VerifyOptions v;
    v.seed = cfg.grid.base_seed;
    v.workers = worker_count(cfg);
    std::size_t failures = 0;
    for (const auto& result : run_verification(v)) {
      out << to_json_line(result) << '\n';
      if (!result.passed) {
        ++failures;
        err << "FAILED " << result.name << ": measured " << result.measured
            << ", threshold " << result.threshold << ' ' << result.detail << '\n';
      }
    }
    return failures == 0 ? kExitClean : kExitInvariantFailure;
  });
}

int cmd_plot(const std::string& csv_path, const std::string& out_dir, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto plots = render_plots(read_file(csv_path));
    fs::create_directories(out_dir);
    for (const auto& plot : plots) write_file(fs::path(out_dir) / plot.name, plot.svg);
    out << "wrote " << plots.size() << " plot files to " << out_dir << '\n';
    return kExitClean;
  });
}

}  // namespace hbmlab
