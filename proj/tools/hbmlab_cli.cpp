// Apache License, Version 2.0, refer to LICENSE.txt

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "hbmlab/hbmlab.h"

namespace {

struct SharedFlags {
  std::string config;
  std::string out;
  bool force = false;
  unsigned workers = 0;
  std::string mode;
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  CLI::Option* mode_option = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON run config")->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory (overrides the config)");
    cmd->add_flag("--force", force, "overwrite an existing output directory");
    cmd->add_option("--workers", workers, "worker threads (0 = machine parallelism)");
    mode_option = cmd->add_option("--mode", mode, "HBM fitting mode")
                      ->check(CLI::IsMember({"exact", "sampled"}));
    seed_option = cmd->add_option("--seed", seed, "base seed (overrides the config)");
  }

  hbl_command_options options() const {
    hbl_command_options o{};
    o.config_path = config.c_str();
    o.out_dir = out.c_str();
    o.force = force ? 1 : 0;
    o.workers = workers;
    o.mode = mode_option->count() ? mode.c_str() : nullptr;
    o.has_seed = seed_option->count() ? 1 : 0;
    o.seed = seed;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias-variance experiments for higher-order and restricted Boltzmann machines"};
  app.set_version_flag("--version", std::string(hbl_version()));
  app.require_subcommand(1);

  SharedFlags generate_flags, fit_flags, decompose_flags, verify_flags;

  auto* generate = app.add_subcommand("generate", "write the true distribution and all datasets");
  generate_flags.attach(generate);

  auto* fit = app.add_subcommand("fit", "fit one model to one dataset");
  fit_flags.attach(fit);
  std::string model, dataset;
  unsigned complexity = 1;
  fit->add_option("--model", model, "model family")
      ->required()
      ->check(CLI::IsMember({"hbm", "rbm"}));
  fit->add_option("--dataset", dataset, "counts file")->required()->check(CLI::ExistingFile);
  fit->add_option("--order,--hidden", complexity, "HBM order k or RBM hidden count m")
      ->required();

  auto* decompose = app.add_subcommand("decompose", "run the bias-variance sweep");
  decompose_flags.attach(decompose);

  auto* verify = app.add_subcommand("verify", "run the oracle and invariant checks");
  verify_flags.attach(verify);

  auto* plot = app.add_subcommand("plot", "redraw figures from a results CSV");
  std::string csv, plot_out = "plots";
  plot->add_option("--csv", csv, "results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (generate->parsed()) {
    const auto o = generate_flags.options();
    return hbl_cmd_generate(&o);
  }
  if (fit->parsed()) {
    const auto o = fit_flags.options();
    return hbl_cmd_fit(&o, model.c_str(), dataset.c_str(), complexity);
  }
  if (decompose->parsed()) {
    const auto o = decompose_flags.options();
    return hbl_cmd_decompose(&o);
  }
  if (verify->parsed()) {
    const auto o = verify_flags.options();
    return hbl_cmd_verify(&o);
  }
  return hbl_cmd_plot(csv.c_str(), plot_out.c_str());
}
