// Apache License, Version 2.0, refer to LICENSE.txt

#include "hbmlab/hbmlab.h"

#include <algorithm>
#include <cstring>
#include <iostream>
#include <memory>
#include <string>

#include "hbmlab/distribution.hpp"
#include "hbmlab/errors.hpp"
#include "hbmlab/experiment.hpp"
#include "hbmlab/hbm.hpp"
#include "hbmlab/lattice.hpp"
#include "hbmlab/random.hpp"
#include "hbmlab/rbm.hpp"
#include "hbmlab/synthdata.hpp"

struct hbl_distribution {
  hbmlab::DenseDistribution value;
};
struct hbl_dataset {
  hbmlab::EmpiricalDataset value;
};
struct hbl_hbm {
  hbmlab::HbmModel value;
};
struct hbl_rbm {
  hbmlab::RbmModel value;
};

namespace {

thread_local std::string g_last_error;

hbl_status status_for(hbmlab::ErrorKind kind) {
  using hbmlab::ErrorKind;
  switch (kind) {
    case ErrorKind::kUsage: return HBL_ERR_USAGE;
    case ErrorKind::kDomain: return HBL_ERR_DOMAIN;
    case ErrorKind::kNumericRange: return HBL_ERR_NUMERIC_RANGE;
    case ErrorKind::kInconsistentEta: return HBL_ERR_INCONSISTENT_ETA;
    case ErrorKind::kDivergenceUndefined: return HBL_ERR_DIVERGENCE_UNDEFINED;
    case ErrorKind::kNonConvergence: return HBL_ERR_NON_CONVERGENCE;
    case ErrorKind::kPrecondition: return HBL_ERR_PRECONDITION;
    case ErrorKind::kIo: return HBL_ERR_IO;
    case ErrorKind::kConfig: return HBL_ERR_CONFIG;
  }
  return HBL_ERR_INTERNAL;
}

// Runs body, translating exceptions into a status and the thread's message.
template <typename Fn>
hbl_status call(Fn&& body) {
  try {
    body();
    g_last_error.clear();
    return HBL_OK;
  } catch (const hbmlab::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HBL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HBL_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* what) {
  if (ptr == nullptr) hbmlab::fail(hbmlab::ErrorKind::kUsage, std::string(what) + " is NULL");
}

template <typename Range>
void copy_out(const Range& values, double* out, std::size_t length) {
  need(out, "output buffer");
  if (length != values.size())
    hbmlab::fail(hbmlab::ErrorKind::kUsage,
                 "buffer holds " + std::to_string(length) + " values, need " +
                     std::to_string(values.size()));
  std::copy(values.begin(), values.end(), out);
}

hbmlab::CommandOptions to_options(const hbl_command_options* o) {
  hbmlab::CommandOptions opts;
  if (o == nullptr) return opts;
  if (o->config_path) opts.config_path = o->config_path;
  if (o->out_dir) opts.out_dir = o->out_dir;
  opts.force = o->force != 0;
  opts.workers = o->workers;
  if (o->mode) opts.mode = std::string(o->mode);
  if (o->has_seed) opts.seed = o->seed;
  return opts;
}

}  // namespace

extern "C" {

const char* hbl_last_error(void) { return g_last_error.c_str(); }
const char* hbl_version(void) { return hbmlab::kToolVersion; }

const char* hbl_status_name(hbl_status status) {
  switch (status) {
    case HBL_OK: return "ok";
    case HBL_ERR_USAGE: return "usage";
    case HBL_ERR_DOMAIN: return "domain";
    case HBL_ERR_NUMERIC_RANGE: return "numeric_range";
    case HBL_ERR_INCONSISTENT_ETA: return "inconsistent_eta";
    case HBL_ERR_DIVERGENCE_UNDEFINED: return "divergence_undefined";
    case HBL_ERR_NON_CONVERGENCE: return "non_convergence";
    case HBL_ERR_PRECONDITION: return "precondition";
    case HBL_ERR_IO: return "io";
    case HBL_ERR_CONFIG: return "config";
    case HBL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

static hbl_status transform(double* values, size_t length, int up, bool mobius) {
  return call([&] {
    need(values, "values");
    hbmlab::variables_for_length(length);
    const auto dir = up ? hbmlab::Direction::kUp : hbmlab::Direction::kDown;
    const std::span<const double> in(values, length);
    const auto result = mobius ? hbmlab::fast_mobius_transform(in, dir)
                               : hbmlab::fast_zeta_transform(in, dir);
    std::copy(result.begin(), result.end(), values);
  });
}

hbl_status hbl_zeta_transform(double* values, size_t length, int up) {
  return transform(values, length, up, false);
}
hbl_status hbl_mobius_transform(double* values, size_t length, int up) {
  return transform(values, length, up, true);
}

// ---- distributions -----------------------------------------------------------

hbl_status hbl_distribution_create(unsigned n, const double* probs, hbl_distribution** out) {
  return call([&] {
    need(probs, "probs");
    need(out, "out");
    hbmlab::check_variable_count(n);
    std::vector<double> values(probs, probs + (std::size_t{1} << n));
    *out = new hbl_distribution{hbmlab::DenseDistribution(n, std::move(values))};
  });
}

hbl_status hbl_distribution_generate(unsigned n, uint64_t seed, hbl_distribution** out) {
  return call([&] {
    need(out, "out");
    *out = new hbl_distribution{hbmlab::generate_true_distribution(n, seed)};
  });
}

hbl_status hbl_distribution_load(const char* path, hbl_distribution** out) {
  return call([&] {
    need(path, "path");
    need(out, "out");
    *out = new hbl_distribution{hbmlab::load_distribution(path).distribution};
  });
}

hbl_status hbl_distribution_save(const hbl_distribution* p, const char* path) {
  return call([&] {
    need(p, "distribution");
    need(path, "path");
    hbmlab::save_distribution(path, p->value);
  });
}

void hbl_distribution_free(hbl_distribution* p) { delete p; }
unsigned hbl_distribution_n(const hbl_distribution* p) { return p ? p->value.n() : 0; }

hbl_status hbl_distribution_probs(const hbl_distribution* p, double* out, size_t length) {
  return call([&] {
    need(p, "distribution");
    copy_out(p->value.probs(), out, length);
  });
}

hbl_status hbl_distribution_theta(const hbl_distribution* p, double* out, size_t length) {
  return call([&] {
    need(p, "distribution");
    copy_out(hbmlab::theta_from_p(p->value).theta, out, length);
  });
}

hbl_status hbl_distribution_eta(const hbl_distribution* p, double* out, size_t length) {
  return call([&] {
    need(p, "distribution");
    copy_out(hbmlab::eta_from_p(p->value).eta, out, length);
  });
}

hbl_status hbl_kl_divergence(const hbl_distribution* p, const hbl_distribution* q,
                             double* out) {
  return call([&] {
    need(p, "p");
    need(q, "q");
    need(out, "out");
    *out = hbmlab::kl_divergence(p->value, q->value);
  });
}

// ---- datasets ----------------------------------------------------------------

hbl_status hbl_dataset_draw(const hbl_distribution* p, uint64_t sample_size,
                            uint64_t seed, hbl_dataset** out) {
  return call([&] {
    need(p, "distribution");
    need(out, "out");
    *out = new hbl_dataset{hbmlab::draw_dataset(p->value, sample_size, seed)};
  });
}

hbl_status hbl_dataset_load(const char* path, hbl_dataset** out) {
  return call([&] {
    need(path, "path");
    need(out, "out");
    *out = new hbl_dataset{hbmlab::load_dataset(path).dataset};
  });
}

hbl_status hbl_dataset_save(const hbl_dataset* d, const char* path) {
  return call([&] {
    need(d, "dataset");
    need(path, "path");
    hbmlab::save_dataset(path, d->value);
  });
}

void hbl_dataset_free(hbl_dataset* d) { delete d; }
unsigned hbl_dataset_n(const hbl_dataset* d) { return d ? d->value.n() : 0; }
uint64_t hbl_dataset_total(const hbl_dataset* d) { return d ? d->value.total() : 0; }

hbl_status hbl_dataset_counts(const hbl_dataset* d, uint64_t* out, size_t length) {
  return call([&] {
    need(d, "dataset");
    need(out, "output buffer");
    const auto counts = d->value.counts();
    if (length != counts.size())
      hbmlab::fail(hbmlab::ErrorKind::kUsage, "buffer length does not match 2^n");
    std::copy(counts.begin(), counts.end(), out);
  });
}

// ---- HBM ---------------------------------------------------------------------

void hbl_fit_options_default(hbl_fit_options* options) {
  if (options == nullptr) return;
  const hbmlab::FitConfig fit;
  options->learning_rate = fit.learning_rate;
  options->max_iterations = fit.max_iterations;
  options->eta_tolerance = fit.eta_tolerance;
  options->sampled = 0;
  options->seed = 0;
}

hbl_status hbl_hbm_create(unsigned n, unsigned k, hbl_hbm** out) {
  return call([&] {
    need(out, "out");
    *out = new hbl_hbm{hbmlab::HbmModel(n, k)};
  });
}

hbl_status hbl_hbm_load(const char* path, hbl_hbm** out) {
  return call([&] {
    need(path, "path");
    need(out, "out");
    *out = new hbl_hbm{hbmlab::load_hbm(path).model};
  });
}

hbl_status hbl_hbm_save(const hbl_hbm* m, const char* path) {
  return call([&] {
    need(m, "model");
    need(path, "path");
    hbmlab::save_hbm(path, m->value);
  });
}

void hbl_hbm_free(hbl_hbm* m) { delete m; }
unsigned hbl_hbm_n(const hbl_hbm* m) { return m ? m->value.n() : 0; }
unsigned hbl_hbm_k(const hbl_hbm* m) { return m ? m->value.k() : 0; }
size_t hbl_hbm_parameter_count(const hbl_hbm* m) { return m ? m->value.parameter_count() : 0; }

hbl_status hbl_hbm_theta(const hbl_hbm* m, double* out, size_t length) {
  return call([&] {
    need(m, "model");
    copy_out(m->value.theta(), out, length);
  });
}

hbl_status hbl_hbm_set_theta(hbl_hbm* m, const double* theta, size_t length) {
  return call([&] {
    need(m, "model");
    need(theta, "theta");
    m->value.set_theta(std::span<const double>(theta, length));
    m->value.set_theta_bottom(-hbmlab::exact_log_z(m->value), true);
  });
}

hbl_status hbl_hbm_exact_log_z(const hbl_hbm* m, double* out) {
  return call([&] {
    need(m, "model");
    need(out, "out");
    *out = hbmlab::exact_log_z(m->value);
  });
}

hbl_status hbl_hbm_distribution(const hbl_hbm* m, hbl_distribution** out) {
  return call([&] {
    need(m, "model");
    need(out, "out");
    *out = new hbl_distribution{hbmlab::exact_distribution(m->value)};
  });
}

hbl_status hbl_hbm_ais_log_z(const hbl_hbm* m, uint64_t num_intermediate,
                             uint64_t num_runs, uint64_t seed, double* out) {
  return call([&] {
    need(m, "model");
    need(out, "out");
    hbmlab::AisConfig cfg;
    cfg.num_intermediate = num_intermediate;
    cfg.num_runs = num_runs;
    cfg.seed = seed;
    *out = hbmlab::ais_log_z(m->value, cfg).log_z_estimate;
  });
}

hbl_status hbl_hbm_fit(const hbl_dataset* data, unsigned k, const hbl_fit_options* options,
                       hbl_hbm** out, uint64_t* iterations) {
  return call([&] {
    need(data, "dataset");
    need(out, "out");
    hbl_fit_options o;
    hbl_fit_options_default(&o);
    if (options) o = *options;
    hbmlab::FitConfig fit;
    fit.learning_rate = o.learning_rate;
    fit.max_iterations = o.max_iterations;
    fit.eta_tolerance = o.eta_tolerance;
    fit.mode = o.sampled ? hbmlab::FitMode::kSampled : hbmlab::FitMode::kExact;
    hbmlab::GibbsConfig gibbs;
    gibbs.seed = hbmlab::derive_seed(o.seed, "capi-gibbs", k);
    hbmlab::AisConfig ais;
    ais.seed = hbmlab::derive_seed(o.seed, "capi-ais", k);
    auto result = hbmlab::fit_mle(
        hbmlab::eta_from_p(hbmlab::empirical_distribution(data->value)),
        hbmlab::HbmModel(data->value.n(), k), fit, gibbs, ais);
    if (iterations) *iterations = result.diagnostics.iterations;
    *out = new hbl_hbm{std::move(result.model)};
  });
}

// ---- RBM ---------------------------------------------------------------------

void hbl_cd_options_default(hbl_cd_options* options) {
  if (options == nullptr) return;
  const hbmlab::CdConfig cd;
  options->learning_rate = cd.learning_rate;
  options->cd_steps = cd.cd_steps;
  options->epochs = cd.epochs;
  options->target_updates = cd.target_updates;
  options->batch_size = cd.batch_size;
  options->seed = cd.seed;
}

hbl_status hbl_rbm_create(unsigned n, unsigned m, uint64_t seed, hbl_rbm** out) {
  return call([&] {
    need(out, "out");
    *out = new hbl_rbm{hbmlab::RbmModel::random_init(n, m, seed)};
  });
}

hbl_status hbl_rbm_load(const char* path, hbl_rbm** out) {
  return call([&] {
    need(path, "path");
    need(out, "out");
    *out = new hbl_rbm{hbmlab::load_rbm(path).model};
  });
}

hbl_status hbl_rbm_save(const hbl_rbm* r, const char* path) {
  return call([&] {
    need(r, "model");
    need(path, "path");
    hbmlab::save_rbm(path, r->value);
  });
}

void hbl_rbm_free(hbl_rbm* r) { delete r; }
unsigned hbl_rbm_n(const hbl_rbm* r) { return r ? r->value.n() : 0; }
unsigned hbl_rbm_m(const hbl_rbm* r) { return r ? r->value.m() : 0; }

hbl_status hbl_rbm_train(hbl_rbm* r, const hbl_dataset* data, const hbl_cd_options* options) {
  return call([&] {
    need(r, "model");
    need(data, "dataset");
    hbl_cd_options o;
    hbl_cd_options_default(&o);
    if (options) o = *options;
    hbmlab::CdConfig cd;
    cd.learning_rate = o.learning_rate;
    cd.cd_steps = o.cd_steps;
    cd.epochs = o.epochs;
    cd.target_updates = o.target_updates;
    cd.batch_size = o.batch_size;
    cd.seed = o.seed;
    r->value = hbmlab::train_cd(r->value, data->value, cd).model;
  });
}

hbl_status hbl_rbm_marginal(const hbl_rbm* r, hbl_distribution** out) {
  return call([&] {
    need(r, "model");
    need(out, "out");
    *out = new hbl_distribution{hbmlab::exact_visible_marginal(r->value)};
  });
}

// ---- commands ----------------------------------------------------------------

int hbl_cmd_generate(const hbl_command_options* options) {
  return hbmlab::cmd_generate(to_options(options), std::cout, std::cerr);
}

int hbl_cmd_fit(const hbl_command_options* options, const char* model,
                const char* dataset_path, unsigned complexity) {
  if (model == nullptr || dataset_path == nullptr) {
    std::cerr << "error: fit needs a model family and a dataset path\n";
    return hbmlab::kExitConfigError;
  }
  return hbmlab::cmd_fit(to_options(options), model, dataset_path, complexity, std::cout,
                         std::cerr);
}

int hbl_cmd_decompose(const hbl_command_options* options) {
  return hbmlab::cmd_decompose(to_options(options), std::cout, std::cerr);
}

int hbl_cmd_verify(const hbl_command_options* options) {
  return hbmlab::cmd_verify(to_options(options), std::cout, std::cerr);
}

int hbl_cmd_plot(const char* csv_path, const char* out_dir) {
  if (csv_path == nullptr || out_dir == nullptr) {
    std::cerr << "error: plot needs a CSV path and an output directory\n";
    return hbmlab::kExitConfigError;
  }
  return hbmlab::cmd_plot(csv_path, out_dir, std::cout, std::cerr);
}

}  // extern "C"
