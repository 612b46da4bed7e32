/* Apache License, Version 2.0, refer to LICENSE.txt */

#ifndef HBMLAB_HBMLAB_H
#define HBMLAB_HBMLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HBMLAB_BUILDING)
#    define HBL_API __declspec(dllexport)
#  else
#    define HBL_API __declspec(dllimport)
#  endif
#else
#  define HBL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum hbl_status {
  HBL_OK = 0,
  HBL_ERR_USAGE = 1,
  HBL_ERR_DOMAIN = 2,
  HBL_ERR_NUMERIC_RANGE = 3,
  HBL_ERR_INCONSISTENT_ETA = 4,
  HBL_ERR_DIVERGENCE_UNDEFINED = 5,
  HBL_ERR_NON_CONVERGENCE = 6,
  HBL_ERR_PRECONDITION = 7,
  HBL_ERR_IO = 8,
  HBL_ERR_CONFIG = 9,
  HBL_ERR_INTERNAL = 10
} hbl_status;

typedef struct hbl_distribution hbl_distribution;
typedef struct hbl_dataset hbl_dataset;
typedef struct hbl_hbm hbl_hbm;
typedef struct hbl_rbm hbl_rbm;

/* Message of the last failed call on this thread; "" after a success. */
HBL_API const char* hbl_last_error(void);
HBL_API const char* hbl_version(void);
HBL_API const char* hbl_status_name(hbl_status status);

/* ---- lattice transforms, in place over 2^n values; up = 1 sums supersets */
HBL_API hbl_status hbl_zeta_transform(double* values, size_t length, int up);
HBL_API hbl_status hbl_mobius_transform(double* values, size_t length, int up);

/* ---- distributions ------------------------------------------------------ */
HBL_API hbl_status hbl_distribution_create(unsigned n, const double* probs,
                                           hbl_distribution** out);
HBL_API hbl_status hbl_distribution_generate(unsigned n, uint64_t seed,
                                             hbl_distribution** out);
HBL_API hbl_status hbl_distribution_load(const char* path, hbl_distribution** out);
HBL_API hbl_status hbl_distribution_save(const hbl_distribution* p, const char* path);
HBL_API void hbl_distribution_free(hbl_distribution* p);
HBL_API unsigned hbl_distribution_n(const hbl_distribution* p);
/* Copies 2^n probabilities into out. */
HBL_API hbl_status hbl_distribution_probs(const hbl_distribution* p, double* out,
                                          size_t length);
HBL_API hbl_status hbl_distribution_theta(const hbl_distribution* p, double* out,
                                          size_t length);
HBL_API hbl_status hbl_distribution_eta(const hbl_distribution* p, double* out,
                                        size_t length);
HBL_API hbl_status hbl_kl_divergence(const hbl_distribution* p,
                                     const hbl_distribution* q, double* out);

/* ---- datasets ----------------------------------------------------------- */
HBL_API hbl_status hbl_dataset_draw(const hbl_distribution* p, uint64_t sample_size,
                                    uint64_t seed, hbl_dataset** out);
HBL_API hbl_status hbl_dataset_load(const char* path, hbl_dataset** out);
HBL_API hbl_status hbl_dataset_save(const hbl_dataset* d, const char* path);
HBL_API void hbl_dataset_free(hbl_dataset* d);
HBL_API unsigned hbl_dataset_n(const hbl_dataset* d);
HBL_API uint64_t hbl_dataset_total(const hbl_dataset* d);
HBL_API hbl_status hbl_dataset_counts(const hbl_dataset* d, uint64_t* out, size_t length);

/* ---- higher-order Boltzmann machines ------------------------------------ */
typedef struct hbl_fit_options {
  double learning_rate;
  uint64_t max_iterations;
  double eta_tolerance;
  int sampled; /* 0 exact, 1 Gibbs + AIS */
  uint64_t seed;
} hbl_fit_options;

HBL_API void hbl_fit_options_default(hbl_fit_options* options);

HBL_API hbl_status hbl_hbm_create(unsigned n, unsigned k, hbl_hbm** out);
HBL_API hbl_status hbl_hbm_load(const char* path, hbl_hbm** out);
HBL_API hbl_status hbl_hbm_save(const hbl_hbm* m, const char* path);
HBL_API void hbl_hbm_free(hbl_hbm* m);
HBL_API unsigned hbl_hbm_n(const hbl_hbm* m);
HBL_API unsigned hbl_hbm_k(const hbl_hbm* m);
HBL_API size_t hbl_hbm_parameter_count(const hbl_hbm* m);
/* theta over B in canonical order. */
HBL_API hbl_status hbl_hbm_theta(const hbl_hbm* m, double* out, size_t length);
HBL_API hbl_status hbl_hbm_set_theta(hbl_hbm* m, const double* theta, size_t length);
HBL_API hbl_status hbl_hbm_exact_log_z(const hbl_hbm* m, double* out);
HBL_API hbl_status hbl_hbm_distribution(const hbl_hbm* m, hbl_distribution** out);
HBL_API hbl_status hbl_hbm_ais_log_z(const hbl_hbm* m, uint64_t num_intermediate,
                                     uint64_t num_runs, uint64_t seed, double* out);
/* Fits an order-k model to the dataset; iterations may be NULL. */
HBL_API hbl_status hbl_hbm_fit(const hbl_dataset* data, unsigned k,
                               const hbl_fit_options* options, hbl_hbm** out,
                               uint64_t* iterations);

/* ---- restricted Boltzmann machines -------------------------------------- */
typedef struct hbl_cd_options {
  double learning_rate;
  unsigned cd_steps;
  uint64_t epochs; /* 0 derives epochs from target_updates */
  uint64_t target_updates;
  uint64_t batch_size;
  uint64_t seed;
} hbl_cd_options;

HBL_API void hbl_cd_options_default(hbl_cd_options* options);

HBL_API hbl_status hbl_rbm_create(unsigned n, unsigned m, uint64_t seed, hbl_rbm** out);
HBL_API hbl_status hbl_rbm_load(const char* path, hbl_rbm** out);
HBL_API hbl_status hbl_rbm_save(const hbl_rbm* r, const char* path);
HBL_API void hbl_rbm_free(hbl_rbm* r);
HBL_API unsigned hbl_rbm_n(const hbl_rbm* r);
HBL_API unsigned hbl_rbm_m(const hbl_rbm* r);
HBL_API hbl_status hbl_rbm_train(hbl_rbm* r, const hbl_dataset* data,
                                 const hbl_cd_options* options);
HBL_API hbl_status hbl_rbm_marginal(const hbl_rbm* r, hbl_distribution** out);

/* ---- commands ----------------------------------------------------------- */
typedef struct hbl_command_options {
  const char* config_path; /* NULL or "" uses built-in defaults */
  const char* out_dir;     /* NULL or "" uses the config's output_dir */
  int force;
  unsigned workers; /* 0 keeps the config value */
  const char* mode; /* NULL keeps the config value */
  int has_seed;
  uint64_t seed;
} hbl_command_options;

/* Commands return a process exit code: 0 clean, 2 config error, 3 partial
   failure, 4 invariant failure. Progress goes to stdout, errors to stderr. */
HBL_API int hbl_cmd_generate(const hbl_command_options* options);
HBL_API int hbl_cmd_fit(const hbl_command_options* options, const char* model,
                        const char* dataset_path, unsigned complexity);
HBL_API int hbl_cmd_decompose(const hbl_command_options* options);
HBL_API int hbl_cmd_verify(const hbl_command_options* options);
HBL_API int hbl_cmd_plot(const char* csv_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* HBMLAB_HBMLAB_H */
