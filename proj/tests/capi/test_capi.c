/* Apache License, Version 2.0, refer to LICENSE.txt */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hbmlab/hbmlab.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s (%s)\n", __FILE__, __LINE__, \
              #cond, hbl_last_error());                                \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static void test_transforms(void) {
  double v[4] = {1.0, 2.0, 3.0, 4.0};
  EXPECT(hbl_zeta_transform(v, 4, 0) == HBL_OK);
  EXPECT(v[3] == 10.0);
  EXPECT(hbl_mobius_transform(v, 4, 0) == HBL_OK);
  EXPECT(v[3] == 4.0);
  EXPECT(hbl_zeta_transform(v, 3, 0) == HBL_ERR_USAGE);
  EXPECT(strlen(hbl_last_error()) > 0);
  EXPECT(hbl_zeta_transform(NULL, 4, 0) == HBL_ERR_USAGE);
}

static void test_distribution(void) {
  const double probs[4] = {0.1, 0.3, 0.2, 0.4};
  hbl_distribution* p = NULL;
  double theta[4], eta[4], kl = -1.0;
  EXPECT(hbl_distribution_create(2, probs, &p) == HBL_OK);
  EXPECT(strlen(hbl_last_error()) == 0);
  EXPECT(hbl_distribution_n(p) == 2);
  EXPECT(hbl_distribution_theta(p, theta, 4) == HBL_OK);
  EXPECT(fabs(theta[1] - log(3.0)) < 1e-12);
  EXPECT(hbl_distribution_eta(p, eta, 4) == HBL_OK);
  EXPECT(fabs(eta[1] - 0.7) < 1e-12);
  EXPECT(hbl_distribution_theta(p, theta, 3) == HBL_ERR_USAGE);
  EXPECT(hbl_kl_divergence(p, p, &kl) == HBL_OK && kl == 0.0);

  const double holes[4] = {0.0, 0.5, 0.25, 0.25};
  hbl_distribution* q = NULL;
  EXPECT(hbl_distribution_create(2, holes, &q) == HBL_OK);
  EXPECT(hbl_kl_divergence(p, q, &kl) == HBL_ERR_DIVERGENCE_UNDEFINED);
  EXPECT(hbl_distribution_theta(q, theta, 4) == HBL_ERR_DOMAIN);
  EXPECT(strcmp(hbl_status_name(HBL_ERR_DOMAIN), "domain") == 0);

  const double bad[4] = {0.5, 0.5, 0.5, 0.5};
  hbl_distribution* r = NULL;
  EXPECT(hbl_distribution_create(2, bad, &r) == HBL_ERR_USAGE);
  EXPECT(r == NULL);
  EXPECT(hbl_distribution_create(21, probs, &r) == HBL_ERR_USAGE);
  hbl_distribution_free(p);
  hbl_distribution_free(q);
  hbl_distribution_free(NULL);
}

static void test_hbm(void) {
  hbl_distribution* truth = NULL;
  hbl_dataset* data = NULL;
  hbl_hbm* model = NULL;
  hbl_fit_options options;
  uint64_t iterations = 0;
  double log_z = 0.0, ais = 0.0;
  EXPECT(hbl_distribution_generate(4, 3, &truth) == HBL_OK);
  EXPECT(hbl_dataset_draw(truth, 500, 4, &data) == HBL_OK);
  EXPECT(hbl_dataset_total(data) == 500);
  hbl_fit_options_default(&options);
  options.max_iterations = 50000;
  EXPECT(hbl_hbm_fit(data, 2, &options, &model, &iterations) == HBL_OK);
  EXPECT(hbl_hbm_k(model) == 2);
  EXPECT(hbl_hbm_parameter_count(model) == 10);
  EXPECT(iterations > 0);
  EXPECT(hbl_hbm_exact_log_z(model, &log_z) == HBL_OK);
  EXPECT(hbl_hbm_ais_log_z(model, 1000, 100, 9, &ais) == HBL_OK);
  EXPECT(fabs(ais - log_z) <= 0.05);

  hbl_hbm* bad = NULL;
  EXPECT(hbl_hbm_create(4, 5, &bad) == HBL_ERR_USAGE);
  EXPECT(bad == NULL);

  double theta[10];
  EXPECT(hbl_hbm_theta(model, theta, 10) == HBL_OK);
  hbl_hbm* copy = NULL;
  EXPECT(hbl_hbm_create(4, 2, &copy) == HBL_OK);
  EXPECT(hbl_hbm_set_theta(copy, theta, 10) == HBL_OK);
  hbl_distribution* a = NULL;
  hbl_distribution* b = NULL;
  double kl = 1.0;
  EXPECT(hbl_hbm_distribution(model, &a) == HBL_OK);
  EXPECT(hbl_hbm_distribution(copy, &b) == HBL_OK);
  EXPECT(hbl_kl_divergence(a, b, &kl) == HBL_OK && fabs(kl) < 1e-14);

  hbl_hbm_free(copy);
  hbl_hbm_free(model);
  hbl_distribution_free(a);
  hbl_distribution_free(b);
  hbl_dataset_free(data);
  hbl_distribution_free(truth);
}

static void test_rbm(void) {
  hbl_distribution* truth = NULL;
  hbl_dataset* data = NULL;
  hbl_rbm* model = NULL;
  hbl_distribution* marginal = NULL;
  hbl_cd_options options;
  EXPECT(hbl_distribution_generate(3, 1, &truth) == HBL_OK);
  EXPECT(hbl_dataset_draw(truth, 200, 2, &data) == HBL_OK);
  EXPECT(hbl_rbm_create(3, 2, 5, &model) == HBL_OK);
  hbl_cd_options_default(&options);
  options.target_updates = 200;
  EXPECT(hbl_rbm_train(model, data, &options) == HBL_OK);
  EXPECT(hbl_rbm_marginal(model, &marginal) == HBL_OK);
  EXPECT(hbl_distribution_n(marginal) == 3);
  EXPECT(hbl_rbm_m(model) == 2);
  options.learning_rate = -1.0;
  EXPECT(hbl_rbm_train(model, data, &options) == HBL_ERR_USAGE);
  hbl_distribution_free(marginal);
  hbl_rbm_free(model);
  hbl_dataset_free(data);
  hbl_distribution_free(truth);
}

static void test_files(const char* dir) {
  char path[4096];
  hbl_distribution* p = NULL;
  hbl_distribution* loaded = NULL;
  double kl = 1.0;
  snprintf(path, sizeof path, "%s/capi_truth.dist", dir);
  EXPECT(hbl_distribution_generate(3, 8, &p) == HBL_OK);
  EXPECT(hbl_distribution_save(p, path) == HBL_OK);
  EXPECT(hbl_distribution_load(path, &loaded) == HBL_OK);
  EXPECT(hbl_kl_divergence(p, loaded, &kl) == HBL_OK && kl == 0.0);
  EXPECT(hbl_distribution_load("/nonexistent/x.dist", &loaded) == HBL_ERR_IO);
  hbl_distribution_free(p);
  hbl_distribution_free(loaded);
}

int main(int argc, char** argv) {
  EXPECT(strcmp(hbl_version(), "0.1.0") == 0);
  test_transforms();
  test_distribution();
  test_hbm();
  test_rbm();
  test_files(argc > 1 ? argv[1] : ".");
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("all C API checks passed\n");
  return failures == 0 ? 0 : 1;
}
