#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "json.hpp"
#include "priorlift/priorlift.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  pl_string_free(s);
  return out;
}

// 40 rows, one feature, labels alternate in runs; the last 10 unlabeled.
pl_dataset* small_dataset() {
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i * 0.1);
    y.push_back(i >= 30 ? -1 : ((i * 7) % 11 < 5 + i / 10 ? 1 : 0));
  }
  pl_dataset* d = nullptr;
  REQUIRE(pl_dataset_from_arrays(x.data(), 40, 1, y.data(), 2, &d) == PL_OK);
  return d;
}

}  // namespace

TEST_CASE("status strings") {
  CHECK(std::string(pl_status_string(PL_OK)) == "ok");
  CHECK(std::string(pl_status_string(PL_ERR_DEGENERATE_CLASS)) == "degenerate_class");
  CHECK(std::string(pl_status_string(PL_ERR_INVALID_ARGUMENT)) == "invalid_argument");
  CHECK(std::strlen(pl_version()) > 0);
}

TEST_CASE("dataset handles") {
  pl_dataset* d = small_dataset();
  pl_dataset_info info;
  REQUIRE(pl_dataset_get_info(d, &info) == PL_OK);
  CHECK(info.size == 40);
  CHECK(info.labeled == 30);
  CHECK(info.feature_count == 1);
  CHECK(info.class_count == 2);
  CHECK(info.has_truth == 0);

  char* name = nullptr;
  REQUIRE(pl_dataset_class_name(d, 1, &name) == PL_OK);
  CHECK(take(name) == "1");
  int j = -1;
  CHECK(pl_dataset_find_class(d, "1", &j) == PL_OK);
  CHECK(j == 1);
  CHECK(pl_dataset_find_class(d, "7", &j) == PL_ERR_CONFIG);

  char* csv = nullptr;
  REQUIRE(pl_dataset_to_csv(d, &csv) == PL_OK);
  CHECK(take(csv).rfind("x1,label\n", 0) == 0);

  pl_dataset* part = nullptr;
  CHECK(pl_dataset_partition(d, 5, 1, &part) == PL_ERR_INVALID_DATASET);
  CHECK(part == nullptr);
  CHECK(std::string(pl_last_error()).find("fully labeled") != std::string::npos);
  pl_dataset_free(d);
}

TEST_CASE("argument checks") {
  pl_dataset* d = nullptr;
  CHECK(pl_dataset_load_recipe(nullptr, "pima", &d) == PL_ERR_INVALID_ARGUMENT);
  CHECK(pl_dataset_load_recipe("/no/such/file.csv", "pima", &d) == PL_ERR_IO);
  CHECK(pl_dataset_load_recipe("/no/such/file.csv", "iris", &d) == PL_ERR_CONFIG);
  CHECK(pl_estimate_prior(nullptr, nullptr, 0, 0.05, nullptr) == PL_ERR_INVALID_ARGUMENT);
  CHECK(pl_curve_size(nullptr) == 0);
  pl_dataset_free(nullptr);
  pl_model_free(nullptr);
  pl_curve_free(nullptr);
  pl_string_free(nullptr);
}

TEST_CASE("estimation through the C interface") {
  pl_dataset* d = small_dataset();
  pl_model* m = nullptr;
  REQUIRE(pl_model_fit(d, &m) == PL_OK);

  pl_prior_estimate semi;
  pl_prior_estimate classical;
  REQUIRE(pl_estimate_prior(d, m, 1, 0.05, &semi) == PL_OK);
  REQUIRE(pl_estimate_classical(d, 1, 0.05, &classical) == PL_OK);
  CHECK(semi.n == 40);
  CHECK(semi.r == 30);
  CHECK(semi.avar == semi.var_g_term + semi.sandwich_term);
  CHECK(semi.ci_lower <= semi.q_hat);
  double reduction = 0.0;
  double labeled_only = 0.0;
  REQUIRE(pl_variance_reduction(&semi, &reduction) == PL_OK);
  REQUIRE(pl_labeled_only_avar(&semi, &labeled_only) == PL_OK);
  CHECK(reduction == doctest::Approx((1.0 / 30 - 1.0 / 40) * semi.var_g));
  CHECK(labeled_only - semi.avar == doctest::Approx(reduction));

  char* json = nullptr;
  REQUIRE(pl_prior_estimate_to_json(&semi, &json) == PL_OK);
  const auto doc = nlohmann::json::parse(take(json));
  CHECK(doc["q_hat"].get<double>() == semi.q_hat);

  REQUIRE(pl_model_to_json(m, &json) == PL_OK);
  CHECK(nlohmann::json::parse(take(json)).size() == 2);

  const char* regions[] = {"0:1:2.5"};
  pl_subclass_estimate sub;
  REQUIRE(pl_estimate_subclass(d, m, 1, regions, 1, 0.05, &sub) == PL_OK);
  CHECK(sub.in_region == 15);
  pl_subclass_estimate everything;
  REQUIRE(pl_estimate_subclass(d, m, 1, nullptr, 0, 0.05, &everything) == PL_OK);
  CHECK(everything.q_hat_w == semi.q_hat);
  const char* empty[] = {"0:100:200"};
  CHECK(pl_estimate_subclass(d, m, 1, empty, 1, 0.05, &sub) == PL_ERR_EMPTY_REGION);
  const char* broken[] = {"0:2:1"};
  CHECK(pl_estimate_subclass(d, m, 1, broken, 1, 0.05, &sub) == PL_ERR_CONFIG);

  pl_diagnostics diag;
  REQUIRE(pl_diagnose(d, m, 1, 0.03, 0.01, &diag) == PL_OK);
  CHECK(diag.sigma == doctest::Approx(semi.var_g).epsilon(1e-12));
  CHECK(std::string(pl_recommendation_string(diag.recommendation)).size() > 0);
  REQUIRE(pl_diagnostics_to_json(&diag, &json) == PL_OK);
  CHECK(nlohmann::json::parse(take(json))["thresholds"]["useful"] == 0.03);

  CHECK(pl_estimate_prior(d, m, 1, 1.5, &semi) == PL_ERR_CONFIG);
  CHECK(pl_estimate_discrete(d, 1, 0.05, nullptr) == PL_ERR_INVALID_ARGUMENT);
  pl_discrete_estimate disc;
  CHECK(pl_estimate_discrete(d, 1, 0.05, &disc) == PL_ERR_COVERAGE);

  pl_model_free(m);
  pl_dataset_free(d);
}

TEST_CASE("degenerate class surfaces as a status") {
  const double x[] = {1, 2, 3, 4};
  const int y[] = {1, 1, 1, 1};
  pl_dataset* d = nullptr;
  REQUIRE(pl_dataset_from_arrays(x, 4, 1, y, 2, &d) == PL_OK);
  pl_model* m = nullptr;
  CHECK(pl_model_fit(d, &m) == PL_ERR_DEGENERATE_CLASS);
  CHECK(m == nullptr);
  pl_dataset_free(d);
}

TEST_CASE("discrete estimate through the C interface") {
  const double x[] = {1, 1, 2, 2, 1, 1, 1, 1};
  const int y[] = {1, 0, 1, 1, -1, -1, -1, -1};
  pl_dataset* d = nullptr;
  REQUIRE(pl_dataset_from_arrays(x, 8, 1, y, 2, &d) == PL_OK);
  pl_discrete_estimate e;
  REQUIRE(pl_estimate_discrete(d, 1, 0.05, &e) == PL_OK);
  CHECK(e.q_hat == 0.625);
  CHECK(e.cell_count == 2);
  char* s = nullptr;
  REQUIRE(pl_discrete_table_csv(d, &s) == PL_OK);
  CHECK(take(s) == "x1,M,N,T_0,T_1\n1,2,4,1,1\n2,2,0,0,2\n");
  REQUIRE(pl_estimate_discrete_json(d, 1, 0.05, &s) == PL_OK);
  CHECK(nlohmann::json::parse(take(s))["p_hat"].size() == 2);
  pl_dataset_free(d);
}

TEST_CASE("evaluation curve through the C interface") {
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    const double v = std::sin(i * 1.7) * 2;
    x.push_back(v);
    y.push_back(std::cos(i * 3.1) < v * 0.6 ? 1 : 0);
  }
  pl_dataset* d = nullptr;
  REQUIRE(pl_dataset_from_arrays(x.data(), 300, 1, y.data(), 2, &d) == PL_OK);
  pl_eval_config config{25, "40x0,100", 3, 2};
  pl_curve* curve = nullptr;
  REQUIRE(pl_evaluate(d, 1, &config, &curve) == PL_OK);
  CHECK(pl_curve_size(curve) == 2);
  pl_curve_record rec;
  REQUIRE(pl_curve_record_at(curve, 1, &rec) == PL_OK);
  CHECK(rec.labeled == 40);
  CHECK(rec.unlabeled == 100);
  CHECK(rec.replicates_used + rec.failures == 25);
  CHECK(pl_curve_record_at(curve, 2, &rec) == PL_ERR_RANGE);

  pl_curve* smooth = nullptr;
  REQUIRE(pl_curve_smooth(curve, 3, &smooth) == PL_OK);
  CHECK(pl_curve_smooth(curve, 2, &smooth) == PL_ERR_CONFIG);
  char* s = nullptr;
  REQUIRE(pl_curve_to_csv(curve, &s) == PL_OK);
  CHECK(take(s).rfind("r,n_minus_r,mse_semi,mse_classical,ratio,replicates_used,failures\n", 0) == 0);
  REQUIRE(pl_curve_to_json(smooth, &s) == PL_OK);
  CHECK(nlohmann::json::parse(take(s))["smoothing_window"] == 3);

  pl_eval_config bad{25, "10x0", 3, 1};
  pl_curve* none = nullptr;
  CHECK(pl_evaluate(d, 1, &bad, &none) == PL_ERR_CONFIG);
  pl_curve_free(smooth);
  pl_curve_free(curve);
  pl_dataset_free(d);
}
