#include "doctest.h"

#include <fstream>

#include "priorlift/error.hpp"
#include "priorlift/prior.hpp"
#include "support.hpp"

using namespace priorlift;
using testing::coefficients;

namespace {

Dataset sample(std::uint64_t seed, std::size_t n, std::size_t r, std::vector<double> theta = {0.5, -1.0}) {
  std::mt19937_64 gen(seed);
  return testing::logistic_sample(n, r, theta, gen);
}

}  // namespace

TEST_CASE("constant g gives q = 1/2 and no feature variance") {
  const auto d = sample(1, 300, 100);
  const Coefficients zero = coefficients({0.0, 0.0});
  const auto est = estimate_prior_at(d, 1, zero, information(d, zero));
  CHECK(est.q_hat == 0.5);
  CHECK(est.var_g == 0.0);
  CHECK(est.var_g_term == 0.0);
  CHECK(variance_reduction(est, d) == 0.0);
  CHECK(labeled_only_avar(est) == est.avar);
}

TEST_CASE("estimate invariants") {
  const auto d = sample(2, 1200, 300);
  const auto model = FittedModel::fit(d);
  for (int j : {0, 1}) {
    const auto est = estimate_prior(d, model, j);
    CHECK(est.class_index == j);
    CHECK(est.n == 1200);
    CHECK(est.r == 300);
    CHECK(est.q_hat >= 0.0);
    CHECK(est.q_hat <= 1.0);
    CHECK(est.avar == est.var_g_term + est.sandwich_term);
    CHECK(est.std_error == std::sqrt(est.avar));
    CHECK(est.ci_lower <= est.q_hat);
    CHECK(est.q_hat <= est.ci_upper);
    CHECK(est.var_g_term == doctest::Approx(est.var_g / 1200.0).epsilon(1e-15));

    // Independent recomputation of every component.
    const auto& c = model.for_class(j).coefficients;
    double q = 0.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const Eigen::VectorXd t = design_row(d, i);
      const double p = testing::sigmoid(c.theta.dot(t));
      q += p;
      b += p * (1 - p) * t;
    }
    q /= 1200.0;
    b /= 1200.0;
    double v = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double p = testing::sigmoid(c.theta.dot(design_row(d, i)));
      v += (p - q) * (p - q);
    }
    v /= 1200.0;
    const Eigen::MatrixXd a = model.for_class(j).info.value;
    const double sandwich = b.dot(a.inverse() * b) / 300.0;
    CHECK(est.q_hat == doctest::Approx(q).epsilon(1e-13));
    CHECK(est.var_g == doctest::Approx(v).epsilon(1e-11));
    CHECK(est.sandwich_term == doctest::Approx(sandwich).epsilon(1e-10));
    const double z = 1.959963984540054;
    CHECK(est.ci_lower == doctest::Approx(est.q_hat - z * est.std_error).epsilon(1e-14));
  }
}

TEST_CASE("influence components") {
  const auto d = sample(3, 800, 400, {0.2, 0.7, -1.1});
  const auto fit = fit_class(d, 1);
  const auto comp = influence_components(d, fit.coefficients, fit.info);
  const Eigen::MatrixXd identity = comp.a_inv * fit.info.value;
  CHECK((identity - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(comp.b.size() == 3);
}

TEST_CASE("no unlabeled rows: avar is the labeled-only form") {
  const auto d = sample(4, 500, 500);
  const auto fit = fit_class(d, 1);
  const auto est = estimate_prior(d, fit);
  const auto comp = influence_components(d, fit.coefficients, fit.info);
  const double expected = (est.var_g + comp.b.dot(comp.a_inv * comp.b)) / 500.0;
  CHECK(est.avar == doctest::Approx(expected).epsilon(1e-13));
  CHECK(variance_reduction(est, d) == 0.0);
  // An intercept makes the fitted mean match the labeled proportion.
  CHECK(est.q_hat == doctest::Approx(classical_prior(d, 1).q_hat).epsilon(1e-10));
}

TEST_CASE("classical estimator") {
  const auto d = Dataset::create({1, 2, 3, 4}, 1, {1, 0, 1, 0}, 2);
  const auto est = classical_prior(d, 1);
  CHECK(est.q_hat == 0.5);
  CHECK(est.avar == 0.25 / 4);
  CHECK(est.r == 4);

  const auto single = Dataset::create({1, 2, 3}, 1, {1, std::nullopt, std::nullopt}, 2);
  const auto one = classical_prior(single, 1);
  CHECK(one.q_hat == 1.0);
  CHECK(one.avar == 0.0);
  CHECK(one.ci_lower == 1.0);
}

TEST_CASE("classical estimator on the diabetes data matches a direct count") {
  const auto d = load_csv(testing::data_path("pima.csv"), recipe("pima"));
  std::ifstream in(testing::data_path("pima.csv"));
  std::string line;
  std::getline(in, line);
  int positives = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    positives += line.substr(line.rfind(',') + 1) == "1";
  }
  CHECK(classical_prior(d, 1).q_hat == static_cast<double>(positives) / rows);
}

TEST_CASE("variance reduction") {
  PriorEstimate est;
  est.var_g = 0.06;
  est.n = 400;
  est.r = 100;
  CHECK(variance_reduction(est) == doctest::Approx(4.5e-4).epsilon(1e-14));

  const auto d = sample(5, 900, 300);
  const auto e = estimate_prior(d, fit_class(d, 1));
  CHECK(labeled_only_avar(e) - e.avar == doctest::Approx(variance_reduction(e, d)).epsilon(1e-12));
  CHECK(variance_reduction(e, d) > 0.0);
  CHECK_THROWS_AS(variance_reduction(e, sample(5, 901, 300)), Error);
}

TEST_CASE("ordering against the labeled-only plug-in") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 200 + gen() % 800;
    const std::size_t r = 60 + gen() % (n - 60);
    const auto d = testing::logistic_sample(n, r, {0.3, 1.0}, gen);
    const auto est = estimate_prior(d, fit_class(d, 1));
    if (r < n && est.var_g > 0.0) CHECK(est.avar < labeled_only_avar(est));
  }
}

TEST_CASE("avar decreases as unlabeled rows are added at fixed components") {
  PriorEstimate est;
  est.var_g = 0.04;
  est.sandwich_term = 1e-4;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {200u, 400u, 800u, 1600u}) {
    const double avar = est.var_g / static_cast<double>(n) + est.sandwich_term;
    CHECK(avar < previous);
    previous = avar;
  }
}

TEST_CASE("confidence intervals nest") {
  const auto d = sample(7, 1000, 250);
  const auto fit = fit_class(d, 1);
  const auto wide = estimate_prior(d, fit, 0.01);
  const auto mid = estimate_prior(d, fit, 0.05);
  const auto narrow = estimate_prior(d, fit, 0.2);
  CHECK(wide.ci_lower <= mid.ci_lower);
  CHECK(mid.ci_lower <= narrow.ci_lower);
  CHECK(narrow.ci_upper <= mid.ci_upper);
  CHECK(mid.ci_upper <= wide.ci_upper);
  CHECK_THROWS_AS(estimate_prior(d, fit, 1.0), Error);
}

TEST_CASE("refusals") {
  const auto d = sample(8, 400, 200);
  auto fit = fit_class(d, 1);
  fit.converged = false;
  try {
    estimate_prior(d, fit);
    FAIL("expected a convergence error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Convergence);
  }

  InfoMatrix singular{Eigen::MatrixXd::Zero(2, 2)};
  try {
    estimate_prior_at(d, 1, fit.coefficients, singular);
    FAIL("expected a singular-information error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularInformation);
  }
  InfoMatrix indefinite{Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}}};
  CHECK_THROWS_AS(invert_information(indefinite), Error);
}

TEST_CASE("json carries every decomposition field") {
  const auto d = sample(9, 300, 150);
  const auto j = to_json(estimate_prior(d, fit_class(d, 1)));
  for (const char* key : {"class_index", "n", "r", "q_hat", "var_g", "var_g_term", "sandwich_term", "avar",
                          "std_error", "alpha", "ci"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["ci"].size() == 2);
}
