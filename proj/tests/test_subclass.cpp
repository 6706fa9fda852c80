#include "doctest.h"

#include <limits>

#include "priorlift/error.hpp"
#include "priorlift/prior.hpp"
#include "priorlift/subclass.hpp"
#include "support.hpp"

using namespace priorlift;

namespace {

RegionPredicate region(std::initializer_list<const char*> specs) {
  std::vector<IntervalConstraint> cs;
  for (const char* s : specs) cs.push_back(IntervalConstraint::parse(s));
  return RegionPredicate::intervals(cs);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Config;
}

}  // namespace

TEST_CASE("interval parsing") {
  const auto a = IntervalConstraint::parse("1:0.5:2");
  CHECK(a.feature == 1);
  CHECK(a.lower == 0.5);
  CHECK(a.upper == 2.0);
  CHECK(a.contains(0.5));
  CHECK_FALSE(a.contains(2.0));

  const auto b = IntervalConstraint::parse("0::3]");
  CHECK(b.lower == -std::numeric_limits<double>::infinity());
  CHECK(b.contains(3.0));
  const auto c = IntervalConstraint::parse("(0:1:");
  CHECK_FALSE(c.contains(1.0));
  CHECK(c.contains(1e300));
  CHECK(region({"1:0.5:2", "0::3]", "(0:1:"}).describe() == "[0.5, 2) on x1 & (-inf, 3] on x0 & (1, inf) on x0");
  CHECK(IntervalConstraint::parse("0:-inf:inf").contains(-1e300));

  CHECK(code_of([] { IntervalConstraint::parse("0:2:1"); }) == ErrorCode::Config);
  CHECK(code_of([] { IntervalConstraint::parse("x:1:2"); }) == ErrorCode::Config);
  CHECK(code_of([] { IntervalConstraint::parse("0:1"); }) == ErrorCode::Config);
  CHECK(code_of([] { RegionPredicate::intervals({}); }) == ErrorCode::Config);
}

TEST_CASE("whole space reproduces the prior estimate exactly") {
  std::mt19937_64 gen(1);
  const auto d = testing::logistic_sample(900, 300, {0.4, -0.9, 0.3}, gen);
  const auto model = FittedModel::fit(d);
  for (int j : {0, 1}) {
    const auto prior = estimate_prior(d, model, j);
    const auto sub = estimate_subclass(d, model, j, RegionPredicate::everything());
    CHECK(sub.q_hat_w == prior.q_hat);
    CHECK(sub.avar == prior.avar);
    CHECK(sub.p_hat_w == 1.0);
    CHECK(sub.in_region == 900);
  }
}

TEST_CASE("single observation region") {
  std::vector<double> x;
  std::vector<std::optional<int>> y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(i % 2);
  }
  const auto d = Dataset::create(x, 1, y, 2);
  const auto c = testing::coefficients({std::log(0.7 / 0.3), 0.0});
  const auto est = estimate_subclass_at(d, 1, c, information(d, c), region({"0:5:6"}));
  CHECK(est.in_region == 1);
  CHECK(est.q_hat_w == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("law of total probability over a partition") {
  std::mt19937_64 gen(2);
  const auto d = testing::logistic_sample(1500, 500, {0.1, 1.2, -0.4}, gen);
  const auto model = FittedModel::fit(d);
  const auto prior = estimate_prior(d, model, 1);
  const std::vector<RegionPredicate> parts{region({"0::-0.5"}), region({"0:-0.5:0.7", "1::0"}),
                                           region({"0:-0.5:0.7", "1:0:"}), region({"0:0.7:"})};
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& w : parts) {
    const auto e = estimate_subclass(d, model, 1, w);
    CHECK(e.q_hat_w * e.p_hat_w == doctest::Approx(e.v_hat).epsilon(1e-12));
    CHECK(e.q_hat_w >= 0.0);
    CHECK(e.q_hat_w <= 1.0);
    CHECK(e.avar == doctest::Approx(e.var_term + e.sandwich_term).epsilon(1e-14));
    total += e.q_hat_w * e.p_hat_w;
    count += e.in_region;
  }
  CHECK(count == 1500);
  CHECK(total == doctest::Approx(prior.q_hat).epsilon(1e-12));
}

TEST_CASE("classical subclass estimator") {
  const auto d = Dataset::create({1, 2, 3, 10, 11}, 1, {1, 1, 0, 0, std::nullopt}, 2);
  const auto e = classical_subclass(d, 1, region({"0::5"}));
  CHECK(e.q_hat_w == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(e.in_region == 3);
  CHECK(e.avar == doctest::Approx((2.0 / 3.0) * (1.0 / 3.0) / 3.0).epsilon(1e-14));

  std::mt19937_64 gen(3);
  const auto full = testing::logistic_sample(400, 400, {0.2, 0.5}, gen);
  const auto all = classical_subclass(full, 1, RegionPredicate::everything());
  const auto prior = classical_prior(full, 1);
  CHECK(all.q_hat_w == prior.q_hat);
  CHECK(all.avar == prior.avar);

  // The only in-region row is unlabeled.
  CHECK(code_of([&] { classical_subclass(d, 1, region({"0:11:12"})); }) == ErrorCode::EmptyRegion);
}

TEST_CASE("region errors") {
  std::mt19937_64 gen(4);
  const auto d = testing::logistic_sample(200, 100, {0.0, 1.0}, gen);
  const auto model = FittedModel::fit(d);
  CHECK(code_of([&] { estimate_subclass(d, model, 1, region({"0:100:200"})); }) == ErrorCode::EmptyRegion);
  CHECK(code_of([&] { estimate_subclass(d, model, 1, region({"3:0:1"})); }) == ErrorCode::Shape);

  const auto named = RegionPredicate::membership("positive", [](std::span<const double> x) { return x[0] > 0; });
  const auto by_name = estimate_subclass(d, model, 1, named);
  const auto by_interval = estimate_subclass(d, model, 1, region({"(0:0:"}));
  CHECK(by_name.q_hat_w == by_interval.q_hat_w);
  CHECK(by_name.avar == by_interval.avar);
}

TEST_CASE("semi-supervised subclass estimate beats and agrees with the labeled-only ratio") {
  const int reps = 500;
  int smaller = 0;
  int agree = 0;
  const auto w = region({"0:0:"});
  for (int rep = 0; rep < reps; ++rep) {
    std::mt19937_64 gen(1000 + rep);
    const auto d = testing::logistic_sample(4000, 1000, {0.5, -1.0}, gen);
    const auto fit = fit_class(d, 1);
    const auto semi = estimate_subclass_at(d, 1, fit.coefficients, fit.info, w);
    const auto classical = classical_subclass(d, 1, w);
    smaller += semi.avar < classical.avar;
    agree += std::abs(semi.q_hat_w - classical.q_hat_w) <= 3.0 * std::sqrt(semi.avar + classical.avar);
  }
  MESSAGE("smaller avar in " << smaller << "/500, agreement in " << agree << "/500");
  CHECK(smaller >= 475);
  CHECK(agree >= 495);
}

TEST_CASE("json mirrors the estimate") {
  std::mt19937_64 gen(5);
  const auto d = testing::logistic_sample(300, 200, {0.0, 1.0}, gen);
  const auto j = to_json(estimate_subclass(d, FittedModel::fit(d), 1, region({"0:0:"})));
  for (const char* key : {"class_index", "q_hat_w", "p_hat_w", "v_hat", "avar", "std_error", "ci", "in_region"}) {
    CHECK(j.contains(key));
  }
}
