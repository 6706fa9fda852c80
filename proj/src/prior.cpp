#include "priorlift/prior.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "plugin.hpp"
#include "priorlift/error.hpp"
#include "priorlift/numeric.hpp"

namespace priorlift {

namespace detail {

PluginMoments plugin_moments(const Dataset& data, const Coefficients& c,
                             const Membership& membership) {
  const std::size_t n = data.size();
  PluginMoments out;
  out.n = n;
  std::vector<double> values(n, 0.0);
  CompensatedSum sum;
  CompensatedVector gradient(c.theta.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (membership && !membership(data.features(i))) continue;
    const Eigen::VectorXd t = design_row(data, i);
    values[i] = g(t, c);
    sum.add(values[i]);
    gradient.add(g_prime(t, c));
    ++out.count;
  }
  const double nd = static_cast<double>(n);
  out.sum = sum.value();
  out.mean = out.sum / nd;
  CompensatedSum squares;
  for (double v : values) squares.add((v - out.mean) * (v - out.mean));
  out.variance = squares.value() / nd;
  out.gradient = gradient.value() / nd;
  return out;
}

double quadratic_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& a_inv) {
  return std::max(0.0, b.dot(a_inv * b));
}

}  // namespace detail

Eigen::MatrixXd invert_information(const InfoMatrix& info) {
  const Eigen::MatrixXd& a = info.value;
  if (a.rows() == 0 || a.rows() != a.cols() || !a.allFinite()) {
    throw Error(ErrorCode::SingularInformation, "information matrix is empty, non-square or non-finite");
  }
  Eigen::LLT<Eigen::MatrixXd> chol(a);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInformation, "information matrix is not positive definite");
  }
  const auto p = a.rows();
  Eigen::MatrixXd inverse = chol.solve(Eigen::MatrixXd::Identity(p, p));
  inverse = 0.5 * (inverse + inverse.transpose());
  const double residual = (inverse * a - Eigen::MatrixXd::Identity(p, p)).lpNorm<Eigen::Infinity>();
  if (!inverse.allFinite() || residual > 1e-6) {
    throw Error(ErrorCode::SingularInformation,
                "information matrix is numerically singular (inverse residual " +
                    format_number(residual, 3) + ")");
  }
  return inverse;
}

InfluenceComponents influence_components(const Dataset& data, const Coefficients& c,
                                         const InfoMatrix& info) {
  return {detail::plugin_moments(data, c).gradient, invert_information(info)};
}

void attach_interval(double q_hat, double std_error, double alpha, double& lower, double& upper) {
  const double z = critical_value(alpha);
  lower = q_hat - z * std_error;
  upper = q_hat + z * std_error;
}

PriorEstimate estimate_prior_at(const Dataset& data, int class_index, const Coefficients& c,
                                const InfoMatrix& info, double alpha) {
  data.check_class(class_index);
  critical_value(alpha);
  const Eigen::MatrixXd a_inv = invert_information(info);
  const auto moments = detail::plugin_moments(data, c);

  PriorEstimate est;
  est.class_index = class_index;
  est.n = data.size();
  est.r = data.labeled();
  est.q_hat = moments.mean;
  est.var_g = moments.variance;
  est.var_g_term = est.var_g / static_cast<double>(est.n);
  est.sandwich_term = detail::quadratic_form(moments.gradient, a_inv) / static_cast<double>(est.r);
  est.avar = est.var_g_term + est.sandwich_term;
  est.std_error = std::sqrt(est.avar);
  est.alpha = alpha;
  attach_interval(est.q_hat, est.std_error, alpha, est.ci_lower, est.ci_upper);
  return est;
}

PriorEstimate estimate_prior(const Dataset& data, const ClassFit& fit, double alpha) {
  if (!fit.converged) {
    throw Error(ErrorCode::Convergence,
                "model for class " + std::to_string(fit.class_index) + " has not converged");
  }
  return estimate_prior_at(data, fit.class_index, fit.coefficients, fit.info, alpha);
}

PriorEstimate estimate_prior(const Dataset& data, const FittedModel& model, int class_index,
                             double alpha) {
  return estimate_prior(data, model.for_class(class_index), alpha);
}

PriorEstimate classical_prior(const Dataset& data, int class_index, double alpha) {
  data.check_class(class_index);
  PriorEstimate est;
  est.class_index = class_index;
  est.n = data.size();
  est.r = data.labeled();
  // Integer count over r: a single correctly rounded division.
  est.q_hat = static_cast<double>(data.labeled_count(class_index)) / static_cast<double>(est.r);
  est.var_g = est.q_hat * (1.0 - est.q_hat);
  est.var_g_term = est.var_g / static_cast<double>(est.r);
  est.sandwich_term = 0.0;
  est.avar = est.var_g_term;
  est.std_error = std::sqrt(est.avar);
  est.alpha = alpha;
  attach_interval(est.q_hat, est.std_error, alpha, est.ci_lower, est.ci_upper);
  return est;
}

double variance_reduction(const PriorEstimate& estimate) {
  const auto r = static_cast<double>(estimate.r);
  const auto n = static_cast<double>(estimate.n);
  return (1.0 / r - 1.0 / n) * estimate.var_g;
}

double variance_reduction(const PriorEstimate& estimate, const Dataset& data) {
  if (estimate.n != data.size() || estimate.r != data.labeled()) {
    throw Error(ErrorCode::Shape, "estimate was computed on a different dataset");
  }
  return variance_reduction(estimate);
}

double labeled_only_avar(const PriorEstimate& estimate) {
  return estimate.var_g / static_cast<double>(estimate.r) + estimate.sandwich_term;
}

nlohmann::json to_json(const PriorEstimate& e) {
  return {{"class_index", e.class_index},
          {"n", e.n},
          {"r", e.r},
          {"q_hat", e.q_hat},
          {"var_g", e.var_g},
          {"var_g_term", e.var_g_term},
          {"sandwich_term", e.sandwich_term},
          {"avar", e.avar},
          {"std_error", e.std_error},
          {"alpha", e.alpha},
          {"ci", {e.ci_lower, e.ci_upper}}};
}

}  // namespace priorlift
