#include "priorlift/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "priorlift/numeric.hpp"

namespace priorlift {

namespace {

void check_dims(const Eigen::VectorXd& t, const Coefficients& c) {
  if (t.size() != c.theta.size()) {
    throw Error(ErrorCode::Shape, "feature vector has " + std::to_string(t.size()) +
                                      " components, coefficients have " +
                                      std::to_string(c.theta.size()));
  }
}

double clamp_probability(double p) noexcept {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

struct Evaluation {
  Eigen::VectorXd score;    // sum of w (y - g) g'
  Eigen::MatrixXd hessian;  // sum of g (1 - g) t t^T
  double deviance = 0.0;
  double score_norm = 0.0;
};

Evaluation evaluate(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& theta) {
  const Eigen::Index p = design.cols();
  CompensatedVector score(p);
  CompensatedMatrix hessian(p);
  CompensatedSum deviance;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const Eigen::VectorXd t = design.row(i).transpose();
    const double prob = logistic(t.dot(theta));
    const double variance = prob * (1.0 - prob);
    const Eigen::VectorXd grad = variance * t;
    score.add(weight_from_probability(prob) * (y[i] - prob) * grad);
    hessian.add_outer(variance, t);
    const double clamped = clamp_probability(prob);
    deviance.add(-2.0 * (y[i] * std::log(clamped) + (1.0 - y[i]) * std::log1p(-clamped)));
  }
  Evaluation out;
  out.score = score.value();
  out.hessian = hessian.value();
  out.deviance = deviance.value();
  out.score_norm = out.score.lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace

double logistic(double eta) noexcept {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

Eigen::VectorXd design_row(const Dataset& data, std::size_t i) {
  const auto x = data.features(i);
  Eigen::VectorXd t(static_cast<Eigen::Index>(x.size()) + 1);
  t[0] = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) t[static_cast<Eigen::Index>(k) + 1] = x[k];
  return t;
}

double g(std::span<const double> t, const Coefficients& c) {
  return g(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size())), c);
}

double g(const Eigen::VectorXd& t, const Coefficients& c) {
  check_dims(t, c);
  return logistic(t.dot(c.theta));
}

Eigen::VectorXd g_prime(const Eigen::VectorXd& t, const Coefficients& c) {
  const double prob = g(t, c);
  return (prob * (1.0 - prob)) * t;
}

double weight_from_probability(double p) noexcept {
  const double clamped = clamp_probability(p);
  return 1.0 / (clamped * (1.0 - clamped));
}

double weight(const Eigen::VectorXd& t, const Coefficients& c) {
  return weight_from_probability(g(t, c));
}

Eigen::VectorXd score(const Dataset& data, int class_index, const Coefficients& c) {
  data.check_class(class_index);
  CompensatedVector sum(c.theta.size());
  for (std::size_t i = 0; i < data.labeled(); ++i) {
    const Eigen::VectorXd t = design_row(data, i);
    const double prob = g(t, c);
    sum.add(weight_from_probability(prob) * (data.indicator(i, class_index) - prob) * g_prime(t, c));
  }
  return sum.value();
}

InfoMatrix information(const Dataset& data, const Coefficients& c) {
  CompensatedMatrix sum(c.theta.size());
  for (std::size_t i = 0; i < data.labeled(); ++i) {
    const Eigen::VectorXd t = design_row(data, i);
    sum.add_outer(weight(t, c), g_prime(t, c));
  }
  return {sum.value() / static_cast<double>(data.labeled())};
}

ClassFit fit_class(const Dataset& data, int class_index, const FitOptions& options) {
  data.check_class(class_index);
  const std::size_t r = data.labeled();
  const std::size_t in_class = data.labeled_count(class_index);
  if (in_class == 0 || in_class == r) {
    throw Error(ErrorCode::DegenerateClass,
                "class " + std::to_string(class_index) + " is constant among the " +
                    std::to_string(r) + " labeled observations");
  }

  const auto p = static_cast<Eigen::Index>(data.feature_count() + 1);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(r), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(r));
  for (std::size_t i = 0; i < r; ++i) {
    design.row(static_cast<Eigen::Index>(i)) = design_row(data, i).transpose();
    y[static_cast<Eigen::Index>(i)] = data.indicator(i, class_index);
  }
  if (static_cast<Eigen::Index>(r) < p || design.colPivHouseholderQr().rank() < p) {
    throw Error(ErrorCode::SingularDesign, "labeled design matrix does not have full column rank");
  }

  ClassFit fit;
  fit.class_index = class_index;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Evaluation current = evaluate(design, y, theta);
  int stalled = 0;

  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    if (current.score_norm <= options.score_tolerance) {
      fit.converged = true;
      break;
    }
    fit.iterations = iteration;
    Eigen::LDLT<Eigen::MatrixXd> solver(current.hessian);
    if (solver.info() != Eigen::Success || !solver.isPositive()) break;
    // The Newton direction solves H d = sum (y - g) t; the weighted score
    // equals that sum up to clamping.
    Eigen::VectorXd step = solver.solve(current.score);
    if (!step.allFinite()) break;

    Evaluation next = evaluate(design, y, theta + step);
    int halvings = 0;
    const double slack = 1e-12 * (std::abs(current.deviance) + 1.0);
    while ((!std::isfinite(next.deviance) || next.deviance > current.deviance + slack) &&
           halvings < options.max_step_halvings) {
      step *= 0.5;
      ++halvings;
      next = evaluate(design, y, theta + step);
    }

    const double relative_change =
        std::abs(current.deviance - next.deviance) / (std::abs(next.deviance) + 0.1);
    const bool score_dropped = next.score_norm < current.score_norm;
    theta += step;
    current = std::move(next);
    fit.trace.push_back({iteration, current.deviance, current.score_norm, halvings});

    if (theta.norm() > options.separation_norm && score_dropped) fit.separation_warning = true;
    // Tiny deviance change with no score progress means Newton has stalled.
    stalled = (relative_change <= options.deviance_tolerance && !score_dropped) ? stalled + 1 : 0;
    if (stalled >= 2) break;
  }
  if (!fit.converged && current.score_norm <= options.score_tolerance) fit.converged = true;

  fit.coefficients = {theta};
  fit.deviance = current.deviance;
  fit.score_norm = score(data, class_index, fit.coefficients).lpNorm<Eigen::Infinity>();
  if (!fit.converged || fit.score_norm > options.score_tolerance) {
    throw ConvergenceError("IRLS for class " + std::to_string(class_index) +
                               " did not reach score tolerance after " +
                               std::to_string(fit.iterations) + " iterations (score norm " +
                               format_number(current.score_norm, 6) + ")",
                           fit.trace);
  }
  fit.info = information(data, fit.coefficients);
  return fit;
}

FittedModel FittedModel::fit(const Dataset& data, const FitOptions& options) {
  std::vector<int> classes(data.class_count());
  for (std::size_t j = 0; j < classes.size(); ++j) classes[j] = static_cast<int>(j);
  return fit(data, classes, options);
}

FittedModel FittedModel::fit(const Dataset& data, const std::vector<int>& classes,
                             const FitOptions& options) {
  std::vector<ClassFit> fits;
  fits.reserve(classes.size());
  for (int j : classes) fits.push_back(fit_class(data, j, options));
  return FittedModel(std::move(fits));
}

const ClassFit& FittedModel::for_class(int class_index) const {
  for (const auto& f : fits_) {
    if (f.class_index == class_index) return f;
  }
  throw Error(ErrorCode::Range, "model has no fit for class " + std::to_string(class_index));
}

nlohmann::json to_json(const ClassFit& fit) {
  nlohmann::json theta = nlohmann::json::array();
  for (Eigen::Index k = 0; k < fit.coefficients.theta.size(); ++k) theta.push_back(fit.coefficients.theta[k]);
  nlohmann::json info = nlohmann::json::array();
  for (Eigen::Index row = 0; row < fit.info.value.rows(); ++row) {
    nlohmann::json line = nlohmann::json::array();
    for (Eigen::Index col = 0; col < fit.info.value.cols(); ++col) line.push_back(fit.info.value(row, col));
    info.push_back(std::move(line));
  }
  return {{"class_index", fit.class_index},
          {"theta", std::move(theta)},
          {"info_matrix", std::move(info)},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"score_norm", fit.score_norm},
          {"separation_warning", fit.separation_warning}};
}

}  // namespace priorlift
