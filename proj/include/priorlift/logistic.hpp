#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "priorlift/dataset.hpp"
#include "priorlift/error.hpp"

namespace priorlift {

/// theta_j, intercept first.
struct Coefficients {
  Eigen::VectorXd theta;
};

/// Sample information matrix (1/r) sum_{i<=r} w g' g'^T.
struct InfoMatrix {
  Eigen::MatrixXd value;
};

/// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
/// inside the weight and the deviance.
inline constexpr double kProbabilityClamp = 1e-10;

/// 1 / (1 + exp(-eta)), evaluated without overflow for any finite eta.
double logistic(double eta) noexcept;

/// (1, x_1, ..., x_f) for observation i.
Eigen::VectorXd design_row(const Dataset& data, std::size_t i);

/// t includes the leading constant component.
double g(std::span<const double> t, const Coefficients& c);
double g(const Eigen::VectorXd& t, const Coefficients& c);
Eigen::VectorXd g_prime(const Eigen::VectorXd& t, const Coefficients& c);
double weight(const Eigen::VectorXd& t, const Coefficients& c);
double weight_from_probability(double p) noexcept;

struct FitOptions {
  int max_iterations = 50;
  double score_tolerance = 1e-8;
  double deviance_tolerance = 1e-10;
  int max_step_halvings = 20;
  double separation_norm = 1e4;
};

struct ClassFit {
  int class_index = 0;
  Coefficients coefficients;
  InfoMatrix info;
  int iterations = 0;
  bool converged = false;
  double score_norm = 0.0;  // sup-norm of the estimating-equation sum
  double deviance = 0.0;
  bool separation_warning = false;
  std::vector<IterationTrace> trace;
};

/// Sum over labeled rows of w (Y^(j) - g) g'.
Eigen::VectorXd score(const Dataset& data, int class_index, const Coefficients& c);

/// (1/r) sum over labeled rows of w g' g'^T.
InfoMatrix information(const Dataset& data, const Coefficients& c);

/// Solves the weighted score equation for class j on the labeled rows by
/// Newton/IRLS from theta = 0, halving steps that raise the deviance.
///
/// Throws DegenerateClass when every labeled row is (or none is) in class j,
/// SingularDesign when the labeled design is rank deficient, and
/// ConvergenceError (with the iteration trace) when the score has not
/// reached tolerance after max_iterations.
ClassFit fit_class(const Dataset& data, int class_index, const FitOptions& options = {});

/// One-vs-rest fits, one per class.
class FittedModel {
 public:
  FittedModel() = default;
  explicit FittedModel(std::vector<ClassFit> fits) : fits_(std::move(fits)) {}

  /// Fits every class (or the listed ones) independently.
  static FittedModel fit(const Dataset& data, const FitOptions& options = {});
  static FittedModel fit(const Dataset& data, const std::vector<int>& classes,
                         const FitOptions& options = {});

  const ClassFit& for_class(int class_index) const;
  const std::vector<ClassFit>& fits() const noexcept { return fits_; }

 private:
  std::vector<ClassFit> fits_;
};

nlohmann::json to_json(const ClassFit& fit);

}  // namespace priorlift
