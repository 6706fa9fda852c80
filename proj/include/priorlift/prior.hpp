#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "json.hpp"
#include "priorlift/dataset.hpp"
#include "priorlift/logistic.hpp"

namespace priorlift {

/// Point estimate of q_j with its asymptotic variance split into the
/// feature-sampling piece and the coefficient-uncertainty piece.
struct PriorEstimate {
  int class_index = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  double q_hat = 0.0;
  double var_g = 0.0;          // (1/n) sum (g_i - q_hat)^2
  double var_g_term = 0.0;     // var_g / n
  double sandwich_term = 0.0;  // (1/r) B^T A^{-1} B
  double avar = 0.0;
  double std_error = 0.0;
  double alpha = 0.05;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// B_j and the inverse information matrix.
struct InfluenceComponents {
  Eigen::VectorXd b;
  Eigen::MatrixXd a_inv;
};

/// Inverts a symmetric positive-definite information matrix by Cholesky.
/// Throws SingularInformation when it is not positive definite.
Eigen::MatrixXd invert_information(const InfoMatrix& info);

/// (1/n) sum over all observations of g'(X_i, theta), paired with A^{-1}.
InfluenceComponents influence_components(const Dataset& data, const Coefficients& c,
                                         const InfoMatrix& info);

/// Semi-supervised estimate from a converged fit for class j.
PriorEstimate estimate_prior(const Dataset& data, const FittedModel& model, int class_index,
                             double alpha = 0.05);
PriorEstimate estimate_prior(const Dataset& data, const ClassFit& fit, double alpha = 0.05);

/// Same computation at caller-supplied coefficients, skipping the
/// convergence check (used to evaluate the estimator at a fixed theta).
PriorEstimate estimate_prior_at(const Dataset& data, int class_index, const Coefficients& c,
                                const InfoMatrix& info, double alpha = 0.05);

/// Labeled-only class proportion with binomial variance q(1-q)/r.
PriorEstimate classical_prior(const Dataset& data, int class_index, double alpha = 0.05);

/// (1/r - 1/n) * var_g: how much the unlabeled rows shrink the asymptotic
/// variance relative to the same plug-in computed with n = r.
double variance_reduction(const PriorEstimate& estimate, const Dataset& data);
double variance_reduction(const PriorEstimate& estimate);

/// The plug-in's asymptotic variance had only the r labeled rows been used:
/// (1/r) [var_g + B^T A^{-1} B].
double labeled_only_avar(const PriorEstimate& estimate);

/// Normal-theory interval q -/+ z_{alpha/2} se.
void attach_interval(double q_hat, double std_error, double alpha, double& lower, double& upper);

nlohmann::json to_json(const PriorEstimate& estimate);

}  // namespace priorlift
