#pragma once

// Plug-in averages over all n observations shared by the prior and subclass
// estimators. Keeping one code path makes the full-space subclass estimate
// reproduce the prior estimate bit for bit.

#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "priorlift/dataset.hpp"
#include "priorlift/logistic.hpp"

namespace priorlift::detail {

struct PluginMoments {
  std::size_t n = 0;
  std::size_t count = 0;     // observations with I_W = 1
  double sum = 0.0;          // sum of g I_W
  double mean = 0.0;         // (1/n) sum g I_W
  double variance = 0.0;     // (1/n) sum (g I_W - mean)^2
  Eigen::VectorXd gradient;  // (1/n) sum g' I_W
};

using Membership = std::function<bool(std::span<const double>)>;

/// membership == nullptr means every observation is in the region.
PluginMoments plugin_moments(const Dataset& data, const Coefficients& c,
                             const Membership& membership = nullptr);

/// b^T A^{-1} b.
double quadratic_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& a_inv);

}  // namespace priorlift::detail
