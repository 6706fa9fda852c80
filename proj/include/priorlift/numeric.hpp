#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

namespace priorlift {

/// Neumaier-compensated running sum. Accumulation order is the caller's
/// iteration order, so identical inputs in identical order give identical bits.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Element-wise compensated accumulation for vectors and matrices.
class CompensatedVector {
 public:
  explicit CompensatedVector(Eigen::Index size)
      : sum_(Eigen::VectorXd::Zero(size)), carry_(Eigen::VectorXd::Zero(size)) {}

  void add(const Eigen::VectorXd& x);
  Eigen::VectorXd value() const { return sum_ + carry_; }

 private:
  Eigen::VectorXd sum_;
  Eigen::VectorXd carry_;
};

class CompensatedMatrix {
 public:
  explicit CompensatedMatrix(Eigen::Index size)
      : sum_(Eigen::MatrixXd::Zero(size, size)),
        carry_(Eigen::MatrixXd::Zero(size, size)) {}

  /// Adds scale * x x^T, touching the lower triangle only; value() mirrors it.
  void add_outer(double scale, const Eigen::VectorXd& x);
  Eigen::MatrixXd value() const;

 private:
  Eigen::MatrixXd sum_;
  Eigen::MatrixXd carry_;
};

/// Standard normal distribution function.
double normal_cdf(double x);

/// Inverse of the standard normal distribution function, p in (0, 1).
/// Rational approximation refined by one Halley step; absolute error is
/// below 1e-12 over (1e-300, 1 - 1e-16).
double normal_quantile(double p);

/// Two-sided critical value z with P(|Z| > z) = alpha.
double critical_value(double alpha);

/// printf-style %.{digits}g rendering.
std::string format_number(double value, int significant_digits);

}  // namespace priorlift
