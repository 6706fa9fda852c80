#include "priorlift/numeric.hpp"

#include <cstdio>
#include <numbers>

#include "priorlift/error.hpp"

namespace priorlift {

namespace {

void neumaier(double& sum, double& carry, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    carry += (sum - t) + x;
  } else {
    carry += (x - t) + sum;
  }
  sum = t;
}

// Acklam's rational approximation for the lower half, p in (0, 0.5].
double quantile_lower_half(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // One Halley step on Phi(x) - p.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

void CompensatedVector::add(const Eigen::VectorXd& x) {
  for (Eigen::Index k = 0; k < x.size(); ++k) neumaier(sum_[k], carry_[k], x[k]);
}

void CompensatedMatrix::add_outer(double scale, const Eigen::VectorXd& x) {
  const Eigen::Index p = x.size();
  for (Eigen::Index col = 0; col < p; ++col) {
    for (Eigen::Index row = col; row < p; ++row) {
      neumaier(sum_(row, col), carry_(row, col), scale * x[row] * x[col]);
    }
  }
}

Eigen::MatrixXd CompensatedMatrix::value() const {
  Eigen::MatrixXd out = sum_ + carry_;
  for (Eigen::Index col = 0; col < out.cols(); ++col) {
    for (Eigen::Index row = 0; row < col; ++row) out(row, col) = out(col, row);
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::Range, "normal_quantile: probability must lie in (0, 1)");
  }
  if (p > 0.5) return -quantile_lower_half(1.0 - p);
  return quantile_lower_half(p);
}

double critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::Config, "alpha must lie in (0, 1)");
  }
  return -normal_quantile(0.5 * alpha);
}

std::string format_number(double value, int significant_digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
  return buf;
}

}  // namespace priorlift
