#pragma once

#include <span>
#include <string>

#include "json.hpp"
#include "priorlift/dataset.hpp"
#include "priorlift/logistic.hpp"

namespace priorlift {

enum class Recommendation { Useful, Marginal, NotUseful };

const char* to_string(Recommendation r);

/// Cut points on sigma: useful at or above `useful`, marginal at or above
/// `marginal`, otherwise not useful.
struct Thresholds {
  double useful = 0.03;
  double marginal = 0.01;
};

struct DiagnosticsReport {
  int class_index = 0;
  double q_hat = 0.0;
  double baseline_error = 0.0;         // min(q, 1 - q)
  double misclassification_rate = 0.0; // (1/n) sum min(g_i, 1 - g_i)
  double eta = 0.0;
  bool eta_clamped = false;
  double sigma = 0.0;
  Recommendation recommendation = Recommendation::NotUseful;
  Thresholds thresholds;
};

/// Plug-in eta and its ingredients from fitted probabilities g_i.
struct EtaParts {
  double q_hat = 0.0;
  double baseline_error = 0.0;
  double misclassification_rate = 0.0;
  double raw = 0.0;      // before clamping
  double value = 0.0;    // clamped to [0, 1]
  bool clamped = false;
};
EtaParts eta_from_probabilities(std::span<const double> probabilities);

/// (1/n) sum (g_i - mean g)^2.
double sigma_from_probabilities(std::span<const double> probabilities);

/// g(X_i, theta_j) for every observation.
std::vector<double> fitted_probabilities(const Dataset& data, const Coefficients& c);

double eta(const Dataset& data, const FittedModel& model, int class_index);
double sigma(const Dataset& data, const FittedModel& model, int class_index);

Recommendation recommend(double eta, double sigma, const Thresholds& thresholds = {});

DiagnosticsReport diagnose(const Dataset& data, const FittedModel& model, int class_index,
                           const Thresholds& thresholds = {});

nlohmann::json to_json(const DiagnosticsReport& report);

}  // namespace priorlift
