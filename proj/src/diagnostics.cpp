#include "priorlift/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "priorlift/error.hpp"
#include "priorlift/numeric.hpp"

namespace priorlift {

namespace {

const ClassFit& converged_fit(const FittedModel& model, int class_index) {
  const ClassFit& fit = model.for_class(class_index);
  if (!fit.converged) {
    throw Error(ErrorCode::Convergence, "model for class " + std::to_string(class_index) + " has not converged");
  }
  return fit;
}

double mean(std::span<const double> values) {
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  return sum.value() / static_cast<double>(values.size());
}

}  // namespace

const char* to_string(Recommendation r) {
  switch (r) {
    case Recommendation::Useful: return "useful";
    case Recommendation::Marginal: return "marginal";
    case Recommendation::NotUseful: return "not-useful";
  }
  return "not-useful";
}

std::vector<double> fitted_probabilities(const Dataset& data, const Coefficients& c) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = g(design_row(data, i), c);
  return out;
}

EtaParts eta_from_probabilities(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorCode::InvalidDataset, "no fitted probabilities");
  EtaParts parts;
  parts.q_hat = mean(probabilities);
  parts.baseline_error = std::min(parts.q_hat, 1.0 - parts.q_hat);
  if (!(parts.baseline_error > 0.0)) {
    throw Error(ErrorCode::DegeneratePrior, "estimated prior is 0 or 1; eta is undefined");
  }
  CompensatedSum errors;
  for (double p : probabilities) errors.add(std::min(p, 1.0 - p));
  parts.misclassification_rate = errors.value() / static_cast<double>(probabilities.size());
  parts.raw = (parts.baseline_error - parts.misclassification_rate) / parts.baseline_error;
  parts.value = std::clamp(parts.raw, 0.0, 1.0);
  parts.clamped = parts.value != parts.raw;
  return parts;
}

double sigma_from_probabilities(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorCode::InvalidDataset, "no fitted probabilities");
  const double m = mean(probabilities);
  CompensatedSum squares;
  for (double p : probabilities) squares.add((p - m) * (p - m));
  return squares.value() / static_cast<double>(probabilities.size());
}

double eta(const Dataset& data, const FittedModel& model, int class_index) {
  const auto probs = fitted_probabilities(data, converged_fit(model, class_index).coefficients);
  return eta_from_probabilities(probs).value;
}

double sigma(const Dataset& data, const FittedModel& model, int class_index) {
  const auto probs = fitted_probabilities(data, converged_fit(model, class_index).coefficients);
  return sigma_from_probabilities(probs);
}

Recommendation recommend(double /*eta*/, double sigma, const Thresholds& thresholds) {
  if (!std::isfinite(sigma)) throw Error(ErrorCode::Range, "sigma must be finite");
  if (sigma >= thresholds.useful) return Recommendation::Useful;
  if (sigma >= thresholds.marginal) return Recommendation::Marginal;
  return Recommendation::NotUseful;
}

DiagnosticsReport diagnose(const Dataset& data, const FittedModel& model, int class_index,
                           const Thresholds& thresholds) {
  if (!(thresholds.marginal <= thresholds.useful)) {
    throw Error(ErrorCode::Config, "marginal threshold must not exceed the useful threshold");
  }
  const auto probs = fitted_probabilities(data, converged_fit(model, class_index).coefficients);
  const EtaParts parts = eta_from_probabilities(probs);
  DiagnosticsReport report;
  report.class_index = class_index;
  report.q_hat = parts.q_hat;
  report.baseline_error = parts.baseline_error;
  report.misclassification_rate = parts.misclassification_rate;
  report.eta = parts.value;
  report.eta_clamped = parts.clamped;
  report.sigma = sigma_from_probabilities(probs);
  report.thresholds = thresholds;
  report.recommendation = recommend(report.eta, report.sigma, thresholds);
  return report;
}

nlohmann::json to_json(const DiagnosticsReport& r) {
  return {{"class_index", r.class_index},
          {"q_hat", r.q_hat},
          {"eta", r.eta},
          {"eta_clamped", r.eta_clamped},
          {"baseline_error", r.baseline_error},
          {"misclassification_rate", r.misclassification_rate},
          {"sigma", r.sigma},
          {"recommendation", to_string(r.recommendation)},
          {"thresholds", {{"useful", r.thresholds.useful}, {"marginal", r.thresholds.marginal}}}};
}

}  // namespace priorlift
