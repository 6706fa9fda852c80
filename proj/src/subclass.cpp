#include "priorlift/subclass.hpp"

#include <cmath>
#include <sstream>

#include "plugin.hpp"
#include "priorlift/error.hpp"
#include "priorlift/numeric.hpp"
#include "priorlift/prior.hpp"

namespace priorlift {

namespace {

double parse_bound(std::string_view text, double unbounded, std::string_view whole) {
  if (text.empty()) return unbounded;
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  std::string copy(text);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (end != copy.c_str() + copy.size() || std::isnan(value)) {
    throw Error(ErrorCode::Config, "region '" + std::string(whole) + "': bad bound '" + copy + "'");
  }
  return value;
}

void validate(const IntervalConstraint& c) {
  if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper) {
    throw Error(ErrorCode::Config, "region constraint on feature " + std::to_string(c.feature) +
                                       " needs lower <= upper");
  }
}

}  // namespace

bool IntervalConstraint::contains(double x) const noexcept {
  const bool above = lower_closed ? x >= lower : x > lower;
  const bool below = upper_closed ? x <= upper : x < upper;
  return above && below;
}

IntervalConstraint IntervalConstraint::parse(std::string_view text) {
  const std::string_view whole = text;
  IntervalConstraint c;
  if (!text.empty() && (text.front() == '(' || text.front() == '[')) {
    c.lower_closed = text.front() == '[';
    text.remove_prefix(1);
  }
  if (!text.empty() && (text.back() == ')' || text.back() == ']')) {
    c.upper_closed = text.back() == ']';
    text.remove_suffix(1);
  }
  const std::size_t first = text.find(':');
  const std::size_t second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
    throw Error(ErrorCode::Config, "region '" + std::string(whole) + "' must look like idx:lo:hi");
  }
  const std::string index(text.substr(0, first));
  char* end = nullptr;
  const unsigned long feature = std::strtoul(index.c_str(), &end, 10);
  if (index.empty() || end != index.c_str() + index.size()) {
    throw Error(ErrorCode::Config, "region '" + std::string(whole) + "': bad feature index");
  }
  c.feature = feature;
  c.lower = parse_bound(text.substr(first + 1, second - first - 1),
                        -std::numeric_limits<double>::infinity(), whole);
  c.upper = parse_bound(text.substr(second + 1), std::numeric_limits<double>::infinity(), whole);
  validate(c);
  return c;
}

RegionPredicate RegionPredicate::intervals(std::vector<IntervalConstraint> constraints) {
  if (constraints.empty()) throw Error(ErrorCode::Config, "region needs at least one constraint");
  for (const auto& c : constraints) validate(c);
  RegionPredicate region;
  region.constraints_ = std::move(constraints);
  return region;
}

RegionPredicate RegionPredicate::membership(std::string name, Membership fn) {
  if (!fn) throw Error(ErrorCode::Config, "membership region needs a function");
  RegionPredicate region;
  region.name_ = std::move(name);
  region.fn_ = std::move(fn);
  return region;
}

RegionPredicate RegionPredicate::everything() { return intervals({IntervalConstraint{}}); }

bool RegionPredicate::contains(std::span<const double> x) const {
  if (fn_) return fn_(x);
  for (const auto& c : constraints_) {
    if (!c.contains(x[c.feature])) return false;
  }
  return true;
}

void RegionPredicate::check(const Dataset& data) const {
  for (const auto& c : constraints_) {
    if (c.feature >= data.feature_count()) {
      throw Error(ErrorCode::Shape, "region constrains feature " + std::to_string(c.feature) +
                                        " but the data has " + std::to_string(data.feature_count()));
    }
  }
}

std::string RegionPredicate::describe() const {
  if (fn_) return name_;
  std::ostringstream out;
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    const auto& c = constraints_[k];
    if (k) out << " & ";
    const bool lower = c.lower_closed && std::isfinite(c.lower);
    const bool upper = c.upper_closed && std::isfinite(c.upper);
    out << (lower ? '[' : '(') << format_number(c.lower, 17) << ", " << format_number(c.upper, 17)
        << (upper ? ']' : ')') << " on x" << c.feature;
  }
  return out.str();
}

SubclassEstimate estimate_subclass_at(const Dataset& data, int class_index, const Coefficients& c,
                                      const InfoMatrix& info, const RegionPredicate& region,
                                      double alpha) {
  data.check_class(class_index);
  region.check(data);
  critical_value(alpha);
  const auto moments = detail::plugin_moments(
      data, c, [&region](std::span<const double> x) { return region.contains(x); });
  if (moments.count == 0) {
    throw Error(ErrorCode::EmptyRegion, "no observations fall in region " + region.describe());
  }
  const Eigen::MatrixXd a_inv = invert_information(info);

  SubclassEstimate est;
  est.class_index = class_index;
  est.n = data.size();
  est.r = data.labeled();
  est.in_region = moments.count;
  est.q_hat_w = moments.sum / static_cast<double>(moments.count);
  est.p_hat_w = static_cast<double>(moments.count) / static_cast<double>(est.n);
  est.v_hat = moments.mean;
  est.var_w = moments.variance;
  const double inv_p2 = 1.0 / (est.p_hat_w * est.p_hat_w);
  est.var_term = inv_p2 * (est.var_w / static_cast<double>(est.n));
  est.sandwich_term =
      inv_p2 * (detail::quadratic_form(moments.gradient, a_inv) / static_cast<double>(est.r));
  est.avar = est.var_term + est.sandwich_term;
  est.std_error = std::sqrt(est.avar);
  est.alpha = alpha;
  attach_interval(est.q_hat_w, est.std_error, alpha, est.ci_lower, est.ci_upper);
  return est;
}

SubclassEstimate estimate_subclass(const Dataset& data, const FittedModel& model, int class_index,
                                   const RegionPredicate& region, double alpha) {
  const ClassFit& fit = model.for_class(class_index);
  if (!fit.converged) {
    throw Error(ErrorCode::Convergence, "model for class " + std::to_string(class_index) + " has not converged");
  }
  return estimate_subclass_at(data, class_index, fit.coefficients, fit.info, region, alpha);
}

SubclassEstimate classical_subclass(const Dataset& data, int class_index,
                                    const RegionPredicate& region, double alpha) {
  data.check_class(class_index);
  region.check(data);
  critical_value(alpha);
  std::size_t inside = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.labeled(); ++i) {
    if (!region.contains(data.features(i))) continue;
    ++inside;
    if (data.label(i) == class_index) ++hits;
  }
  if (inside == 0) {
    throw Error(ErrorCode::EmptyRegion, "no labeled observations fall in region " + region.describe());
  }
  SubclassEstimate est;
  est.class_index = class_index;
  est.n = data.size();
  est.r = data.labeled();
  est.in_region = inside;
  est.q_hat_w = static_cast<double>(hits) / static_cast<double>(inside);
  est.p_hat_w = static_cast<double>(inside) / static_cast<double>(est.r);
  est.v_hat = static_cast<double>(hits) / static_cast<double>(est.r);
  est.var_w = est.q_hat_w * (1.0 - est.q_hat_w);
  est.var_term = est.var_w / static_cast<double>(inside);
  est.sandwich_term = 0.0;
  est.avar = est.var_term;
  est.std_error = std::sqrt(est.avar);
  est.alpha = alpha;
  attach_interval(est.q_hat_w, est.std_error, alpha, est.ci_lower, est.ci_upper);
  return est;
}

nlohmann::json to_json(const SubclassEstimate& e) {
  return {{"class_index", e.class_index},
          {"n", e.n},
          {"r", e.r},
          {"in_region", e.in_region},
          {"q_hat_w", e.q_hat_w},
          {"p_hat_w", e.p_hat_w},
          {"v_hat", e.v_hat},
          {"var_w", e.var_w},
          {"var_term", e.var_term},
          {"sandwich_term", e.sandwich_term},
          {"avar", e.avar},
          {"std_error", e.std_error},
          {"alpha", e.alpha},
          {"ci", {e.ci_lower, e.ci_upper}}};
}

}  // namespace priorlift
