#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "priorlift/dataset.hpp"
#include "priorlift/logistic.hpp"

namespace priorlift {

/// lower <= x_feature <= upper with configurable endpoint inclusion.
/// Default is closed below, open above, so adjacent intervals tile the line.
struct IntervalConstraint {
  std::size_t feature = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool lower_closed = true;
  bool upper_closed = false;

  bool contains(double x) const noexcept;

  /// "idx:lo:hi"; an empty bound is unbounded on that side. "idx:lo:hi]"
  /// closes the upper end, "(idx:lo:hi" opens the lower one.
  static IntervalConstraint parse(std::string_view text);
};

/// The region W: a conjunction of interval constraints, or a named
/// membership function.
class RegionPredicate {
 public:
  using Membership = std::function<bool(std::span<const double>)>;

  static RegionPredicate intervals(std::vector<IntervalConstraint> constraints);
  static RegionPredicate membership(std::string name, Membership fn);
  /// One unbounded constraint on feature 0: every observation is inside.
  static RegionPredicate everything();

  bool contains(std::span<const double> x) const;
  const std::vector<IntervalConstraint>& constraints() const noexcept { return constraints_; }
  std::string describe() const;

  /// Throws Shape if a constraint references a feature the data lacks.
  void check(const Dataset& data) const;

 private:
  std::vector<IntervalConstraint> constraints_;
  std::string name_;
  Membership fn_;
};

struct SubclassEstimate {
  int class_index = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t in_region = 0;  // observations with I_W = 1 in the sample used
  double q_hat_w = 0.0;
  double p_hat_w = 0.0;
  double v_hat = 0.0;
  double var_w = 0.0;          // sample variance of g I_W (divisor n)
  double var_term = 0.0;       // var_w / (n p^2)
  double sandwich_term = 0.0;  // C^T A^{-1} C / (r p^2)
  double avar = 0.0;
  double std_error = 0.0;
  double alpha = 0.05;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// q_{j,W} = sum g I_W / sum I_W over all n observations.
SubclassEstimate estimate_subclass(const Dataset& data, const FittedModel& model, int class_index,
                                   const RegionPredicate& region, double alpha = 0.05);
SubclassEstimate estimate_subclass_at(const Dataset& data, int class_index, const Coefficients& c,
                                      const InfoMatrix& info, const RegionPredicate& region,
                                      double alpha = 0.05);

/// Labeled-only ratio sum_{i<=r} I_W Y / sum_{i<=r} I_W with binomial variance
/// over the labeled in-region count.
SubclassEstimate classical_subclass(const Dataset& data, int class_index,
                                    const RegionPredicate& region, double alpha = 0.05);

nlohmann::json to_json(const SubclassEstimate& estimate);

}  // namespace priorlift
