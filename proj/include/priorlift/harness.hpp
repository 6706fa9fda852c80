#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "priorlift/dataset.hpp"

namespace priorlift {

/// One (r, n - r) point of the evaluation grid.
struct GridCell {
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;

  std::size_t subsample_size() const noexcept { return labeled + unlabeled; }
};

/// Estimates q_j from a subsample whose first `labeled()` rows carry labels.
/// Throwing marks the replicate as failed.
using Estimator = std::function<double(const Dataset& subsample, int class_index)>;

struct SubsampleConfig {
  std::size_t replicates = 1000;
  std::vector<GridCell> grid;
  std::uint64_t seed = 1;
  bool semi_supervised = true;
  bool classical = true;
  /// 0 defers to PRIOR_LIFT_THREADS, then hardware concurrency.
  unsigned threads = 0;
  /// Overrides for the two estimators; empty means the built-in ones.
  Estimator semi_estimator;
  Estimator classical_estimator;
};

struct CurveRecord {
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  double mse_semi = 0.0;
  double mse_classical = 0.0;
  double ratio = 0.0;            // NaN when undefined
  bool ratio_defined = false;
  std::size_t replicates_used = 0;
  std::size_t failures = 0;
  bool valid = true;             // false when every replicate failed
};

struct MseCurve {
  int class_index = 0;
  std::size_t population_size = 0;  // h
  double target = 0.0;              // full-sample class proportion
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t smoothing_window = 1;
  std::vector<CurveRecord> records;
};

/// Default semi-supervised estimator: IRLS fit on the labeled rows, then the
/// mean fitted probability over every row. Fits with a separation warning
/// count as failures.
double semi_supervised_estimate(const Dataset& subsample, int class_index);
/// Labeled class proportion.
double classical_estimate(const Dataset& subsample, int class_index);

/// Subsample-MSE comparison of the two estimators over every grid cell.
/// Subsamples are drawn without replacement; the first r draws keep their
/// labels. The result does not depend on the thread count.
MseCurve run_grid(const Dataset& data, int class_index, const SubsampleConfig& config);

/// Centered moving average of the ratios along each fixed-r slice (ordered
/// by n - r), truncating the window at slice ends. A window longer than the
/// slice yields the slice mean everywhere. Undefined ratios are skipped.
MseCurve smooth_curve(const MseCurve& curve, std::size_t window);

/// "100,200x0,250,500" (cartesian product r-list x (n-r)-list) or
/// "100:0;100:250" (explicit cells).
std::vector<GridCell> parse_grid(std::string_view text);

/// A grid that fits inside a population of size h.
std::vector<GridCell> default_grid(std::size_t population_size);

/// requested > 0 wins; otherwise the PRIOR_LIFT_THREADS environment
/// variable, then hardware concurrency.
unsigned resolve_thread_count(unsigned requested);

void write_csv(const MseCurve& curve, std::ostream& out);
nlohmann::json to_json(const MseCurve& curve);

}  // namespace priorlift
