#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "priorlift/dataset.hpp"

namespace priorlift {

/// One distinct feature vector v_k with its counts.
struct DiscreteCell {
  std::vector<double> value;
  std::size_t labeled = 0;                 // M_k
  std::size_t unlabeled = 0;               // N_k
  std::vector<std::size_t> class_counts;   // T_jk, one per class
};

/// Counts over the distinct feature values of a dataset. Every value must
/// occur among the labeled rows.
class DiscreteTable {
 public:
  /// Cells appear in order of first occurrence. Feature vectors match only
  /// when bitwise identical.
  static DiscreteTable tabulate(const Dataset& data);

  /// Validates M, N, T counts directly.
  static DiscreteTable from_cells(std::vector<DiscreteCell> cells, std::size_t class_count,
                                  std::vector<std::string> feature_names = {});

  const std::vector<DiscreteCell>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t labeled() const noexcept { return r_; }
  std::size_t class_count() const noexcept { return class_count_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  /// value columns, M, N, T_<j> per class.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<DiscreteCell> cells_;
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::size_t class_count_ = 0;
  std::vector<std::string> feature_names_;
};

struct DiscretePriorEstimate {
  int class_index = 0;
  std::size_t n = 0;
  double q_hat = 0.0;
  std::vector<double> p_hat;  // (M_k + N_k) / n
  std::vector<double> d_hat;  // T_jk / M_k
  double avar = 0.0;
  bool avar_floored = false;
  double std_error = 0.0;
  double alpha = 0.05;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

/// q = sum_k p_k d_jk and its variance
/// (1/n) [sum_k d_k^2 p_k (1 - p_k) - 2 sum_{k<s} d_k d_s p_k p_s],
/// both evaluated in exact rational arithmetic and rounded once. The
/// interval is clipped to [0, 1].
DiscretePriorEstimate estimate_discrete(const DiscreteTable& table, int class_index,
                                        double alpha = 0.05);

nlohmann::json to_json(const DiscretePriorEstimate& estimate);

}  // namespace priorlift
