#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace priorlift {

/// Maps a raw label cell to a binary class (class 1 when the rule holds).
/// With kind None the label column is categorical: each distinct value is
/// its own class.
struct LabelRule {
  enum class Kind { None, Less, LessEqual, Greater, GreaterEqual, Equal };

  Kind kind = Kind::None;
  std::string operand;

  /// Parses "le:9", "lt:9", "ge:14", "gt:0", "eq:tested_positive"; "" is None.
  static LabelRule parse(std::string_view text);
  std::string to_string() const;

  bool binary() const noexcept { return kind != Kind::None; }
  bool holds(std::string_view cell) const;
};

struct ColumnSpec {
  std::vector<std::string> features;
  std::string label;  // empty: no label column
  LabelRule rule;

  /// key=value lines: features=a,b  label=c  rule=le:9  ('#' starts a comment).
  static ColumnSpec from_config(std::istream& in);
  static ColumnSpec from_config_file(const std::string& path);
};

/// Named column presets for the three evaluation datasets.
ColumnSpec recipe(std::string_view name);
std::vector<std::string> recipe_names();

/// Feature matrix with optional class labels. Labeled observations always
/// occupy indices [0, labeled()); unlabeled ones follow. Immutable once built.
class Dataset {
 public:
  /// Builds a dataset from row-major features (labels.size() rows) and
  /// per-row labels (nullopt = unlabeled). Labeled rows are moved to the
  /// front, preserving relative order inside each partition. When every row
  /// is labeled the labels double as ground truth.
  static Dataset create(std::vector<double> features, std::size_t feature_count,
                        const std::vector<std::optional<int>>& labels,
                        std::size_t class_count,
                        std::vector<std::string> feature_names = {},
                        std::vector<std::string> class_names = {});

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t labeled() const noexcept { return labeled_; }
  std::size_t unlabeled() const noexcept { return size() - labeled_; }
  std::size_t feature_count() const noexcept { return feature_count_; }
  std::size_t class_count() const noexcept { return class_count_; }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * feature_count_, feature_count_};
  }
  const std::vector<double>& feature_matrix() const noexcept { return features_; }

  /// Class of labeled observation i (i < labeled()).
  int label(std::size_t i) const;
  /// Y_i^(j) for labeled observation i.
  double indicator(std::size_t i, int class_index) const {
    return label(i) == class_index ? 1.0 : 0.0;
  }

  /// Ground-truth class of every row, kept when labels are stripped.
  bool has_truth() const noexcept { return !truth_.empty(); }
  int truth(std::size_t i) const;

  /// Count of labeled observations in class j.
  std::size_t labeled_count(int class_index) const;

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }

  void check_class(int class_index) const;

  /// Internal constructor used by partition(); labels/truth already canonical.
  Dataset(std::vector<double> features, std::size_t feature_count,
          std::vector<int> labels, std::size_t labeled, std::vector<int> truth,
          std::size_t class_count, std::vector<std::string> feature_names,
          std::vector<std::string> class_names);

 private:
  std::vector<double> features_;
  std::size_t feature_count_ = 0;
  std::vector<int> labels_;  // -1 for unlabeled rows
  std::size_t labeled_ = 0;
  std::vector<int> truth_;
  std::size_t class_count_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
};

Dataset parse_csv(std::istream& in, const ColumnSpec& spec,
                  std::string_view source = "<stream>");
Dataset load_csv(const std::string& path, const ColumnSpec& spec);

/// Writes features (17 significant digits) and a "label" column holding the
/// class name, empty for unlabeled rows.
void write_csv(const Dataset& data, std::ostream& out);

/// Keeps labels on a uniformly random subset of size r of a fully labeled
/// dataset; the other rows become unlabeled. Deterministic in seed.
Dataset partition(const Dataset& data, std::size_t r, std::uint64_t seed);

}  // namespace priorlift
