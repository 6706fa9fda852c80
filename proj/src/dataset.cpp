#include "priorlift/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "priorlift/error.hpp"
#include "priorlift/numeric.hpp"
#include "priorlift/rng.hpp"

namespace priorlift {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// One RFC-4180 record; returns false at end of input. Quoted fields may span
// lines and use "" for a literal quote.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++line;
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": unterminated quoted field");
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

// ---------------------------------------------------------------- LabelRule

LabelRule LabelRule::parse(std::string_view text) {
  text = trim(text);
  LabelRule rule;
  if (text.empty() || text == "none") return rule;
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::Config, "label rule '" + std::string(text) + "' must look like op:value");
  }
  const auto op = text.substr(0, colon);
  rule.operand = std::string(trim(text.substr(colon + 1)));
  if (op == "lt") {
    rule.kind = Kind::Less;
  } else if (op == "le") {
    rule.kind = Kind::LessEqual;
  } else if (op == "gt") {
    rule.kind = Kind::Greater;
  } else if (op == "ge") {
    rule.kind = Kind::GreaterEqual;
  } else if (op == "eq") {
    rule.kind = Kind::Equal;
  } else {
    throw Error(ErrorCode::Config, "unknown label rule operator '" + std::string(op) + "'");
  }
  if (rule.kind != Kind::Equal && !parse_number(rule.operand)) {
    throw Error(ErrorCode::Config, "label rule threshold '" + rule.operand + "' is not numeric");
  }
  return rule;
}

std::string LabelRule::to_string() const {
  switch (kind) {
    case Kind::None: return "";
    case Kind::Less: return "lt:" + operand;
    case Kind::LessEqual: return "le:" + operand;
    case Kind::Greater: return "gt:" + operand;
    case Kind::GreaterEqual: return "ge:" + operand;
    case Kind::Equal: return "eq:" + operand;
  }
  return "";
}

bool LabelRule::holds(std::string_view cell) const {
  cell = trim(cell);
  if (kind == Kind::Equal) {
    const auto lhs = parse_number(cell);
    const auto rhs = parse_number(operand);
    if (lhs && rhs) return *lhs == *rhs;
    return cell == operand;
  }
  const auto value = parse_number(cell);
  if (!value) {
    throw Error(ErrorCode::Parse, "label value '" + std::string(cell) + "' is not numeric");
  }
  const double threshold = *parse_number(operand);
  switch (kind) {
    case Kind::Less: return *value < threshold;
    case Kind::LessEqual: return *value <= threshold;
    case Kind::Greater: return *value > threshold;
    case Kind::GreaterEqual: return *value >= threshold;
    default: return false;
  }
}

// --------------------------------------------------------------- ColumnSpec

ColumnSpec ColumnSpec::from_config(std::istream& in) {
  ColumnSpec spec;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::Config, "config line " + std::to_string(number) + ": expected key=value");
    }
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (key == "features") {
      spec.features = split_list(value);
    } else if (key == "label") {
      spec.label = std::string(value);
    } else if (key == "rule") {
      spec.rule = LabelRule::parse(value);
    } else {
      throw Error(ErrorCode::Config, "config line " + std::to_string(number) + ": unknown key '" +
                                         std::string(key) + "'");
    }
  }
  return spec;
}

ColumnSpec ColumnSpec::from_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  return from_config(in);
}

ColumnSpec recipe(std::string_view name) {
  ColumnSpec spec;
  if (name == "pima") {
    spec.features = {"glucose", "bmi"};
    spec.label = "diabetes";
    spec.rule = LabelRule::parse("eq:1");
  } else if (name == "abalone") {
    spec.features = {"length", "diameter"};
    spec.label = "rings";
    spec.rule = LabelRule::parse("le:9");
  } else if (name == "census") {
    // Graduate degree: educ codes 14 (master's) and above.
    spec.features = {"age", "wageinc"};
    spec.label = "educ";
    spec.rule = LabelRule::parse("ge:14");
  } else {
    throw Error(ErrorCode::Config, "unknown recipe '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> recipe_names() { return {"pima", "abalone", "census"}; }

// ------------------------------------------------------------------ Dataset

Dataset::Dataset(std::vector<double> features, std::size_t feature_count,
                 std::vector<int> labels, std::size_t labeled, std::vector<int> truth,
                 std::size_t class_count, std::vector<std::string> feature_names,
                 std::vector<std::string> class_names)
    : features_(std::move(features)),
      feature_count_(feature_count),
      labels_(std::move(labels)),
      labeled_(labeled),
      truth_(std::move(truth)),
      class_count_(class_count),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {}

Dataset Dataset::create(std::vector<double> features, std::size_t feature_count,
                        const std::vector<std::optional<int>>& labels,
                        std::size_t class_count, std::vector<std::string> feature_names,
                        std::vector<std::string> class_names) {
  const std::size_t n = labels.size();
  if (feature_count == 0) throw Error(ErrorCode::Schema, "dataset needs at least one feature");
  if (features.size() != n * feature_count) {
    throw Error(ErrorCode::Shape, "feature matrix size does not match rows x features");
  }
  if (class_count < 1) throw Error(ErrorCode::InvalidDataset, "class count must be positive");
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features[i])) {
      throw Error(ErrorCode::InvalidDataset,
                  "non-finite feature at row " + std::to_string(i / feature_count + 1));
    }
  }
  if (feature_names.empty()) {
    for (std::size_t k = 0; k < feature_count; ++k) feature_names.push_back("x" + std::to_string(k + 1));
  }
  if (feature_names.size() != feature_count) {
    throw Error(ErrorCode::Shape, "feature name count does not match feature count");
  }
  if (class_names.empty()) {
    for (std::size_t j = 0; j < class_count; ++j) class_names.push_back(std::to_string(j));
  }
  if (class_names.size() != class_count) {
    throw Error(ErrorCode::Shape, "class name count does not match class count");
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i]) {
      if (*labels[i] < 0 || static_cast<std::size_t>(*labels[i]) >= class_count) {
        throw Error(ErrorCode::InvalidDataset, "label out of range at row " + std::to_string(i + 1));
      }
      order.push_back(i);
    }
  }
  const std::size_t r = order.size();
  if (r == 0) throw Error(ErrorCode::InvalidDataset, "dataset has no labeled observations");
  for (std::size_t i = 0; i < n; ++i) {
    if (!labels[i]) order.push_back(i);
  }

  std::vector<double> sorted(features.size());
  std::vector<int> canonical(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    std::copy_n(features.begin() + static_cast<std::ptrdiff_t>(order[k] * feature_count),
                feature_count, sorted.begin() + static_cast<std::ptrdiff_t>(k * feature_count));
    if (k < r) canonical[k] = *labels[order[k]];
  }
  std::vector<int> truth;
  if (r == n) truth = canonical;
  return Dataset(std::move(sorted), feature_count, std::move(canonical), r, std::move(truth),
                 class_count, std::move(feature_names), std::move(class_names));
}

int Dataset::label(std::size_t i) const {
  if (i >= labeled_) throw Error(ErrorCode::Range, "observation " + std::to_string(i) + " is unlabeled");
  return labels_[i];
}

int Dataset::truth(std::size_t i) const {
  if (truth_.empty()) throw Error(ErrorCode::InvalidDataset, "dataset carries no ground-truth labels");
  return truth_.at(i);
}

std::size_t Dataset::labeled_count(int class_index) const {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(labeled_), class_index));
}

void Dataset::check_class(int class_index) const {
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= class_count_) {
    throw Error(ErrorCode::Range, "class index " + std::to_string(class_index) + " out of range [0, " +
                                      std::to_string(class_count_) + ")");
  }
}

// -------------------------------------------------------------------- CSV IO

Dataset parse_csv(std::istream& in, const ColumnSpec& spec, std::string_view source) {
  const std::string where(source);
  std::size_t line = 1;
  std::vector<std::string> header;
  if (!read_record(in, header, line)) throw Error(ErrorCode::Schema, where + ": missing header row");
  for (auto& name : header) name = std::string(trim(name));
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::Schema, where + ": no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  if (spec.features.empty()) throw Error(ErrorCode::Schema, where + ": no feature columns given");
  std::vector<std::size_t> feature_cols;
  for (const auto& name : spec.features) feature_cols.push_back(column(name));
  const std::optional<std::size_t> label_col =
      spec.label.empty() ? std::nullopt : std::optional<std::size_t>(column(spec.label));

  std::vector<double> features;
  std::vector<std::optional<std::string>> raw_labels;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (true) {
    const std::size_t record_line = line;
    if (!read_record(in, fields, line)) break;
    if (blank(fields)) continue;
    ++row;
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::Schema, where + ": row " + std::to_string(row) + " (line " +
                                         std::to_string(record_line) + ") has " +
                                         std::to_string(fields.size()) + " columns, header has " +
                                         std::to_string(header.size()));
    }
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto value = parse_number(fields[feature_cols[k]]);
      if (!value) {
        throw Error(ErrorCode::Parse, where + ": row " + std::to_string(row) + ", column '" +
                                          spec.features[k] + "': malformed number '" +
                                          fields[feature_cols[k]] + "'");
      }
      features.push_back(*value);
    }
    if (label_col && !trim(fields[*label_col]).empty()) {
      raw_labels.emplace_back(std::string(trim(fields[*label_col])));
    } else {
      raw_labels.emplace_back(std::nullopt);
    }
  }

  std::vector<std::optional<int>> labels(raw_labels.size());
  std::vector<std::string> class_names;
  if (spec.rule.binary()) {
    class_names = {"0", "1"};
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      if (!raw_labels[i]) continue;
      try {
        labels[i] = spec.rule.holds(*raw_labels[i]) ? 1 : 0;
      } catch (const Error& e) {
        throw Error(ErrorCode::Parse, where + ": row " + std::to_string(i + 1) + ", column '" +
                                          spec.label + "': " + e.what());
      }
    }
  } else {
    std::set<std::string> distinct;
    bool numeric = true;
    for (const auto& raw : raw_labels) {
      if (raw) {
        distinct.insert(*raw);
        numeric = numeric && parse_number(*raw).has_value();
      }
    }
    class_names.assign(distinct.begin(), distinct.end());
    if (numeric) {
      std::stable_sort(class_names.begin(), class_names.end(), [](const auto& a, const auto& b) {
        return *parse_number(a) < *parse_number(b);
      });
    }
    std::map<std::string, int> index;
    for (std::size_t j = 0; j < class_names.size(); ++j) index[class_names[j]] = static_cast<int>(j);
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      if (raw_labels[i]) labels[i] = index.at(*raw_labels[i]);
    }
  }
  if (class_names.empty()) {
    throw Error(ErrorCode::InvalidDataset, where + ": no labeled rows");
  }
  return Dataset::create(std::move(features), feature_cols.size(), labels, class_names.size(),
                         spec.features, class_names);
}

Dataset load_csv(const std::string& path, const ColumnSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return parse_csv(in, spec, path);
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (const auto& name : data.feature_names()) out << quote_if_needed(name) << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features(i)) out << format_number(v, 17) << ',';
    if (i < data.labeled()) out << quote_if_needed(data.class_names()[static_cast<std::size_t>(data.label(i))]);
    out << '\n';
  }
}

Dataset partition(const Dataset& data, std::size_t r, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (data.labeled() != n) throw Error(ErrorCode::InvalidDataset, "partition needs a fully labeled dataset");
  if (r < 1 || r > n) {
    throw Error(ErrorCode::Range, "labeled count " + std::to_string(r) + " outside [1, " + std::to_string(n) + "]");
  }
  CounterRng rng{seed, 0x7061727469746e00ULL};
  std::vector<char> keep(n, 0);
  for (std::size_t i : sample_without_replacement(n, r, rng)) keep[i] = 1;

  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) order.push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) order.push_back(i);
  }
  const std::size_t f = data.feature_count();
  std::vector<double> features(n * f);
  std::vector<int> labels(n, -1);
  std::vector<int> truth(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = data.features(order[k]);
    std::copy(row.begin(), row.end(), features.begin() + static_cast<std::ptrdiff_t>(k * f));
    truth[k] = data.truth(order[k]);
    if (k < r) labels[k] = truth[k];
  }
  return Dataset(std::move(features), f, std::move(labels), r, std::move(truth), data.class_count(),
                 data.feature_names(), data.class_names());
}

}  // namespace priorlift
