#include "priorlift/discrete.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>

#include <boost/multiprecision/cpp_int.hpp>

#include "priorlift/error.hpp"
#include "priorlift/numeric.hpp"
#include "priorlift/prior.hpp"

namespace priorlift {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Correctly rounded when numerator and denominator are exact doubles.
double to_double(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  const BigInt limit = BigInt(1) << 53;
  if (boost::multiprecision::abs(num) <= limit && den <= limit) {
    return num.convert_to<double>() / den.convert_to<double>();
  }
  return q.convert_to<double>();
}

std::vector<std::uint64_t> bit_key(std::span<const double> x) {
  std::vector<std::uint64_t> key(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) key[k] = std::bit_cast<std::uint64_t>(x[k]);
  return key;
}

std::string describe(const std::vector<double>& value) {
  std::string out = "(";
  for (std::size_t k = 0; k < value.size(); ++k) {
    if (k) out += ", ";
    out += format_number(value[k], 17);
  }
  return out + ")";
}

}  // namespace

DiscreteTable DiscreteTable::tabulate(const Dataset& data) {
  std::map<std::vector<std::uint64_t>, std::size_t> index;
  std::vector<DiscreteCell> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.features(i);
    auto [it, inserted] = index.try_emplace(bit_key(x), cells.size());
    if (inserted) {
      DiscreteCell cell;
      cell.value.assign(x.begin(), x.end());
      cell.class_counts.assign(data.class_count(), 0);
      cells.push_back(std::move(cell));
    }
    DiscreteCell& cell = cells[it->second];
    if (i < data.labeled()) {
      ++cell.labeled;
      ++cell.class_counts[static_cast<std::size_t>(data.label(i))];
    } else {
      ++cell.unlabeled;
    }
  }
  return from_cells(std::move(cells), data.class_count(), data.feature_names());
}

DiscreteTable DiscreteTable::from_cells(std::vector<DiscreteCell> cells, std::size_t class_count,
                                        std::vector<std::string> feature_names) {
  if (cells.empty()) throw Error(ErrorCode::InvalidDataset, "discrete table has no cells");
  DiscreteTable table;
  table.class_count_ = class_count;
  for (const auto& cell : cells) {
    if (cell.labeled == 0) {
      throw Error(ErrorCode::Coverage, "feature value " + describe(cell.value) +
                                           " occurs only among unlabeled observations");
    }
    if (cell.class_counts.size() != class_count) {
      throw Error(ErrorCode::Shape, "cell " + describe(cell.value) + " has wrong class-count length");
    }
    std::size_t total = 0;
    for (std::size_t t : cell.class_counts) total += t;
    if (total != cell.labeled) {
      throw Error(ErrorCode::InvalidDataset,
                  "class counts at " + describe(cell.value) + " do not sum to the labeled count");
    }
    table.r_ += cell.labeled;
    table.n_ += cell.labeled + cell.unlabeled;
  }
  const std::size_t width = cells.front().value.size();
  if (feature_names.empty()) {
    for (std::size_t k = 0; k < width; ++k) feature_names.push_back("x" + std::to_string(k + 1));
  }
  table.cells_ = std::move(cells);
  table.feature_names_ = std::move(feature_names);
  return table;
}

void DiscreteTable::write_csv(std::ostream& out) const {
  for (const auto& name : feature_names_) out << name << ',';
  out << "M,N";
  for (std::size_t j = 0; j < class_count_; ++j) out << ",T_" << j;
  out << '\n';
  for (const auto& cell : cells_) {
    for (double v : cell.value) out << format_number(v, 17) << ',';
    out << cell.labeled << ',' << cell.unlabeled;
    for (std::size_t t : cell.class_counts) out << ',' << t;
    out << '\n';
  }
}

DiscretePriorEstimate estimate_discrete(const DiscreteTable& table, int class_index, double alpha) {
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= table.class_count()) {
    throw Error(ErrorCode::Range, "class index " + std::to_string(class_index) + " out of range");
  }
  critical_value(alpha);
  const auto j = static_cast<std::size_t>(class_index);
  const Rational n(static_cast<long long>(table.size()));

  DiscretePriorEstimate est;
  est.class_index = class_index;
  est.n = table.size();
  est.alpha = alpha;

  // sum d^2 p (1-p) - 2 sum_{k<s} d_k d_s p_k p_s == sum d^2 p - (sum d p)^2
  Rational q(0);
  Rational second_moment(0);
  for (const auto& cell : table.cells()) {
    const Rational p(static_cast<long long>(cell.labeled + cell.unlabeled), n);
    const Rational d(static_cast<long long>(cell.class_counts[j]),
                     static_cast<long long>(cell.labeled));
    est.p_hat.push_back(to_double(p));
    est.d_hat.push_back(to_double(d));
    q += p * d;
    second_moment += d * d * p;
  }
  Rational bracket = second_moment - q * q;
  if (bracket < 0) {
    bracket = 0;
    est.avar_floored = true;
  }
  est.q_hat = to_double(q);
  est.avar = to_double(bracket / n);
  est.std_error = std::sqrt(est.avar);
  attach_interval(est.q_hat, est.std_error, alpha, est.ci_lower, est.ci_upper);
  est.ci_lower = std::max(0.0, est.ci_lower);
  est.ci_upper = std::min(1.0, est.ci_upper);
  return est;
}

nlohmann::json to_json(const DiscretePriorEstimate& e) {
  return {{"class_index", e.class_index},
          {"n", e.n},
          {"q_hat", e.q_hat},
          {"p_hat", e.p_hat},
          {"d_hat", e.d_hat},
          {"avar", e.avar},
          {"avar_floored", e.avar_floored},
          {"std_error", e.std_error},
          {"alpha", e.alpha},
          {"ci", {e.ci_lower, e.ci_upper}}};
}

}  // namespace priorlift
