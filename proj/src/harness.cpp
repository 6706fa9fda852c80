#include "priorlift/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

#include "priorlift/error.hpp"
#include "priorlift/logistic.hpp"
#include "priorlift/numeric.hpp"
#include "priorlift/rng.hpp"

namespace priorlift {

namespace {

constexpr std::size_t kMinLabeled = 20;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Replicate {
  double semi = kNaN;
  double classical = kNaN;
  bool failed = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_count(std::string_view text, std::string_view grid) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorCode::Config, "grid '" + std::string(grid) + "': '" + std::string(text) +
                                       "' is not a non-negative integer");
  }
  return std::stoul(std::string(text));
}

void validate(const Dataset& data, int class_index, const SubsampleConfig& config) {
  data.check_class(class_index);
  if (data.labeled() != data.size() || !data.has_truth()) {
    throw Error(ErrorCode::InvalidDataset, "evaluation needs a fully labeled dataset");
  }
  if (config.replicates < 1) throw Error(ErrorCode::Config, "replicate count must be at least 1");
  if (config.grid.empty()) throw Error(ErrorCode::Config, "evaluation grid is empty");
  if (!config.semi_supervised && !config.classical) {
    throw Error(ErrorCode::Config, "no estimator selected");
  }
  for (const auto& cell : config.grid) {
    if (cell.labeled < kMinLabeled) {
      throw Error(ErrorCode::Config, "grid cell r=" + std::to_string(cell.labeled) +
                                         " is below the minimum of " + std::to_string(kMinLabeled));
    }
    if (cell.subsample_size() > data.size()) {
      throw Error(ErrorCode::Config, "grid cell r=" + std::to_string(cell.labeled) + ", n-r=" +
                                         std::to_string(cell.unlabeled) + " exceeds the population size " +
                                         std::to_string(data.size()));
    }
  }
}

Replicate run_replicate(const Dataset& data, int class_index, const SubsampleConfig& config,
                        const GridCell& cell, std::size_t cell_index, std::size_t replicate,
                        const Estimator& semi, const Estimator& classical) {
  CounterRng rng{config.seed, cell_index, replicate};
  const auto draws = sample_without_replacement(data.size(), cell.subsample_size(), rng);
  const std::size_t f = data.feature_count();
  std::vector<double> features;
  features.reserve(draws.size() * f);
  std::vector<std::optional<int>> labels(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const auto row = data.features(draws[k]);
    features.insert(features.end(), row.begin(), row.end());
    if (k < cell.labeled) labels[k] = data.truth(draws[k]);
  }
  Replicate out;
  try {
    const Dataset subsample = Dataset::create(std::move(features), f, labels, data.class_count(),
                                              data.feature_names(), data.class_names());
    if (config.semi_supervised) out.semi = semi(subsample, class_index);
    if (config.classical) out.classical = classical(subsample, class_index);
  } catch (const std::exception&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

double semi_supervised_estimate(const Dataset& subsample, int class_index) {
  const ClassFit fit = fit_class(subsample, class_index);
  if (fit.separation_warning) {
    throw Error(ErrorCode::Convergence, "separation detected in subsample fit");
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < subsample.size(); ++i) sum.add(g(design_row(subsample, i), fit.coefficients));
  return sum.value() / static_cast<double>(subsample.size());
}

double classical_estimate(const Dataset& subsample, int class_index) {
  return static_cast<double>(subsample.labeled_count(class_index)) /
         static_cast<double>(subsample.labeled());
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRIOR_LIFT_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MseCurve run_grid(const Dataset& data, int class_index, const SubsampleConfig& config) {
  validate(data, class_index, config);
  const Estimator semi = config.semi_estimator ? config.semi_estimator : Estimator(semi_supervised_estimate);
  const Estimator classical =
      config.classical_estimator ? config.classical_estimator : Estimator(classical_estimate);

  const std::size_t h = data.size();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < h; ++i) positives += data.truth(i) == class_index ? 1 : 0;

  MseCurve curve;
  curve.class_index = class_index;
  curve.population_size = h;
  curve.target = static_cast<double>(positives) / static_cast<double>(h);
  curve.replicates = config.replicates;
  curve.seed = config.seed;

  const std::size_t m = config.replicates;
  const std::size_t tasks = config.grid.size() * m;
  std::vector<Replicate> results(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      const std::size_t cell = t / m;
      results[t] = run_replicate(data, class_index, config, config.grid[cell], cell, t % m, semi, classical);
    }
  };
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(config.threads), tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  // Aggregation runs in (cell, replicate) order regardless of scheduling.
  for (std::size_t c = 0; c < config.grid.size(); ++c) {
    CurveRecord rec;
    rec.labeled = config.grid[c].labeled;
    rec.unlabeled = config.grid[c].unlabeled;
    CompensatedSum semi_sq;
    CompensatedSum classical_sq;
    for (std::size_t rep = 0; rep < m; ++rep) {
      const Replicate& res = results[c * m + rep];
      if (res.failed) {
        ++rec.failures;
        continue;
      }
      ++rec.replicates_used;
      semi_sq.add((res.semi - curve.target) * (res.semi - curve.target));
      classical_sq.add((res.classical - curve.target) * (res.classical - curve.target));
    }
    rec.valid = rec.replicates_used > 0;
    const double used = static_cast<double>(rec.replicates_used);
    rec.mse_semi = rec.valid && config.semi_supervised ? semi_sq.value() / used : kNaN;
    rec.mse_classical = rec.valid && config.classical ? classical_sq.value() / used : kNaN;
    rec.ratio_defined = std::isfinite(rec.mse_semi) && std::isfinite(rec.mse_classical) &&
                        rec.mse_classical > 0.0;
    rec.ratio = rec.ratio_defined ? rec.mse_semi / rec.mse_classical : kNaN;
    curve.records.push_back(rec);
  }
  return curve;
}

MseCurve smooth_curve(const MseCurve& curve, std::size_t window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::Config, "smoothing window must be an odd count >= 1");
  }
  MseCurve out = curve;
  out.smoothing_window = window;
  std::map<std::size_t, std::vector<std::size_t>> slices;
  for (std::size_t i = 0; i < curve.records.size(); ++i) slices[curve.records[i].labeled].push_back(i);

  for (auto& [labeled, members] : slices) {
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return curve.records[a].unlabeled < curve.records[b].unlabeled;
    });
    const std::size_t len = members.size();
    const std::size_t half = window / 2;
    for (std::size_t k = 0; k < len; ++k) {
      std::size_t lo = 0;
      std::size_t hi = len;  // exclusive
      if (window <= len) {
        lo = k >= half ? k - half : 0;
        hi = std::min(len, k + half + 1);
      }
      CompensatedSum sum;
      std::size_t count = 0;
      for (std::size_t s = lo; s < hi; ++s) {
        const CurveRecord& rec = curve.records[members[s]];
        if (!rec.ratio_defined) continue;
        sum.add(rec.ratio);
        ++count;
      }
      CurveRecord& target = out.records[members[k]];
      target.ratio_defined = count > 0;
      target.ratio = count > 0 ? sum.value() / static_cast<double>(count) : kNaN;
    }
  }
  return out;
}

std::vector<GridCell> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw Error(ErrorCode::Config, "empty grid specification");
  std::vector<GridCell> cells;
  if (text.find('x') != std::string_view::npos) {
    const auto halves = split(text, 'x');
    if (halves.size() != 2) throw Error(ErrorCode::Config, "grid '" + std::string(text) + "' has more than one 'x'");
    for (auto r : split(halves[0], ',')) {
      for (auto u : split(halves[1], ',')) cells.push_back({parse_count(r, text), parse_count(u, text)});
    }
  } else {
    for (auto piece : split(text, ';')) {
      const auto parts = split(piece, ':');
      if (parts.size() != 2) throw Error(ErrorCode::Config, "grid cell '" + std::string(piece) + "' must be r:n_minus_r");
      cells.push_back({parse_count(parts[0], text), parse_count(parts[1], text)});
    }
  }
  return cells;
}

std::vector<GridCell> default_grid(std::size_t population_size) {
  std::vector<GridCell> cells;
  for (std::size_t r : {25u, 50u, 100u, 200u}) {
    for (std::size_t u : {0u, 100u, 200u, 400u, 800u}) {
      if (r + u <= population_size) cells.push_back({r, u});
    }
  }
  return cells;
}

void write_csv(const MseCurve& curve, std::ostream& out) {
  out << "r,n_minus_r,mse_semi,mse_classical,ratio,replicates_used,failures\n";
  auto number = [](double v) { return std::isfinite(v) ? format_number(v, 17) : std::string(); };
  for (const auto& rec : curve.records) {
    out << rec.labeled << ',' << rec.unlabeled << ',' << number(rec.mse_semi) << ','
        << number(rec.mse_classical) << ',' << number(rec.ratio) << ',' << rec.replicates_used << ','
        << rec.failures << '\n';
  }
}

nlohmann::json to_json(const MseCurve& curve) {
  nlohmann::json records = nlohmann::json::array();
  auto number = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  for (const auto& rec : curve.records) {
    records.push_back({{"r", rec.labeled},
                       {"n_minus_r", rec.unlabeled},
                       {"mse_semi", number(rec.mse_semi)},
                       {"mse_classical", number(rec.mse_classical)},
                       {"ratio", number(rec.ratio)},
                       {"ratio_defined", rec.ratio_defined},
                       {"replicates_used", rec.replicates_used},
                       {"failures", rec.failures},
                       {"valid", rec.valid}});
  }
  return {{"class_index", curve.class_index},
          {"population_size", curve.population_size},
          {"target", curve.target},
          {"replicates", curve.replicates},
          {"seed", curve.seed},
          {"sampling", "without_replacement"},
          {"smoothing_window", curve.smoothing_window},
          {"records", std::move(records)}};
}

}  // namespace priorlift
