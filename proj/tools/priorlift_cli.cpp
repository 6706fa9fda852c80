// Command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "priorlift/priorlift.h"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kInternal = 1, kData = 2, kConvergence = 3, kConfig = 4 };

struct Failure {
  pl_status status;
  std::string message;
};

[[noreturn]] void fail(pl_status status, std::string message) { throw Failure{status, std::move(message)}; }

void check(pl_status status) {
  if (status != PL_OK) fail(status, pl_last_error());
}

int exit_code(pl_status status) {
  switch (status) {
    case PL_OK: return kOk;
    case PL_ERR_CONVERGENCE:
    case PL_ERR_SINGULAR_DESIGN:
    case PL_ERR_DEGENERATE_CLASS:
    case PL_ERR_SINGULAR_INFORMATION: return kConvergence;
    case PL_ERR_CONFIG:
    case PL_ERR_INVALID_ARGUMENT: return kConfig;
    case PL_ERR_INTERNAL: return kInternal;
    default: return kData;
  }
}

struct Deleter {
  void operator()(pl_dataset* p) const { pl_dataset_free(p); }
  void operator()(pl_model* p) const { pl_model_free(p); }
  void operator()(pl_curve* p) const { pl_curve_free(p); }
  void operator()(char* p) const { pl_string_free(p); }
};
using DatasetPtr = std::unique_ptr<pl_dataset, Deleter>;
using ModelPtr = std::unique_ptr<pl_model, Deleter>;
using CurvePtr = std::unique_ptr<pl_curve, Deleter>;
using CString = std::unique_ptr<char, Deleter>;

std::string take(char* raw) {
  CString owned(raw);
  return owned ? std::string(owned.get()) : std::string();
}

template <class F>
std::string string_call(F&& f) {
  char* raw = nullptr;
  check(f(&raw));
  return take(raw);
}

template <class F>
json json_call(F&& f) {
  return json::parse(string_call(std::forward<F>(f)));
}

struct Options {
  std::string input;
  std::string recipe;
  std::string config;
  std::string label_col;
  std::string feature_cols;
  std::string label_rule;
  std::string class_name;
  double alpha = 0.05;
  std::size_t labeled_count = 0;
  double labeled_fraction = 0.0;
  std::uint64_t seed = 1;
  std::string format = "table";
  std::string output;
  std::vector<std::string> regions;
  double useful = 0.03;
  double marginal = 0.01;
  std::string grid;
  std::size_t replicates = 1000;
  std::size_t smooth = 1;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Plain-text table with right-aligned columns.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string render() const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
    }
    std::string out;
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out += "  ";
        out += std::string(width[k] - row[k].size(), ' ') + row[k];
      }
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

void validate_common(const Options& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) fail(PL_ERR_CONFIG, "--alpha must lie in (0, 1)");
  if (o.format != "json" && o.format != "csv" && o.format != "table") {
    fail(PL_ERR_CONFIG, "--format must be json, csv or table");
  }
  const int sources = !o.recipe.empty() + !o.config.empty() + !o.feature_cols.empty();
  if (sources != 1) {
    fail(PL_ERR_CONFIG, "give exactly one of --recipe, --config or --feature-cols");
  }
  if (!o.feature_cols.empty() && o.label_col.empty()) fail(PL_ERR_CONFIG, "--feature-cols needs --label-col");
  if ((!o.label_col.empty() || !o.label_rule.empty()) && o.feature_cols.empty()) {
    fail(PL_ERR_CONFIG, "--label-col and --label-rule only apply with --feature-cols");
  }
  if (o.labeled_count > 0 && o.labeled_fraction > 0.0) {
    fail(PL_ERR_CONFIG, "--labeled-count and --labeled-fraction are exclusive");
  }
  if (o.labeled_fraction < 0.0 || o.labeled_fraction > 1.0) {
    fail(PL_ERR_CONFIG, "--labeled-fraction must lie in (0, 1]");
  }
}

DatasetPtr load(const Options& o) {
  pl_dataset* raw = nullptr;
  if (!o.recipe.empty()) {
    check(pl_dataset_load_recipe(o.input.c_str(), o.recipe.c_str(), &raw));
  } else if (!o.config.empty()) {
    check(pl_dataset_load_config(o.input.c_str(), o.config.c_str(), &raw));
  } else {
    const pl_column_spec spec{o.feature_cols.c_str(), o.label_col.c_str(), o.label_rule.c_str()};
    check(pl_dataset_load_csv(o.input.c_str(), &spec, &raw));
  }
  DatasetPtr data(raw);

  std::size_t r = o.labeled_count;
  if (o.labeled_fraction > 0.0) {
    pl_dataset_info info;
    check(pl_dataset_get_info(data.get(), &info));
    r = static_cast<std::size_t>(std::llround(o.labeled_fraction * static_cast<double>(info.size)));
    if (r == 0) fail(PL_ERR_CONFIG, "--labeled-fraction leaves no labeled rows");
  }
  if (r > 0) {
    pl_dataset* part = nullptr;
    check(pl_dataset_partition(data.get(), r, o.seed, &part));
    data.reset(part);
  }
  return data;
}

pl_dataset_info info_of(const pl_dataset* data) {
  pl_dataset_info info;
  check(pl_dataset_get_info(data, &info));
  return info;
}

std::string class_name(const pl_dataset* data, int j) {
  return string_call([&](char** out) { return pl_dataset_class_name(data, j, out); });
}

// --class if given, otherwise every class.
std::vector<int> classes(const pl_dataset* data, const Options& o) {
  if (!o.class_name.empty()) {
    int j = 0;
    check(pl_dataset_find_class(data, o.class_name.c_str(), &j));
    return {j};
  }
  std::vector<int> out;
  for (std::size_t j = 0; j < info_of(data).class_count; ++j) out.push_back(static_cast<int>(j));
  return out;
}

ModelPtr fit(const pl_dataset* data, const std::vector<int>& which) {
  pl_model* raw = nullptr;
  if (which.size() == 1) {
    check(pl_model_fit_class(data, which.front(), &raw));
  } else {
    check(pl_model_fit(data, &raw));
  }
  return ModelPtr(raw);
}

json fit_json(const pl_model* model, int j) {
  const json fits = json_call([&](char** out) { return pl_model_to_json(model, out); });
  for (const auto& f : fits) {
    if (f.at("class_index").get<int>() == j) return f;
  }
  return nullptr;
}

json dataset_json(const pl_dataset* data) {
  const auto info = info_of(data);
  return {{"n", info.size}, {"r", info.labeled}, {"feature_count", info.feature_count},
          {"class_count", info.class_count}};
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) fail(PL_ERR_IO, "failed writing to standard output");
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) fail(PL_ERR_IO, "cannot open '" + o.output + "' for writing");
  out << text;
  if (!out) fail(PL_ERR_IO, "failed writing '" + o.output + "'");
}

void cmd_estimate(const Options& o) {
  const DatasetPtr data = load(o);
  const auto which = classes(data.get(), o);
  const ModelPtr model = fit(data.get(), which);

  json doc = {{"command", "estimate"}, {"alpha", o.alpha}, {"dataset", dataset_json(data.get())},
              {"classes", json::array()}};
  Table table({"class", "estimator", "estimate", "SE", "CI lower", "CI upper", "reduction"});
  std::string csv = "class_index,class_name,estimator,q_hat,std_error,ci_lower,ci_upper,avar,variance_reduction\n";

  for (int j : which) {
    pl_prior_estimate semi;
    pl_prior_estimate classical;
    check(pl_estimate_prior(data.get(), model.get(), j, o.alpha, &semi));
    check(pl_estimate_classical(data.get(), j, o.alpha, &classical));
    double reduction = 0.0;
    double labeled_only = 0.0;
    check(pl_variance_reduction(&semi, &reduction));
    check(pl_labeled_only_avar(&semi, &labeled_only));
    const std::string name = class_name(data.get(), j);

    doc["classes"].push_back(
        {{"class_index", j},
         {"class_name", name},
         {"semi_supervised", json_call([&](char** out) { return pl_prior_estimate_to_json(&semi, out); })},
         {"classical", json_call([&](char** out) { return pl_prior_estimate_to_json(&classical, out); })},
         {"variance_reduction", reduction},
         {"labeled_only_avar", labeled_only},
         {"fit", fit_json(model.get(), j)}});

    table.add({name, "semi-supervised", fmt(semi.q_hat), fmt(semi.std_error), fmt(semi.ci_lower),
               fmt(semi.ci_upper), fmt(reduction)});
    table.add({name, "classical", fmt(classical.q_hat), fmt(classical.std_error), fmt(classical.ci_lower),
               fmt(classical.ci_upper), ""});
    for (const auto* e : {&semi, &classical}) {
      csv += std::to_string(j) + ',' + csv_field(name) + ',' + (e == &semi ? "semi_supervised" : "classical") +
             ',' + csv_number(e->q_hat) + ',' + csv_number(e->std_error) + ',' + csv_number(e->ci_lower) + ',' +
             csv_number(e->ci_upper) + ',' + csv_number(e->avar) + ',' + (e == &semi ? csv_number(reduction) : "") +
             '\n';
    }
  }
  if (o.format == "json") emit(o, doc.dump(2) + "\n");
  else if (o.format == "csv") emit(o, csv);
  else emit(o, table.render());
}

void cmd_subclass(const Options& o) {
  const DatasetPtr data = load(o);
  const auto which = classes(data.get(), o);
  std::vector<const char*> regions;
  for (const auto& r : o.regions) regions.push_back(r.c_str());
  const std::string described =
      string_call([&](char** out) { return pl_describe_region(regions.data(), regions.size(), out); });
  const ModelPtr model = fit(data.get(), which);

  json doc = {{"command", "subclass"},
              {"alpha", o.alpha},
              {"region", described},
              {"dataset", dataset_json(data.get())},
              {"classes", json::array()}};
  Table table({"class", "estimator", "estimate", "SE", "CI lower", "CI upper", "in region"});
  std::string csv = "class_index,class_name,estimator,q_hat_w,std_error,ci_lower,ci_upper,avar,in_region\n";

  for (int j : which) {
    pl_subclass_estimate semi;
    check(pl_estimate_subclass(data.get(), model.get(), j, regions.data(), regions.size(), o.alpha, &semi));
    // The labeled-only ratio is undefined when no labeled row falls in the region.
    std::optional<pl_subclass_estimate> classical;
    pl_subclass_estimate tmp;
    const pl_status cs = pl_classical_subclass(data.get(), j, regions.data(), regions.size(), o.alpha, &tmp);
    if (cs == PL_OK) classical = tmp;
    else if (cs != PL_ERR_EMPTY_REGION) check(cs);
    const std::string name = class_name(data.get(), j);

    doc["classes"].push_back(
        {{"class_index", j},
         {"class_name", name},
         {"semi_supervised", json_call([&](char** out) { return pl_subclass_estimate_to_json(&semi, out); })},
         {"classical", classical ? json_call([&](char** out) {
                                     return pl_subclass_estimate_to_json(&*classical, out);
                                   })
                                 : json(nullptr)}});

    table.add({name, "semi-supervised", fmt(semi.q_hat_w), fmt(semi.std_error), fmt(semi.ci_lower),
               fmt(semi.ci_upper), std::to_string(semi.in_region)});
    if (classical) {
      table.add({name, "classical", fmt(classical->q_hat_w), fmt(classical->std_error), fmt(classical->ci_lower),
                 fmt(classical->ci_upper), std::to_string(classical->in_region)});
    } else {
      table.add({name, "classical", "NA", "NA", "NA", "NA", "0"});
    }
    csv += std::to_string(j) + ',' + csv_field(name) + ",semi_supervised," + csv_number(semi.q_hat_w) + ',' +
           csv_number(semi.std_error) + ',' + csv_number(semi.ci_lower) + ',' + csv_number(semi.ci_upper) + ',' +
           csv_number(semi.avar) + ',' + std::to_string(semi.in_region) + '\n';
    csv += std::to_string(j) + ',' + csv_field(name) + ",classical,";
    if (classical) {
      csv += csv_number(classical->q_hat_w) + ',' + csv_number(classical->std_error) + ',' +
             csv_number(classical->ci_lower) + ',' + csv_number(classical->ci_upper) + ',' +
             csv_number(classical->avar) + ',' + std::to_string(classical->in_region) + '\n';
    } else {
      csv += ",,,,,0\n";
    }
  }
  if (o.format == "json") emit(o, doc.dump(2) + "\n");
  else if (o.format == "csv") emit(o, csv);
  else emit(o, "region: " + described + "\n" + table.render());
}

void cmd_discrete(const Options& o) {
  const DatasetPtr data = load(o);
  const auto which = classes(data.get(), o);

  json doc = {{"command", "discrete"}, {"alpha", o.alpha}, {"dataset", dataset_json(data.get())},
              {"classes", json::array()}};
  Table table({"class", "estimator", "estimate", "SE", "CI lower", "CI upper"});
  std::string csv = "class_index,class_name,estimator,q_hat,std_error,ci_lower,ci_upper,avar\n";
  std::size_t cells = 0;

  for (int j : which) {
    pl_discrete_estimate est;
    pl_prior_estimate classical;
    check(pl_estimate_discrete(data.get(), j, o.alpha, &est));
    check(pl_estimate_classical(data.get(), j, o.alpha, &classical));
    cells = est.cell_count;
    const std::string name = class_name(data.get(), j);

    doc["classes"].push_back(
        {{"class_index", j},
         {"class_name", name},
         {"discrete", json_call([&](char** out) { return pl_estimate_discrete_json(data.get(), j, o.alpha, out); })},
         {"classical", json_call([&](char** out) { return pl_prior_estimate_to_json(&classical, out); })}});

    table.add({name, "discrete", fmt(est.q_hat), fmt(est.std_error), fmt(est.ci_lower), fmt(est.ci_upper)});
    table.add({name, "classical", fmt(classical.q_hat), fmt(classical.std_error), fmt(classical.ci_lower),
               fmt(classical.ci_upper)});
    csv += std::to_string(j) + ',' + csv_field(name) + ",discrete," + csv_number(est.q_hat) + ',' +
           csv_number(est.std_error) + ',' + csv_number(est.ci_lower) + ',' + csv_number(est.ci_upper) + ',' +
           csv_number(est.avar) + '\n';
    csv += std::to_string(j) + ',' + csv_field(name) + ",classical," + csv_number(classical.q_hat) + ',' +
           csv_number(classical.std_error) + ',' + csv_number(classical.ci_lower) + ',' +
           csv_number(classical.ci_upper) + ',' + csv_number(classical.avar) + '\n';
  }
  doc["cell_count"] = cells;
  if (o.format == "json") emit(o, doc.dump(2) + "\n");
  else if (o.format == "csv") emit(o, csv);
  else emit(o, "distinct feature values: " + std::to_string(cells) + "\n" + table.render());
}

void cmd_diagnose(const Options& o) {
  const DatasetPtr data = load(o);
  const auto which = classes(data.get(), o);
  const ModelPtr model = fit(data.get(), which);

  json doc = {{"command", "diagnose"}, {"dataset", dataset_json(data.get())}, {"classes", json::array()}};
  Table table({"class", "q_hat", "eta", "misclass", "sigma", "recommendation"});
  std::string csv = "class_index,class_name,q_hat,eta,eta_clamped,misclassification_rate,sigma,recommendation\n";

  for (int j : which) {
    pl_diagnostics d;
    check(pl_diagnose(data.get(), model.get(), j, o.useful, o.marginal, &d));
    const std::string name = class_name(data.get(), j);
    doc["classes"].push_back({{"class_index", j},
                              {"class_name", name},
                              {"diagnostics", json_call([&](char** out) { return pl_diagnostics_to_json(&d, out); })}});
    table.add({name, fmt(d.q_hat), fmt(d.eta), fmt(d.misclassification_rate), fmt(d.sigma),
               pl_recommendation_string(d.recommendation)});
    csv += std::to_string(j) + ',' + csv_field(name) + ',' + csv_number(d.q_hat) + ',' + csv_number(d.eta) + ',' +
           (d.eta_clamped ? "true" : "false") + ',' + csv_number(d.misclassification_rate) + ',' +
           csv_number(d.sigma) + ',' + pl_recommendation_string(d.recommendation) + '\n';
  }
  if (o.format == "json") emit(o, doc.dump(2) + "\n");
  else if (o.format == "csv") emit(o, csv);
  else emit(o, table.render());
}

void cmd_evaluate(const Options& o) {
  if (o.labeled_count > 0 || o.labeled_fraction > 0.0) {
    fail(PL_ERR_CONFIG, "evaluate subsamples a fully labeled dataset; drop --labeled-count/--labeled-fraction");
  }
  const DatasetPtr data = load(o);
  int j = static_cast<int>(info_of(data.get()).class_count) - 1;
  if (!o.class_name.empty()) check(pl_dataset_find_class(data.get(), o.class_name.c_str(), &j));

  const pl_eval_config config{o.replicates, o.grid.c_str(), o.seed, 0};
  pl_curve* raw_curve = nullptr;
  check(pl_evaluate(data.get(), j, &config, &raw_curve));
  const CurvePtr curve(raw_curve);
  pl_curve* raw_smoothed = nullptr;
  check(pl_curve_smooth(curve.get(), o.smooth, &raw_smoothed));
  const CurvePtr smoothed(raw_smoothed);
  const pl_curve* reported = o.smooth > 1 ? smoothed.get() : curve.get();

  if (o.format == "json") {
    json doc = {{"command", "evaluate"},
                {"class_index", j},
                {"class_name", class_name(data.get(), j)},
                {"curve", json_call([&](char** out) { return pl_curve_to_json(curve.get(), out); })},
                {"smoothed", json_call([&](char** out) { return pl_curve_to_json(smoothed.get(), out); })}};
    emit(o, doc.dump(2) + "\n");
  } else if (o.format == "csv") {
    emit(o, string_call([&](char** out) { return pl_curve_to_csv(reported, out); }));
  } else {
    Table table({"r", "n-r", "mse semi", "mse classical", "ratio", "smoothed", "used", "failures"});
    for (std::size_t k = 0; k < pl_curve_size(curve.get()); ++k) {
      pl_curve_record a;
      pl_curve_record b;
      check(pl_curve_record_at(curve.get(), k, &a));
      check(pl_curve_record_at(smoothed.get(), k, &b));
      table.add({std::to_string(a.labeled), std::to_string(a.unlabeled), fmt(a.mse_semi), fmt(a.mse_classical),
                 fmt(a.ratio), fmt(b.ratio), std::to_string(a.replicates_used), std::to_string(a.failures)});
    }
    emit(o, table.render());
  }
}

void report(const Failure& f) {
  const json err = {{"error", {{"status", pl_status_string(f.status)},
                               {"message", f.message},
                               {"exit_code", exit_code(f.status)}}}};
  std::cerr << err.dump() << '\n';
}

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "CSV file")->required();
  cmd->add_option("--recipe", o.recipe, "named column preset: pima, abalone, census");
  cmd->add_option("--config", o.config, "column spec file (features=, label=, rule=)");
  cmd->add_option("--feature-cols", o.feature_cols, "comma-separated feature columns");
  cmd->add_option("--label-col", o.label_col, "label column");
  cmd->add_option("--label-rule", o.label_rule, "binarize the label: eq:V, le:V, lt:V, ge:V, gt:V");
  cmd->add_option("--class", o.class_name, "class name or index (default: every class)");
  cmd->add_option("--format", o.format, "json, csv or table")->capture_default_str();
  cmd->add_option("--output", o.output, "write to this file instead of stdout");
  cmd->add_option("--seed", o.seed, "seed for label stripping and subsampling")->capture_default_str();
}

void add_partition_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--labeled-count", o.labeled_count, "keep labels on this many random rows");
  cmd->add_option("--labeled-fraction", o.labeled_fraction, "keep labels on this fraction of rows");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Class prior estimation from labeled and unlabeled data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pl_version()));

  auto* estimate = app.add_subcommand("estimate", "semi-supervised and classical class priors");
  auto* subclass = app.add_subcommand("subclass", "class probability inside a feature region");
  auto* discrete = app.add_subcommand("discrete", "exact estimate for discrete features");
  auto* diagnose = app.add_subcommand("diagnose", "eta, sigma and a recommendation");
  auto* evaluate = app.add_subcommand("evaluate", "subsample MSE comparison over a grid");

  for (auto* cmd : {estimate, subclass, discrete, diagnose, evaluate}) add_data_options(cmd, o);
  for (auto* cmd : {estimate, subclass, discrete, diagnose}) add_partition_options(cmd, o);
  for (auto* cmd : {estimate, subclass, discrete}) {
    cmd->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();
  }
  subclass->add_option("--region", o.regions, "idx:lo:hi constraint (repeatable)");
  diagnose->add_option("--useful-threshold", o.useful, "sigma at or above which unlabeled data helps")
      ->capture_default_str();
  diagnose->add_option("--marginal-threshold", o.marginal, "sigma at or above which the gain is marginal")
      ->capture_default_str();
  evaluate->add_option("--grid", o.grid, "r-list x (n-r)-list, e.g. 100,200x0,250,500; or r:u;r:u");
  evaluate->add_option("--replicates", o.replicates, "subsamples per grid cell")->capture_default_str();
  evaluate->add_option("--smooth", o.smooth, "odd moving-average window for the ratio")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    validate_common(o);
    if (*estimate) cmd_estimate(o);
    else if (*subclass) cmd_subclass(o);
    else if (*discrete) cmd_discrete(o);
    else if (*diagnose) cmd_diagnose(o);
    else cmd_evaluate(o);
  } catch (const Failure& f) {
    report(f);
    return exit_code(f.status);
  } catch (const std::exception& e) {
    report({PL_ERR_INTERNAL, e.what()});
    return kInternal;
  }
  return kOk;
}
