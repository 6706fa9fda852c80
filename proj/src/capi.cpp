#include "priorlift/priorlift.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "priorlift/dataset.hpp"
#include "priorlift/diagnostics.hpp"
#include "priorlift/discrete.hpp"
#include "priorlift/error.hpp"
#include "priorlift/harness.hpp"
#include "priorlift/logistic.hpp"
#include "priorlift/prior.hpp"
#include "priorlift/subclass.hpp"

struct pl_dataset {
  priorlift::Dataset value;
};

struct pl_model {
  priorlift::FittedModel value;
};

struct pl_curve {
  priorlift::MseCurve value;
};

namespace {

using namespace priorlift;

thread_local std::string last_error;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

pl_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return PL_ERR_PARSE;
    case ErrorCode::Schema: return PL_ERR_SCHEMA;
    case ErrorCode::InvalidDataset: return PL_ERR_INVALID_DATASET;
    case ErrorCode::Range: return PL_ERR_RANGE;
    case ErrorCode::Shape: return PL_ERR_SHAPE;
    case ErrorCode::Io: return PL_ERR_IO;
    case ErrorCode::Convergence: return PL_ERR_CONVERGENCE;
    case ErrorCode::SingularDesign: return PL_ERR_SINGULAR_DESIGN;
    case ErrorCode::DegenerateClass: return PL_ERR_DEGENERATE_CLASS;
    case ErrorCode::SingularInformation: return PL_ERR_SINGULAR_INFORMATION;
    case ErrorCode::DegeneratePrior: return PL_ERR_DEGENERATE_PRIOR;
    case ErrorCode::EmptyRegion: return PL_ERR_EMPTY_REGION;
    case ErrorCode::Coverage: return PL_ERR_COVERAGE;
    case ErrorCode::Config: return PL_ERR_CONFIG;
  }
  return PL_ERR_INTERNAL;
}

std::string describe_trace(const ConvergenceError& e) {
  std::ostringstream out;
  out << e.what();
  for (const auto& t : e.trace()) {
    out << "\n  iteration " << t.iteration << ": deviance " << t.deviance << ", score "
        << t.score_norm << ", halvings " << t.step_halvings;
  }
  return out.str();
}

template <class F>
pl_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return PL_OK;
  } catch (const ConvergenceError& e) {
    last_error = describe_trace(e);
    return PL_ERR_CONVERGENCE;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const InvalidArgument& e) {
    last_error = e.what();
    return PL_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return PL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " is null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

std::vector<std::string> split_list(const char* text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text ? text : "");
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

RegionPredicate region_from(const char* const* regions, std::size_t count) {
  if (count > 0) require(regions, "regions");
  if (count == 0) return RegionPredicate::everything();
  std::vector<IntervalConstraint> constraints;
  for (std::size_t k = 0; k < count; ++k) {
    require(regions[k], "region entry");
    constraints.push_back(IntervalConstraint::parse(regions[k]));
  }
  return RegionPredicate::intervals(std::move(constraints));
}

pl_prior_estimate to_c(const PriorEstimate& e) {
  return {e.class_index, e.n, e.r, e.q_hat, e.var_g, e.var_g_term, e.sandwich_term,
          e.avar, e.std_error, e.alpha, e.ci_lower, e.ci_upper};
}

PriorEstimate from_c(const pl_prior_estimate& e) {
  PriorEstimate out;
  out.class_index = e.class_index;
  out.n = e.n;
  out.r = e.r;
  out.q_hat = e.q_hat;
  out.var_g = e.var_g;
  out.var_g_term = e.var_g_term;
  out.sandwich_term = e.sandwich_term;
  out.avar = e.avar;
  out.std_error = e.std_error;
  out.alpha = e.alpha;
  out.ci_lower = e.ci_lower;
  out.ci_upper = e.ci_upper;
  return out;
}

pl_subclass_estimate to_c(const SubclassEstimate& e) {
  return {e.class_index, e.n, e.r, e.in_region, e.q_hat_w, e.p_hat_w, e.v_hat, e.var_w,
          e.var_term, e.sandwich_term, e.avar, e.std_error, e.alpha, e.ci_lower, e.ci_upper};
}

SubclassEstimate from_c(const pl_subclass_estimate& e) {
  SubclassEstimate out;
  out.class_index = e.class_index;
  out.n = e.n;
  out.r = e.r;
  out.in_region = e.in_region;
  out.q_hat_w = e.q_hat_w;
  out.p_hat_w = e.p_hat_w;
  out.v_hat = e.v_hat;
  out.var_w = e.var_w;
  out.var_term = e.var_term;
  out.sandwich_term = e.sandwich_term;
  out.avar = e.avar;
  out.std_error = e.std_error;
  out.alpha = e.alpha;
  out.ci_lower = e.ci_lower;
  out.ci_upper = e.ci_upper;
  return out;
}

pl_recommendation to_c(Recommendation r) {
  switch (r) {
    case Recommendation::Useful: return PL_USEFUL;
    case Recommendation::Marginal: return PL_MARGINAL;
    case Recommendation::NotUseful: return PL_NOT_USEFUL;
  }
  return PL_NOT_USEFUL;
}

Recommendation from_c(pl_recommendation r) {
  switch (r) {
    case PL_USEFUL: return Recommendation::Useful;
    case PL_MARGINAL: return Recommendation::Marginal;
    case PL_NOT_USEFUL: return Recommendation::NotUseful;
  }
  throw InvalidArgument("unknown recommendation value");
}

pl_dataset* wrap(Dataset d) { return new pl_dataset{std::move(d)}; }

}  // namespace

extern "C" {

const char* pl_version(void) { return "1.0.0"; }

const char* pl_status_string(pl_status status) {
  switch (status) {
    case PL_OK: return "ok";
    case PL_ERR_PARSE: return to_string(ErrorCode::Parse);
    case PL_ERR_SCHEMA: return to_string(ErrorCode::Schema);
    case PL_ERR_INVALID_DATASET: return to_string(ErrorCode::InvalidDataset);
    case PL_ERR_RANGE: return to_string(ErrorCode::Range);
    case PL_ERR_SHAPE: return to_string(ErrorCode::Shape);
    case PL_ERR_IO: return to_string(ErrorCode::Io);
    case PL_ERR_CONVERGENCE: return to_string(ErrorCode::Convergence);
    case PL_ERR_SINGULAR_DESIGN: return to_string(ErrorCode::SingularDesign);
    case PL_ERR_DEGENERATE_CLASS: return to_string(ErrorCode::DegenerateClass);
    case PL_ERR_SINGULAR_INFORMATION: return to_string(ErrorCode::SingularInformation);
    case PL_ERR_DEGENERATE_PRIOR: return to_string(ErrorCode::DegeneratePrior);
    case PL_ERR_EMPTY_REGION: return to_string(ErrorCode::EmptyRegion);
    case PL_ERR_COVERAGE: return to_string(ErrorCode::Coverage);
    case PL_ERR_CONFIG: return to_string(ErrorCode::Config);
    case PL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PL_ERR_INTERNAL: return "internal_error";
  }
  return "unknown_error";
}

const char* pl_last_error(void) { return last_error.c_str(); }

void pl_string_free(char* s) { std::free(s); }

pl_status pl_dataset_load_csv(const char* path, const pl_column_spec* spec, pl_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(spec, "spec");
    require(out, "out");
    ColumnSpec cs;
    cs.features = split_list(spec->features);
    cs.label = spec->label ? spec->label : "";
    cs.rule = LabelRule::parse(spec->rule ? spec->rule : "");
    *out = wrap(load_csv(path, cs));
  });
}

pl_status pl_dataset_load_recipe(const char* path, const char* recipe_name, pl_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(recipe_name, "recipe");
    require(out, "out");
    *out = wrap(load_csv(path, recipe(recipe_name)));
  });
}

pl_status pl_dataset_load_config(const char* path, const char* config_path, pl_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(config_path, "config_path");
    require(out, "out");
    *out = wrap(load_csv(path, ColumnSpec::from_config_file(config_path)));
  });
}

pl_status pl_dataset_from_arrays(const double* features, size_t rows, size_t feature_count,
                                 const int* labels, size_t class_count, pl_dataset** out) {
  return guarded([&] {
    if (rows * feature_count > 0) require(features, "features");
    if (rows > 0) require(labels, "labels");
    require(out, "out");
    std::vector<double> x(features, features + rows * feature_count);
    std::vector<std::optional<int>> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      if (labels[i] >= 0) y[i] = labels[i];
    }
    *out = wrap(Dataset::create(std::move(x), feature_count, y, class_count));
  });
}

pl_status pl_dataset_partition(const pl_dataset* data, size_t labeled, uint64_t seed, pl_dataset** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = wrap(partition(data->value, labeled, seed));
  });
}

pl_status pl_dataset_get_info(const pl_dataset* data, pl_dataset_info* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    const Dataset& d = data->value;
    *out = {d.size(), d.labeled(), d.feature_count(), d.class_count(), d.has_truth() ? 1 : 0};
  });
}

pl_status pl_dataset_class_name(const pl_dataset* data, int class_index, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    data->value.check_class(class_index);
    const auto& names = data->value.class_names();
    const auto j = static_cast<std::size_t>(class_index);
    *out = duplicate(j < names.size() ? names[j] : std::to_string(class_index));
  });
}

pl_status pl_dataset_find_class(const pl_dataset* data, const char* name, int* out) {
  return guarded([&] {
    require(data, "data");
    require(name, "name");
    require(out, "out");
    const auto& names = data->value.class_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (names[j] == name) {
        *out = static_cast<int>(j);
        return;
      }
    }
    char* end = nullptr;
    const long j = std::strtol(name, &end, 10);
    if (end == name || *end != '\0') {
      throw Error(ErrorCode::Config, std::string("unknown class '") + name + "'");
    }
    if (j < 0 || static_cast<std::size_t>(j) >= data->value.class_count()) {
      throw Error(ErrorCode::Config, std::string("class index ") + name + " out of range");
    }
    *out = static_cast<int>(j);
  });
}

pl_status pl_dataset_to_csv(const pl_dataset* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    std::ostringstream s;
    write_csv(data->value, s);
    *out = duplicate(s.str());
  });
}

void pl_dataset_free(pl_dataset* data) { delete data; }

pl_status pl_model_fit(const pl_dataset* data, pl_model** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = new pl_model{FittedModel::fit(data->value)};
  });
}

pl_status pl_model_fit_class(const pl_dataset* data, int class_index, pl_model** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = new pl_model{FittedModel::fit(data->value, std::vector<int>{class_index})};
  });
}

pl_status pl_model_to_json(const pl_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    nlohmann::json j = nlohmann::json::array();
    for (const auto& fit : model->value.fits()) j.push_back(to_json(fit));
    *out = duplicate(dump(j));
  });
}

void pl_model_free(pl_model* model) { delete model; }

pl_status pl_estimate_prior(const pl_dataset* data, const pl_model* model, int class_index, double alpha,
                            pl_prior_estimate* out) {
  return guarded([&] {
    require(data, "data");
    require(model, "model");
    require(out, "out");
    *out = to_c(estimate_prior(data->value, model->value, class_index, alpha));
  });
}

pl_status pl_estimate_classical(const pl_dataset* data, int class_index, double alpha,
                                pl_prior_estimate* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = to_c(classical_prior(data->value, class_index, alpha));
  });
}

pl_status pl_variance_reduction(const pl_prior_estimate* estimate, double* out) {
  return guarded([&] {
    require(estimate, "estimate");
    require(out, "out");
    *out = variance_reduction(from_c(*estimate));
  });
}

pl_status pl_labeled_only_avar(const pl_prior_estimate* estimate, double* out) {
  return guarded([&] {
    require(estimate, "estimate");
    require(out, "out");
    *out = labeled_only_avar(from_c(*estimate));
  });
}

pl_status pl_prior_estimate_to_json(const pl_prior_estimate* estimate, char** out) {
  return guarded([&] {
    require(estimate, "estimate");
    require(out, "out");
    *out = duplicate(dump(to_json(from_c(*estimate))));
  });
}

pl_status pl_estimate_subclass(const pl_dataset* data, const pl_model* model, int class_index,
                               const char* const* regions, size_t region_count, double alpha,
                               pl_subclass_estimate* out) {
  return guarded([&] {
    require(data, "data");
    require(model, "model");
    require(out, "out");
    *out = to_c(estimate_subclass(data->value, model->value, class_index,
                                  region_from(regions, region_count), alpha));
  });
}

pl_status pl_classical_subclass(const pl_dataset* data, int class_index, const char* const* regions,
                                size_t region_count, double alpha, pl_subclass_estimate* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    *out = to_c(classical_subclass(data->value, class_index, region_from(regions, region_count), alpha));
  });
}

pl_status pl_describe_region(const char* const* regions, size_t region_count, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = duplicate(region_from(regions, region_count).describe());
  });
}

pl_status pl_subclass_estimate_to_json(const pl_subclass_estimate* estimate, char** out) {
  return guarded([&] {
    require(estimate, "estimate");
    require(out, "out");
    *out = duplicate(dump(to_json(from_c(*estimate))));
  });
}

pl_status pl_estimate_discrete(const pl_dataset* data, int class_index, double alpha,
                               pl_discrete_estimate* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    const auto table = DiscreteTable::tabulate(data->value);
    const auto e = estimate_discrete(table, class_index, alpha);
    *out = {e.class_index, e.n, table.cells().size(), e.q_hat, e.avar, e.avar_floored ? 1 : 0,
            e.std_error, e.alpha, e.ci_lower, e.ci_upper};
  });
}

pl_status pl_estimate_discrete_json(const pl_dataset* data, int class_index, double alpha, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    const auto table = DiscreteTable::tabulate(data->value);
    *out = duplicate(dump(to_json(estimate_discrete(table, class_index, alpha))));
  });
}

pl_status pl_discrete_table_csv(const pl_dataset* data, char** out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    std::ostringstream s;
    DiscreteTable::tabulate(data->value).write_csv(s);
    *out = duplicate(s.str());
  });
}

pl_status pl_diagnose(const pl_dataset* data, const pl_model* model, int class_index, double useful_threshold,
                      double marginal_threshold, pl_diagnostics* out) {
  return guarded([&] {
    require(data, "data");
    require(model, "model");
    require(out, "out");
    const auto r = diagnose(data->value, model->value, class_index, {useful_threshold, marginal_threshold});
    *out = {r.class_index, r.q_hat, r.baseline_error, r.misclassification_rate, r.eta,
            r.eta_clamped ? 1 : 0, r.sigma, to_c(r.recommendation), r.thresholds.useful,
            r.thresholds.marginal};
  });
}

const char* pl_recommendation_string(pl_recommendation r) {
  try {
    return to_string(from_c(r));
  } catch (...) {
    return "unknown";
  }
}

pl_status pl_diagnostics_to_json(const pl_diagnostics* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    DiagnosticsReport r;
    r.class_index = report->class_index;
    r.q_hat = report->q_hat;
    r.baseline_error = report->baseline_error;
    r.misclassification_rate = report->misclassification_rate;
    r.eta = report->eta;
    r.eta_clamped = report->eta_clamped != 0;
    r.sigma = report->sigma;
    r.recommendation = from_c(report->recommendation);
    r.thresholds = {report->useful_threshold, report->marginal_threshold};
    *out = duplicate(dump(to_json(r)));
  });
}

pl_status pl_evaluate(const pl_dataset* data, int class_index, const pl_eval_config* config, pl_curve** out) {
  return guarded([&] {
    require(data, "data");
    require(config, "config");
    require(out, "out");
    SubsampleConfig sc;
    if (config->replicates > 0) sc.replicates = config->replicates;
    sc.grid = config->grid && *config->grid ? parse_grid(config->grid) : default_grid(data->value.size());
    sc.seed = config->seed;
    sc.threads = config->threads;
    *out = new pl_curve{run_grid(data->value, class_index, sc)};
  });
}

pl_status pl_curve_smooth(const pl_curve* curve, size_t window, pl_curve** out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    *out = new pl_curve{smooth_curve(curve->value, window)};
  });
}

size_t pl_curve_size(const pl_curve* curve) { return curve ? curve->value.records.size() : 0; }

pl_status pl_curve_record_at(const pl_curve* curve, size_t k, pl_curve_record* out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    if (k >= curve->value.records.size()) throw Error(ErrorCode::Range, "curve record index out of range");
    const CurveRecord& r = curve->value.records[k];
    *out = {r.labeled, r.unlabeled, r.mse_semi, r.mse_classical, r.ratio, r.ratio_defined ? 1 : 0,
            r.replicates_used, r.failures, r.valid ? 1 : 0};
  });
}

pl_status pl_curve_to_csv(const pl_curve* curve, char** out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    std::ostringstream s;
    write_csv(curve->value, s);
    *out = duplicate(s.str());
  });
}

pl_status pl_curve_to_json(const pl_curve* curve, char** out) {
  return guarded([&] {
    require(curve, "curve");
    require(out, "out");
    *out = duplicate(dump(to_json(curve->value)));
  });
}

void pl_curve_free(pl_curve* curve) { delete curve; }

}  // extern "C"
