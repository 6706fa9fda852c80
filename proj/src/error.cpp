#include "priorlift/error.hpp"

namespace priorlift {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::Schema: return "schema_error";
    case ErrorCode::InvalidDataset: return "invalid_dataset";
    case ErrorCode::Range: return "range_error";
    case ErrorCode::Shape: return "shape_error";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Convergence: return "convergence_error";
    case ErrorCode::SingularDesign: return "singular_design";
    case ErrorCode::DegenerateClass: return "degenerate_class";
    case ErrorCode::SingularInformation: return "singular_information";
    case ErrorCode::DegeneratePrior: return "degenerate_prior";
    case ErrorCode::EmptyRegion: return "empty_region";
    case ErrorCode::Coverage: return "coverage_error";
    case ErrorCode::Config: return "config_error";
  }
  return "unknown_error";
}

}  // namespace priorlift
