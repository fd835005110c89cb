#include "pdm/error.hpp"

namespace pdm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::cannot_calibrate: return "cannot_calibrate";
    case ErrorCode::invalid_depth: return "invalid_depth";
    case ErrorCode::corrupt_tree: return "corrupt_tree";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::undefined_similarity: return "undefined_similarity";
    case ErrorCode::incomplete_library: return "incomplete_library";
    case ErrorCode::empty_dataset: return "empty_dataset";
    case ErrorCode::load_error: return "load_error";
    case ErrorCode::validation_error: return "validation_error";
    case ErrorCode::split_error: return "split_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace pdm
