#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdm {

enum class ErrorCode {
  invalid_input,
  cannot_calibrate,
  invalid_depth,
  corrupt_tree,
  invalid_config,
  undefined_similarity,
  incomplete_library,
  empty_dataset,
  load_error,
  validation_error,
  split_error,
  io_error,
};

// Stable, machine-readable name ("invalid_input", ...). Used by the CLI error line.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pdm
