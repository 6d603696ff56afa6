#pragma once

#include <stdexcept>
#include <string>

namespace dscope {

enum class Errc {
  invalid_config,
  invalid_dataset,
  missing_image,
  unreadable_file,
  dimension_mismatch,
  out_of_bounds,
  length_mismatch,
  empty_dataset,
  empty_matrix,
  degenerate_target,
  no_routes,
  invalid_range,
  empty_summary,
  io_failure,
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_config: return "invalid_config";
    case Errc::invalid_dataset: return "invalid_dataset";
    case Errc::missing_image: return "missing_image";
    case Errc::unreadable_file: return "unreadable_file";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::out_of_bounds: return "out_of_bounds";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::empty_dataset: return "empty_dataset";
    case Errc::empty_matrix: return "empty_matrix";
    case Errc::degenerate_target: return "degenerate_target";
    case Errc::no_routes: return "no_routes";
    case Errc::invalid_range: return "invalid_range";
    case Errc::empty_summary: return "empty_summary";
    case Errc::io_failure: return "io_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dscope
