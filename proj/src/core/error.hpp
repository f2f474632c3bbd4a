#pragma once

#include <stdexcept>
#include <string>

namespace fhm {

enum class Errc {
  bad_argument,
  parse_error,
  io_error,
  non_contractive,
  disconnected,
  not_pcf,
  bad_letter,
  level_too_small,
  level_too_large,
  unsupported_fractal,
  ambiguous_path,
  no_admissible_cut,
  cut_not_in_graph,
  cut_on_boundary,
  increment_too_large,
  singular_system,
  singular_interior,
  no_fixed_point,
  missing_value,
  missing_coordinates,
  degree_mismatch,
  residual_too_large,
  internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& msg);

}  // namespace fhm
