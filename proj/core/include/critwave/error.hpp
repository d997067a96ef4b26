#pragma once

#include <stdexcept>
#include <string>

namespace critwave {

enum class Errc {
  invalid_parameter,
  out_of_domain,
  invalid_data,
  invalid_band,
  degenerate_input,
  invalid_config,
  invalid_input,
  fit_unavailable,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Exception carrying a machine-readable error category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace critwave
