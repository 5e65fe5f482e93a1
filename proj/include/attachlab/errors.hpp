#pragma once

#include <stdexcept>
#include <string>

namespace attachlab {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical error.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  static constexpr int exit_code = 2;
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
  static constexpr int exit_code = 3;
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
  static constexpr int exit_code = 4;
};

}  // namespace attachlab
