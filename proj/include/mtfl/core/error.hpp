#pragma once

#include <stdexcept>
#include <string>

namespace mtfl {

// Exit-code contract: 0 ok, 2 config error, 3 data error, 4 solver
// non-convergence in strict mode. The CLI maps these types onto that.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace mtfl
