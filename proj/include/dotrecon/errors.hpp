#ifndef DOTRECON_ERRORS_HPP
#define DOTRECON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dotrecon {

// Error categories map onto the CLI exit codes (config=2, numerical=3, io=4).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dotrecon

#endif
