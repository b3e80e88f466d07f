#ifndef DENDRA_ERRORS_HPP
#define DENDRA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dendra {

/// Operand lengths or shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain an operation accepts.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed dataset or checkpoint. `line()` is 1-based, 0 when unknown.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dendra

#endif  // DENDRA_ERRORS_HPP
