#ifndef PEDFLOW_ERRORS_HPP
#define PEDFLOW_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pedflow {

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Duplicate keys, non-monotone frames and similar database violations.
class IntegrityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class GeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class RankDeficiencyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pedestrian generator could not place the requested crowd.
class CapacityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite state inside the simulator.
class NumericalFault : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (gap in frames, zero variance, ...).
class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pedflow

#endif  // PEDFLOW_ERRORS_HPP
