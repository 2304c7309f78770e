#pragma once

#include <stdexcept>
#include <string>

namespace gpb {

// Invalid argument or precondition violation (negative lengths, a < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The zero-energy solution has a node beyond the core or u' <= 0: the
// scattering length is negative or undefined.
class ScatteringRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The truncation bracket is wider than requested; suggested_radius is an
// outer radius at which the tail bound meets the tolerance.
class RangeTooShortError : public std::runtime_error {
 public:
  RangeTooShortError(const std::string& what, double suggested_radius)
      : std::runtime_error(what), suggested_radius_(suggested_radius) {}
  double suggested_radius() const noexcept { return suggested_radius_; }

 private:
  double suggested_radius_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}
  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

// Config file problems; line is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace gpb
