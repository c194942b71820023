#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace glhs {

enum class ErrorKind {
  InvalidSize,
  InvalidParameter,
  InvalidInput,
  NumericalBlowup,
  DimensionCap,
  Query,
  InsufficientSignal,
  Internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries the offending state so a blowup can be reproduced offline.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double time, std::vector<double> masses)
      : Error(ErrorKind::NumericalBlowup, what), time_(time), masses_(std::move(masses)) {}

  double time() const noexcept { return time_; }
  const std::vector<double>& masses() const noexcept { return masses_; }

 private:
  double time_;
  std::vector<double> masses_;
};

}  // namespace glhs
