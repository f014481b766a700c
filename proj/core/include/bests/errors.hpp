#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bests {

// Argument outside the admissible range of a model function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Conservation cannot be satisfied because every output unit is already
// saturated. Carries the volume that has nowhere to go.
class SaturationError : public std::runtime_error {
 public:
  SaturationError(const std::string& what, double overflow_ml)
      : std::runtime_error(what), overflow_ml_(overflow_ml) {}

  double overflow_ml() const noexcept { return overflow_ml_; }

 private:
  double overflow_ml_;
};

class PlanningError : public std::runtime_error {
 public:
  PlanningError(const std::string& what, std::size_t waypoint_index)
      : std::runtime_error(what), waypoint_index_(waypoint_index) {}

  std::size_t waypoint_index() const noexcept { return waypoint_index_; }

 private:
  std::size_t waypoint_index_;
};

// Invalid user-supplied parameters. `field` is a dotted path such as
// "calibration_targets.speed_cm_s".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message),
        field_(field),
        message_(message) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

}  // namespace bests
