#pragma once

#include <stdexcept>
#include <string>

namespace remaster {

/// Shape disagreement between operands. `axis()` names the offending axis
/// ("batch", "channels", "time", "height", "width", "rank", ...).
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::string axis, const std::string& what)
      : std::invalid_argument(what), axis_(std::move(axis)) {}
  const std::string& axis() const noexcept { return axis_; }

 private:
  std::string axis_;
};

class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data that is well-formed but unusable (too small, out of range, empty bank).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AutogradError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace remaster
