#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhfields {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced while evaluating a model; index is the flat
// jet-coordinate (or output) slot that went bad.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class RegularityError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(const std::string& what, long point = -1)
      : Error(what), point_(point) {}
  long point() const noexcept { return point_; }

 private:
  long point_;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class DriftError : public Error {
 public:
  DriftError(const std::string& what, long step = -1) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhfields
