#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floquet_ab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a precondition or a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Two chromophores share a position, so the point-dipole coupling diverges.
class SingularityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An iterative or time-stepping method did not reach its accuracy target.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double off_norm)
      : NumericalError(what), off_norm_(off_norm) {}
  double off_norm() const noexcept { return off_norm_; }

 private:
  double off_norm_;
};

class StepSizeError : public NumericalError {
 public:
  StepSizeError(const std::string& what, double unitarity_defect)
      : NumericalError(what), unitarity_defect_(unitarity_defect) {}
  double unitarity_defect() const noexcept { return unitarity_defect_; }

 private:
  double unitarity_defect_;
};

// A hop of a loop path has a vanishing matrix element.
class BrokenPathError : public Error {
 public:
  BrokenPathError(const std::string& what, std::size_t hop)
      : Error(what), hop_(hop) {}
  std::size_t hop() const noexcept { return hop_; }

 private:
  std::size_t hop_;
};

}  // namespace floquet_ab
