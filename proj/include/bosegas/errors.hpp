#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace bosegas {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// delta-function corner of a Gaussian integral (t=0, x=0)
class DegenerateDelta : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidIntegrand : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> diffs = {})
      : NumericalError(what), differences(std::move(diffs)) {}
  std::vector<double> differences;
};

class InvalidGrid : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NumericalFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularOperator : public NumericalError {
 public:
  SingularOperator(const std::string& what, double cond_estimate)
      : NumericalError(what), condition(cond_estimate) {}
  double condition;
};

class ExtrapolationWarning : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bosegas
