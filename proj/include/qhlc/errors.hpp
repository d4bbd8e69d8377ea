#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qhlc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the region where an operation is defined. CLI exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Level value sits on an endpoint of the three-root interval (double root).
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

class BadBracket : public DomainError {
 public:
  using DomainError::DomainError;
};

// Inverse comparison curve evaluated exactly at the junction abscissa.
class BranchGapError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The computation ran but could not produce a trustworthy answer. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MaxStepsExceeded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Graph-form integration met vf(v)+z^2 <= 0.
class LeftGraphRegionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeedTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AmbiguousBracket : public NumericalError {
 public:
  AmbiguousBracket(const std::string& what, std::vector<double> fixed_points)
      : NumericalError(what), fixed_points_(std::move(fixed_points)) {}

  const std::vector<double>& fixed_points() const noexcept { return fixed_points_; }

 private:
  std::vector<double> fixed_points_;
};

}  // namespace qhlc
