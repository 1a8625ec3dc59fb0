#ifndef OUTAGE_ERROR_HPP
#define OUTAGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace outage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Weight vector that is not a member of the (inequality) simplex.
class InvalidWeights : public DomainError {
 public:
  InvalidWeights(const std::string& what, std::size_t index)
      : DomainError(what), index_(index) {}

  /// Position of the offending entry (npos when the sum is at fault).
  std::size_t index() const noexcept { return index_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t index_;
};

/// All weights are zero and nothing was appended: the law is a point mass.
class DegenerateDistribution : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Derivative requested at x = 0 where the density is not smooth enough.
class Discontinuity : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A single exponential has a monotone density and no interior mode.
class NoInteriorMode : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Violated precondition that is not a pure domain issue.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not reach the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace outage

#endif  // OUTAGE_ERROR_HPP
