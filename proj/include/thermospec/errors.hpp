#ifndef THERMOSPEC_ERRORS_HPP
#define THERMOSPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace thermospec {

/// Precondition violation on a public entry point.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shifted generator is numerically singular; carries the reciprocal
/// condition estimate of the factored matrix.
class SingularShift : public std::runtime_error {
 public:
  SingularShift(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// i*lambda sits (numerically) on the spectrum of the truncated generator.
class NearEigenvalue : public std::runtime_error {
 public:
  NearEigenvalue(const std::string& what, double lambda, double sigma_min)
      : std::runtime_error(what), lambda_(lambda), sigma_min_(sigma_min) {}
  double lambda() const noexcept { return lambda_; }
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double lambda_;
  double sigma_min_;
};

/// Eigendecomposition unusable for propagation (ill-conditioned eigenvectors
/// or solver failure).
class DecompositionError : public std::runtime_error {
 public:
  DecompositionError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace thermospec

#endif  // THERMOSPEC_ERRORS_HPP
