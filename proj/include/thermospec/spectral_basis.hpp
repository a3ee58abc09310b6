#ifndef THERMOSPEC_SPECTRAL_BASIS_HPP
#define THERMOSPEC_SPECTRAL_BASIS_HPP

// Closed-form eigenpairs of the Dirichlet and mean-zero Neumann Laplacian on
// the interval (0, L), plus Gram matrices between the two families.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "thermospec/errors.hpp"

namespace thermospec {

enum class BoundaryKind { dirichlet, neumann };

inline char to_char(BoundaryKind kind) {
  return kind == BoundaryKind::dirichlet ? 'D' : 'N';
}

inline BoundaryKind boundary_from_char(char c) {
  switch (c) {
    case 'D':
    case 'd':
      return BoundaryKind::dirichlet;
    case 'N':
    case 'n':
      return BoundaryKind::neumann;
    default:
      throw InvalidArgument(std::string("unknown boundary kind '") + c +
                            "' (expected D or N)");
  }
}

/// Dense Gram matrix; entry (m, k) is <col_k, row_m> in L^2(0, L).
using GramMatrix = Eigen::MatrixXd;

/// Eigenbasis of -d^2/dx^2 on (0, L).
///
/// Mode index m is zero-based in the API; the corresponding wavenumber is
/// (m + 1) * pi / L for both kinds. The Neumann constant mode is excluded, so
/// every eigenvalue is strictly positive and every Neumann function has zero
/// mean. Functions are normalized to unit L^2 norm by sqrt(2 / L).
class ModalBasis {
 public:
  ModalBasis(BoundaryKind kind, double length, int mode_count)
      : kind_(kind), length_(length), mode_count_(mode_count) {
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw InvalidArgument("basis length must be positive and finite");
    }
    if (mode_count < 1) {
      throw InvalidArgument("basis needs at least one mode");
    }
    eigenvalues_.resize(mode_count);
    for (int m = 0; m < mode_count; ++m) {
      const double k = wavenumber(m);
      eigenvalues_[m] = k * k;
    }
  }

  BoundaryKind kind() const noexcept { return kind_; }
  double length() const noexcept { return length_; }
  int mode_count() const noexcept { return mode_count_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(int m) const { return eigenvalues_(m); }

  double wavenumber(int m) const {
    return (m + 1) * std::numbers::pi / length_;
  }

  double normalization() const { return std::sqrt(2.0 / length_); }

  double function(int m, double x) const {
    const double arg = wavenumber(m) * x;
    return normalization() *
           (kind_ == BoundaryKind::dirichlet ? std::sin(arg) : std::cos(arg));
  }

  double derivative(int m, double x) const {
    const double k = wavenumber(m);
    const double arg = k * x;
    return normalization() * k *
           (kind_ == BoundaryKind::dirichlet ? std::cos(arg) : -std::sin(arg));
  }

 private:
  BoundaryKind kind_;
  double length_;
  int mode_count_;
  Eigen::VectorXd eigenvalues_;
};

inline ModalBasis make_basis(BoundaryKind kind, double length, int mode_count) {
  return ModalBasis(kind, length, mode_count);
}

namespace detail {

// <cos(k pi x / L), sin(m pi x / L)> with both normalized, one-based m, k.
// Reduces to (2/pi) * int_0^pi sin(m y) cos(k y) dy, independent of L.
inline double sine_cosine_overlap(int m, int k) {
  if ((m + k) % 2 == 0) return 0.0;
  const double md = m;
  const double kd = k;
  return (2.0 / std::numbers::pi) * 2.0 * md / (md * md - kd * kd);
}

}  // namespace detail

inline GramMatrix gram(const ModalBasis& rows, const ModalBasis& cols) {
  if (rows.length() != cols.length()) {
    throw InvalidArgument("gram: bases live on intervals of different length");
  }
  GramMatrix g = GramMatrix::Zero(rows.mode_count(), cols.mode_count());
  if (rows.kind() == cols.kind()) {
    const int n = std::min(rows.mode_count(), cols.mode_count());
    for (int m = 0; m < n; ++m) g(m, m) = 1.0;
    return g;
  }
  const bool sine_rows = rows.kind() == BoundaryKind::dirichlet;
  for (int m = 0; m < rows.mode_count(); ++m) {
    for (int k = 0; k < cols.mode_count(); ++k) {
      g(m, k) = sine_rows ? detail::sine_cosine_overlap(m + 1, k + 1)
                          : detail::sine_cosine_overlap(k + 1, m + 1);
    }
  }
  return g;
}

/// Pointwise synthesis of sum_m coefficients[m] * basis_m(x).
template <class Scalar>
std::vector<Scalar> evaluate(const ModalBasis& basis,
                             std::span<const Scalar> coefficients,
                             std::span<const double> points) {
  if (static_cast<int>(coefficients.size()) > basis.mode_count()) {
    throw InvalidArgument("evaluate: more coefficients than basis modes");
  }
  std::vector<Scalar> values;
  values.reserve(points.size());
  for (const double x : points) {
    if (!(x >= 0.0 && x <= basis.length())) {
      throw InvalidArgument("evaluate: point " + std::to_string(x) +
                            " outside [0, L]");
    }
    Scalar sum{};
    for (std::size_t m = 0; m < coefficients.size(); ++m) {
      sum += coefficients[m] * basis.function(static_cast<int>(m), x);
    }
    values.push_back(sum);
  }
  return values;
}

/// Derivative of the synthesized expansion, used for physical-space energy.
template <class Scalar>
std::vector<Scalar> evaluate_derivative(const ModalBasis& basis,
                                        std::span<const Scalar> coefficients,
                                        std::span<const double> points) {
  if (static_cast<int>(coefficients.size()) > basis.mode_count()) {
    throw InvalidArgument("evaluate: more coefficients than basis modes");
  }
  std::vector<Scalar> values;
  values.reserve(points.size());
  for (const double x : points) {
    if (!(x >= 0.0 && x <= basis.length())) {
      throw InvalidArgument("evaluate: point " + std::to_string(x) +
                            " outside [0, L]");
    }
    Scalar sum{};
    for (std::size_t m = 0; m < coefficients.size(); ++m) {
      sum += coefficients[m] * basis.derivative(static_cast<int>(m), x);
    }
    values.push_back(sum);
  }
  return values;
}

}  // namespace thermospec

#endif  // THERMOSPEC_SPECTRAL_BASIS_HPP
