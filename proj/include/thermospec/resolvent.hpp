#ifndef THERMOSPEC_RESOLVENT_HPP
#define THERMOSPEC_RESOLVENT_HPP

// Resolvent norms ||(i lambda - A)^{-1}|| on the imaginary axis, the explicit
// resonant witness solutions, and power-law growth fits.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermospec/errors.hpp"
#include "thermospec/generator.hpp"
#include "thermospec/least_squares.hpp"
#include "thermospec/parallel.hpp"

namespace thermospec {

/// sigma_min below this marks i lambda as a (numerical) eigenvalue.
inline constexpr double kNearEigenvalueSigma = 1e-14;

namespace detail {

inline double smallest_singular_value_3x3(const Eigen::Matrix3cd& m) {
  const Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m);
  return svd.singularValues()(2);
}

// sigma_min of a dense square matrix. Inverse iteration on (M^H M)^{-1}
// through one LU factorization; falls back to a full SVD when the LU is close
// to singular or the iteration stalls on a small spectral gap.
inline double smallest_singular_value(const Eigen::MatrixXcd& m) {
  constexpr int kMaxIterations = 200;
  constexpr double kTolerance = 1e-14;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (lu.rcond() > 1e-13) {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXcd x(m.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(unit(rng), unit(rng));
    x.normalize();
    double estimate = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
      const Eigen::VectorXcd y = lu.solve(x);
      const double next = y.norm();  // ||M^{-1} x|| with ||x|| = 1
      x = lu.adjoint().solve(y);
      x.normalize();
      if (!std::isfinite(next)) break;
      if (std::abs(next - estimate) <= kTolerance * next) return 1.0 / next;
      estimate = next;
    }
  }
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace detail

/// sigma_min(i lambda I - B) with B the Euclidean form of the generator.
inline double resolvent_sigma_min(const CoupledGenerator& gen, double lambda) {
  const Complex shift(0.0, lambda);
  if (gen.same_basis()) {
    double sigma = std::numeric_limits<double>::infinity();
    for (int m = 0; m < gen.mode_count(); ++m) {
      const Eigen::Matrix3cd shifted =
          shift * Eigen::Matrix3cd::Identity() -
          gen.modal_euclidean_block(m).cast<Complex>();
      sigma = std::min(sigma, detail::smallest_singular_value_3x3(shifted));
    }
    return sigma;
  }
  Eigen::MatrixXcd shifted = -gen.euclidean_matrix().cast<Complex>();
  shifted.diagonal().array() += shift;
  return detail::smallest_singular_value(shifted);
}

/// ||(i lambda I - A)^{-1}|| in the energy norm, i.e. 1 / sigma_min.
inline double resolvent_norm(const CoupledGenerator& gen, double lambda,
                             double near_tolerance = kNearEigenvalueSigma) {
  const double sigma = resolvent_sigma_min(gen, lambda);
  if (!(sigma >= near_tolerance)) {
    throw NearEigenvalue("resolvent_norm: i*lambda is numerically an eigenvalue "
                         "at lambda = " + std::to_string(lambda) +
                             " (sigma_min = " + std::to_string(sigma) + ")",
                         lambda, sigma);
  }
  return 1.0 / sigma;
}

struct ResolventScan {
  std::vector<double> lambdas;
  /// +inf where the point is flagged.
  std::vector<double> norms;
  std::vector<bool> flagged;
  BoundaryKind bc_u = BoundaryKind::dirichlet;
  BoundaryKind bc_theta = BoundaryKind::dirichlet;
  Coupling coupling;
  int mode_count = 0;

  bool any_flagged() const {
    for (const bool f : flagged) {
      if (f) return true;
    }
    return false;
  }
};

inline ResolventScan scan(const CoupledGenerator& gen,
                          const std::vector<double>& lambdas,
                          double near_tolerance = kNearEigenvalueSigma) {
  if (lambdas.empty()) throw InvalidArgument("scan: empty lambda grid");
  ResolventScan out;
  out.lambdas = lambdas;
  out.norms.assign(lambdas.size(), 0.0);
  std::vector<char> flags(lambdas.size(), 0);
  out.bc_u = gen.bc_u();
  out.bc_theta = gen.bc_theta();
  out.coupling = gen.coupling();
  out.mode_count = gen.mode_count();
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const double sigma = resolvent_sigma_min(gen, lambdas[i]);
    if (sigma >= near_tolerance) {
      out.norms[i] = 1.0 / sigma;
    } else {
      out.norms[i] = std::numeric_limits<double>::infinity();
      flags[i] = 1;
    }
  });
  out.flagged.assign(flags.begin(), flags.end());
  return out;
}

/// sqrt(lambda_m) of the displacement basis for one-based m in [first, last].
inline std::vector<double> mode_frequency_grid(const CoupledGenerator& gen,
                                               int first, int last) {
  if (first < 1 || last > gen.mode_count() || first > last) {
    throw InvalidArgument("mode grid " + std::to_string(first) + ".." +
                          std::to_string(last) + " outside 1.." +
                          std::to_string(gen.mode_count()));
  }
  std::vector<double> grid;
  for (int m = first; m <= last; ++m) {
    grid.push_back(std::sqrt(gen.lambda_u()(m - 1)));
  }
  return grid;
}

inline std::vector<double> uniform_grid(double lo, double hi, int samples) {
  if (samples < 1 || !(hi >= lo)) {
    throw InvalidArgument("uniform grid needs lo <= hi and samples >= 1");
  }
  if (samples == 1) return {lo};
  std::vector<double> grid(samples);
  for (int i = 0; i < samples; ++i) grid[i] = lo + (hi - lo) * i / (samples - 1);
  grid.back() = hi;
  return grid;
}

/// Explicit resonant solution of (i lambda - A) U = (0, g, 0) with g the m-th
/// displacement eigenfunction and lambda = sqrt of its eigenvalue. The ansatz
/// u = a e_m, v = i lambda a e_m, theta = b e_m gives
///   b = 1/gamma,  a = (1 - i sqrt(lambda_m)) / gamma^2,
/// exactly when both fields share the eigenbasis (DD, NN). For mixed kinds the
/// same ansatz is not closed; the returned values follow the scalar relations
/// b = 1/gamma, a = sqrt(1 + lambda_m^2 / mu_m) / gamma^2 and are labeled
/// inexact.
struct WitnessSolution {
  int mode = 0;
  double lambda = 0.0;
  Complex a;
  Complex b;
  /// lambda_m |a|^2, the displacement part of the energy norm.
  double energy_norm_sq_u = 0.0;
  bool exact = false;
};

inline WitnessSolution witness(BoundaryKind bc_u, BoundaryKind bc_theta,
                               int mode, double gamma,
                               double length = std::numbers::pi) {
  if (gamma == 0.0 || !std::isfinite(gamma)) {
    throw InvalidArgument("witness: requires gamma != 0");
  }
  if (mode < 1) throw InvalidArgument("witness: mode index is one-based");
  const ModalBasis bu(bc_u, length, mode);
  const ModalBasis bt(bc_theta, length, mode);
  const double lam_u = bu.eigenvalue(mode - 1);
  const double lam_t = bt.eigenvalue(mode - 1);
  WitnessSolution w;
  w.mode = mode;
  w.lambda = std::sqrt(lam_u);
  w.b = 1.0 / gamma;
  w.exact = bc_u == bc_theta;
  if (w.exact) {
    w.a = Complex(1.0, -std::sqrt(lam_u)) / (gamma * gamma);
  } else {
    w.a = std::sqrt(1.0 + lam_u * lam_u / lam_t) / (gamma * gamma);
  }
  w.energy_norm_sq_u = lam_u * std::norm(w.a);
  return w;
}

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log r(lambda) against log lambda over scan indices
/// [first, last].
inline GrowthFit growth_exponent(const ResolventScan& s, std::size_t first,
                                 std::size_t last) {
  if (last >= s.lambdas.size() || first > last) {
    throw InvalidArgument("growth_exponent: window outside scan");
  }
  if (last - first + 1 < 5) {
    throw InvalidArgument("growth_exponent: need at least 5 points in window");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = first; i <= last; ++i) {
    if (!(s.lambdas[i] > 0.0)) {
      throw InvalidArgument("growth_exponent: non-positive lambda in window");
    }
    if (!std::isfinite(s.norms[i]) || !(s.norms[i] > 0.0)) {
      throw InvalidArgument("growth_exponent: non-finite norm in window at "
                            "lambda = " + std::to_string(s.lambdas[i]));
    }
    x.push_back(std::log(s.lambdas[i]));
    y.push_back(std::log(s.norms[i]));
  }
  const LinearFit f = fit_line(x, y);
  return {f.slope, f.intercept, f.r_squared};
}

/// Window selected by lambda value, lo <= lambda <= hi.
inline GrowthFit growth_exponent(const ResolventScan& s, double lo, double hi) {
  std::size_t first = s.lambdas.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
    if (s.lambdas[i] >= lo && s.lambdas[i] <= hi) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (first == s.lambdas.size()) {
    throw InvalidArgument("growth_exponent: no scan point inside window");
  }
  return growth_exponent(s, first, last);
}

}  // namespace thermospec

#endif  // THERMOSPEC_RESOLVENT_HPP
