#ifndef THERMOSPEC_GENERATOR_HPP
#define THERMOSPEC_GENERATOR_HPP

// Truncated block generator of the weakly coupled wave/heat system
//
//   u_tt = -A_O u - alpha theta,   theta_t = -A_O' theta - beta u_t,
//
// in coefficient space. The symmetric thermoelastic coupling is
// alpha = gamma, beta = -gamma, which gives the block operator
//
//   [[0, I, 0], [-Lambda_O, 0, -gamma G], [0, gamma G^T, -Lambda_O']].

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "thermospec/errors.hpp"
#include "thermospec/spectral_basis.hpp"

namespace thermospec {

using Complex = std::complex<double>;

/// Coupling constants. alpha multiplies theta in the wave equation and beta
/// multiplies u_t in the heat equation, both with a leading minus sign.
struct Coupling {
  double alpha = 1.0;
  double beta = -1.0;

  static Coupling symmetric(double gamma) { return {gamma, -gamma}; }
  static Coupling general(double alpha, double beta) { return {alpha, beta}; }

  bool is_symmetric() const noexcept { return alpha == -beta; }
  bool is_decoupled() const noexcept { return alpha == 0.0 && beta == 0.0; }
  /// The symmetric coupling constant; meaningful when is_symmetric().
  double gamma() const noexcept { return alpha; }
};

/// Coefficient triple U = (u, v, theta). u and v are expanded in the
/// displacement basis, theta in the temperature basis.
struct StateVector {
  Eigen::VectorXcd u;
  Eigen::VectorXcd v;
  Eigen::VectorXcd theta;

  static StateVector zero(int n) {
    return {Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n),
            Eigen::VectorXcd::Zero(n)};
  }

  int size() const noexcept { return static_cast<int>(u.size()); }
  bool consistent() const noexcept {
    return u.size() == v.size() && v.size() == theta.size();
  }

  Eigen::VectorXcd stacked() const {
    Eigen::VectorXcd out(3 * u.size());
    out << u, v, theta;
    return out;
  }

  static StateVector from_stacked(const Eigen::VectorXcd& x) {
    const Eigen::Index n = x.size() / 3;
    return {x.segment(0, n), x.segment(n, n), x.segment(2 * n, n)};
  }
};

class CoupledGenerator {
 public:
  CoupledGenerator(BoundaryKind bc_u, BoundaryKind bc_theta, Coupling coupling,
                   int mode_count, double length = std::numbers::pi)
      : bc_u_(bc_u),
        bc_theta_(bc_theta),
        coupling_(coupling),
        basis_u_(bc_u, length, mode_count),
        basis_theta_(bc_theta, length, mode_count),
        gram_(gram(basis_u_, basis_theta_)) {
    if (!std::isfinite(coupling.alpha) || !std::isfinite(coupling.beta)) {
      throw InvalidArgument("coupling constants must be finite");
    }
  }

  BoundaryKind bc_u() const noexcept { return bc_u_; }
  BoundaryKind bc_theta() const noexcept { return bc_theta_; }
  const Coupling& coupling() const noexcept { return coupling_; }
  const ModalBasis& basis_u() const noexcept { return basis_u_; }
  const ModalBasis& basis_theta() const noexcept { return basis_theta_; }
  const Eigen::VectorXd& lambda_u() const noexcept {
    return basis_u_.eigenvalues();
  }
  const Eigen::VectorXd& lambda_theta() const noexcept {
    return basis_theta_.eigenvalues();
  }
  const GramMatrix& gram_matrix() const noexcept { return gram_; }
  int mode_count() const noexcept { return basis_u_.mode_count(); }
  int dimension() const noexcept { return 3 * mode_count(); }
  double length() const noexcept { return basis_u_.length(); }
  bool same_basis() const noexcept { return bc_u_ == bc_theta_; }

  std::string label() const {
    return std::string{to_char(bc_u_), to_char(bc_theta_)};
  }

  /// Dense 3N x 3N matrix acting on stacked coefficients (u, v, theta).
  Eigen::MatrixXd matrix() const {
    const int n = mode_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    a.block(0, n, n, n).diagonal().setOnes();
    a.block(n, 0, n, n).diagonal() = -lambda_u();
    a.block(n, 2 * n, n, n) = -coupling_.alpha * gram_;
    a.block(2 * n, n, n, n) = -coupling_.beta * gram_.transpose();
    a.block(2 * n, 2 * n, n, n).diagonal() = -lambda_theta();
    return a;
  }

  /// Similarity transform W A W^{-1} with W = diag(Lambda_O^{1/2}, I, I);
  /// the energy norm becomes the Euclidean norm in these coordinates.
  Eigen::MatrixXd euclidean_matrix() const {
    const int n = mode_count();
    const Eigen::VectorXd root = lambda_u().cwiseSqrt();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    b.block(0, n, n, n).diagonal() = root;
    b.block(n, 0, n, n).diagonal() = -root;
    b.block(n, 2 * n, n, n) = -coupling_.alpha * gram_;
    b.block(2 * n, n, n, n) = -coupling_.beta * gram_.transpose();
    b.block(2 * n, 2 * n, n, n).diagonal() = -lambda_theta();
    return b;
  }

  /// 3x3 coefficient-form block of mode m; same-basis generators only.
  Eigen::Matrix3d modal_block(int m) const {
    require_same_basis("modal_block");
    Eigen::Matrix3d a;
    a << 0.0, 1.0, 0.0,
         -lambda_u()(m), 0.0, -coupling_.alpha,
         0.0, -coupling_.beta, -lambda_theta()(m);
    return a;
  }

  /// 3x3 Euclidean-form block of mode m; same-basis generators only.
  Eigen::Matrix3d modal_euclidean_block(int m) const {
    require_same_basis("modal_euclidean_block");
    const double root = std::sqrt(lambda_u()(m));
    Eigen::Matrix3d b;
    b << 0.0, root, 0.0,
         -root, 0.0, -coupling_.alpha,
         0.0, -coupling_.beta, -lambda_theta()(m);
    return b;
  }

  /// Maps a state to Euclidean coordinates W U.
  Eigen::VectorXcd to_weighted(const StateVector& state) const {
    check(state, "to_weighted");
    const int n = mode_count();
    Eigen::VectorXcd y(3 * n);
    y << lambda_u().cwiseSqrt().cast<Complex>().cwiseProduct(state.u),
        state.v, state.theta;
    return y;
  }

  StateVector from_weighted(const Eigen::VectorXcd& y) const {
    const int n = mode_count();
    if (y.size() != 3 * n) {
      throw InvalidArgument("from_weighted: dimension mismatch");
    }
    return {y.segment(0, n).cwiseQuotient(
                lambda_u().cwiseSqrt().cast<Complex>()),
            y.segment(n, n), y.segment(2 * n, n)};
  }

  void check(const StateVector& state, const char* where) const {
    if (!state.consistent() || state.size() != mode_count()) {
      throw InvalidArgument(std::string(where) +
                            ": state dimension does not match generator (" +
                            std::to_string(state.size()) + " vs " +
                            std::to_string(mode_count()) + ")");
    }
  }

 private:
  void require_same_basis(const char* where) const {
    if (!same_basis()) {
      throw InvalidArgument(std::string(where) +
                            " requires matching boundary kinds");
    }
  }

  BoundaryKind bc_u_;
  BoundaryKind bc_theta_;
  Coupling coupling_;
  ModalBasis basis_u_;
  ModalBasis basis_theta_;
  GramMatrix gram_;
};

inline CoupledGenerator assemble(BoundaryKind bc_u, BoundaryKind bc_theta,
                                 Coupling coupling, int mode_count,
                                 double length = std::numbers::pi) {
  return CoupledGenerator(bc_u, bc_theta, coupling, mode_count, length);
}

/// <U1, U2> = (Lambda_O u1) . conj(u2) + v1 . conj(v2) + theta1 . conj(theta2)
inline Complex energy_inner(const CoupledGenerator& gen, const StateVector& a,
                            const StateVector& b) {
  gen.check(a, "energy_inner");
  gen.check(b, "energy_inner");
  const Eigen::VectorXcd weighted_u =
      gen.lambda_u().cast<Complex>().cwiseProduct(a.u);
  return b.u.dot(weighted_u) + b.v.dot(a.v) + b.theta.dot(a.theta);
}

inline double energy_norm_sq(const CoupledGenerator& gen,
                             const StateVector& state) {
  gen.check(state, "energy_norm_sq");
  return (gen.lambda_u().array() * state.u.array().abs2()).sum() +
         state.v.squaredNorm() + state.theta.squaredNorm();
}

/// ||Lambda_O'^{1/2} theta||^2, the dissipation carried by the heat block.
inline double thermal_dissipation(const CoupledGenerator& gen,
                                  const StateVector& state) {
  gen.check(state, "thermal_dissipation");
  return (gen.lambda_theta().array() * state.theta.array().abs2()).sum();
}

inline StateVector apply(const CoupledGenerator& gen, const StateVector& state) {
  gen.check(state, "apply");
  const Eigen::MatrixXcd g = gen.gram_matrix().cast<Complex>();
  const auto& c = gen.coupling();
  StateVector out;
  out.u = state.v;
  out.v = -gen.lambda_u().cast<Complex>().cwiseProduct(state.u) -
          c.alpha * (g * state.theta);
  out.theta = -c.beta * (g.adjoint() * state.v) -
              gen.lambda_theta().cast<Complex>().cwiseProduct(state.theta);
  return out;
}

/// Reciprocal condition estimates below this reject a shifted solve.
inline constexpr double kSingularShiftRcond = 1e-14;

/// Solves (shift I - A) U = F.
///
/// Works in Euclidean coordinates so the system is well scaled. Same-basis
/// generators split into N independent 3x3 solves; mixed generators use one
/// dense LU of size 3N.
inline StateVector solve_shifted(const CoupledGenerator& gen, Complex shift,
                                 const StateVector& rhs) {
  gen.check(rhs, "solve_shifted");
  const int n = gen.mode_count();
  const Eigen::VectorXcd y_rhs = gen.to_weighted(rhs);
  Eigen::VectorXcd y(3 * n);

  auto reject = [&](double rcond) {
    throw SingularShift("solve_shifted: shifted generator is numerically "
                        "singular at shift (" + std::to_string(shift.real()) +
                            ", " + std::to_string(shift.imag()) +
                            "), rcond = " + std::to_string(rcond),
                        rcond);
  };

  if (gen.same_basis()) {
    for (int m = 0; m < n; ++m) {
      const Eigen::Matrix3cd shifted =
          shift * Eigen::Matrix3cd::Identity() -
          gen.modal_euclidean_block(m).cast<Complex>();
      const Eigen::PartialPivLU<Eigen::Matrix3cd> lu(shifted);
      const double rcond = lu.rcond();
      if (!(rcond >= kSingularShiftRcond)) reject(rcond);
      const Eigen::Vector3cd local(y_rhs(m), y_rhs(n + m), y_rhs(2 * n + m));
      const Eigen::Vector3cd sol = lu.solve(local);
      y(m) = sol(0);
      y(n + m) = sol(1);
      y(2 * n + m) = sol(2);
    }
  } else {
    Eigen::MatrixXcd shifted = -gen.euclidean_matrix().cast<Complex>();
    shifted.diagonal().array() += shift;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    const double rcond = lu.rcond();
    if (!(rcond >= kSingularShiftRcond)) reject(rcond);
    y = lu.solve(y_rhs);
  }
  return gen.from_weighted(y);
}

inline Eigen::MatrixXd to_euclidean(const CoupledGenerator& gen) {
  return gen.euclidean_matrix();
}

}  // namespace thermospec

#endif  // THERMOSPEC_GENERATOR_HPP
