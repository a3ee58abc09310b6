#ifndef THERMOSPEC_EVOLUTION_HPP
#define THERMOSPEC_EVOLUTION_HPP

// Exact propagation of the truncated system and energy traces E(t).

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "thermospec/errors.hpp"
#include "thermospec/generator.hpp"
#include "thermospec/parallel.hpp"

namespace thermospec {

/// exp(t M) for a fixed real 3x3 block.
///
/// Uses the eigendecomposition when the eigenvector matrix is well
/// conditioned; a (nearly) defective block falls back to scaling-and-squaring
/// Pade on that block alone.
class BlockExponential {
 public:
  static constexpr double kDefectiveCondition = 1e8;

  explicit BlockExponential(const Eigen::Matrix3d& block) : block_(block) {
    const Eigen::EigenSolver<Eigen::Matrix3d> solver(block);
    if (solver.info() != Eigen::Success) {
      defective_ = true;
      return;
    }
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
    const Eigen::JacobiSVD<Eigen::Matrix3cd> svd(vectors_);
    const auto& sv = svd.singularValues();
    condition_ = sv(0) / sv(2);
    if (!(condition_ < kDefectiveCondition)) {
      defective_ = true;
      return;
    }
    inverse_ = vectors_.inverse();
  }

  bool defective() const noexcept { return defective_; }
  double condition() const noexcept { return condition_; }

  Eigen::Matrix3cd at(double t) const {
    if (defective_) return dense_exp(t);
    const Eigen::Vector3cd growth = (t * values_).array().exp();
    return vectors_ * growth.asDiagonal() * inverse_;
  }

  Eigen::Vector3cd apply(double t, const Eigen::Vector3cd& x) const {
    if (defective_) return dense_exp(t) * x;
    const Eigen::Vector3cd growth = (t * values_).array().exp();
    return vectors_ * growth.cwiseProduct(inverse_ * x);
  }

 private:
  Eigen::Matrix3cd dense_exp(double t) const {
    const Eigen::Matrix3d scaled = t * block_;
    const Eigen::Matrix3d e = scaled.exp();
    return e.cast<Complex>();
  }

  Eigen::Matrix3d block_;
  Eigen::Matrix3cd vectors_;
  Eigen::Matrix3cd inverse_;
  Eigen::Vector3cd values_;
  double condition_ = 0.0;
  bool defective_ = false;
};

/// exp(t [[0, 1, 0], [-lambda, 0, -gamma], [0, gamma, -lambda]]), the
/// coefficient-space propagator of one shared eigenmode.
inline Eigen::Matrix3cd modal_propagator(double lambda, double gamma,
                                         double t) {
  if (!(lambda > 0.0)) {
    throw InvalidArgument("modal_propagator: eigenvalue must be positive");
  }
  if (!(t >= 0.0)) {
    throw InvalidArgument("modal_propagator: time must be non-negative");
  }
  // Exponentiate the Euclidean form and conjugate back by diag(sqrt(lambda), 1, 1).
  const double root = std::sqrt(lambda);
  Eigen::Matrix3d b;
  b << 0.0, root, 0.0,
       -root, 0.0, -gamma,
       0.0, gamma, -lambda;
  const Eigen::Matrix3cd eb = BlockExponential(b).at(t);
  const Eigen::Vector3cd w(root, 1.0, 1.0);
  return w.cwiseInverse().asDiagonal() * eb * w.asDiagonal();
}

enum class EvolveMethod { automatic, modal, dense };

/// Semigroup T(t) of a generator, precomputed for repeated evaluation.
class Propagator {
 public:
  static constexpr double kDenseRcond = 1e-12;

  explicit Propagator(const CoupledGenerator& gen,
                      EvolveMethod method = EvolveMethod::automatic)
      : gen_(gen) {
    if (method == EvolveMethod::modal && !gen.same_basis()) {
      throw InvalidArgument(
          "modal propagation needs matching boundary kinds; use dense");
    }
    modal_ = method == EvolveMethod::modal ||
             (method == EvolveMethod::automatic && gen.same_basis());
    if (modal_) {
      blocks_.reserve(gen.mode_count());
      for (int m = 0; m < gen.mode_count(); ++m) {
        blocks_.emplace_back(gen.modal_euclidean_block(m));
      }
      return;
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(gen.euclidean_matrix());
    if (solver.info() != Eigen::Success) {
      throw DecompositionError(
          "dense eigendecomposition failed; try a smaller mode count", 0.0);
    }
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
    lu_.compute(vectors_);
    const double rcond = lu_.rcond();
    if (!(rcond >= kDenseRcond)) {
      throw DecompositionError(
          "eigenvector matrix is ill conditioned (condition estimate " +
              std::to_string(1.0 / rcond) + "); try a smaller mode count",
          1.0 / rcond);
    }
  }

  bool modal() const noexcept { return modal_; }

  /// T(t) U0.
  StateVector operator()(const StateVector& initial, double t) const {
    return gen_.from_weighted(weighted(gen_.to_weighted(initial), t));
  }

  /// T(t) acting in Euclidean coordinates y = W U.
  Eigen::VectorXcd weighted(const Eigen::VectorXcd& y0, double t) const {
    if (!(t >= 0.0)) throw InvalidArgument("propagation time must be >= 0");
    const int n = gen_.mode_count();
    if (modal_) {
      Eigen::VectorXcd y(3 * n);
      for (int m = 0; m < n; ++m) {
        const Eigen::Vector3cd local(y0(m), y0(n + m), y0(2 * n + m));
        const Eigen::Vector3cd out = blocks_[m].apply(t, local);
        y(m) = out(0);
        y(n + m) = out(1);
        y(2 * n + m) = out(2);
      }
      return y;
    }
    const Eigen::VectorXcd coeffs = lu_.solve(y0);
    const Eigen::VectorXcd growth = (t * values_).array().exp();
    return vectors_ * growth.cwiseProduct(coeffs);
  }

  /// Energies at each time, reusing one modal/eigen projection of y0.
  std::vector<double> energies(const Eigen::VectorXcd& y0,
                               const std::vector<double>& times) const {
    std::vector<double> out(times.size());
    if (modal_) {
      parallel_for(times.size(),
                   [&](std::size_t i) { out[i] = weighted(y0, times[i]).squaredNorm(); });
      return out;
    }
    const Eigen::VectorXcd coeffs = lu_.solve(y0);
    parallel_for(times.size(), [&](std::size_t i) {
      const Eigen::VectorXcd growth = (times[i] * values_).array().exp();
      out[i] = (vectors_ * growth.cwiseProduct(coeffs)).squaredNorm();
    });
    return out;
  }

 private:
  CoupledGenerator gen_;
  bool modal_ = false;
  std::vector<BlockExponential> blocks_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXcd values_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> state_norms;
  /// Energy norm of A U0, the graph-norm scale for polynomial decay.
  double initial_graph_norm = 0.0;
};

inline EnergyTrace evolve(const CoupledGenerator& gen,
                          const StateVector& initial,
                          const std::vector<double>& times,
                          EvolveMethod method = EvolveMethod::automatic) {
  gen.check(initial, "evolve");
  if (times.empty()) throw InvalidArgument("evolve: empty time grid");
  if (!(times.front() >= 0.0)) {
    throw InvalidArgument("evolve: times must start at t >= 0");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvalidArgument("evolve: times must be strictly increasing");
    }
  }
  const Propagator propagator(gen, method);
  EnergyTrace trace;
  trace.times = times;
  trace.energy = propagator.energies(gen.to_weighted(initial), times);
  trace.state_norms.reserve(times.size());
  for (const double e : trace.energy) trace.state_norms.push_back(std::sqrt(e));
  trace.initial_graph_norm = std::sqrt(energy_norm_sq(gen, apply(gen, initial)));
  return trace;
}

struct StrongStabilityReport {
  bool monotone = true;
  double terminal_ratio = 0.0;
};

inline StrongStabilityReport strong_stability_report(const EnergyTrace& trace) {
  if (trace.energy.empty()) {
    throw InvalidArgument("strong_stability_report: empty trace");
  }
  StrongStabilityReport report;
  const double e0 = trace.energy.front();
  const double slack = 1e-12 * std::max(e0, 0.0);
  for (std::size_t i = 1; i < trace.energy.size(); ++i) {
    if (trace.energy[i] > trace.energy[i - 1] + slack) report.monotone = false;
  }
  report.terminal_ratio = e0 > 0.0 ? trace.energy.back() / e0 : 0.0;
  return report;
}

// Time grids ----------------------------------------------------------------

inline std::vector<double> linear_grid(double t_min, double t_max, int samples) {
  if (samples < 2 || !(t_max > t_min) || !(t_min >= 0.0)) {
    throw InvalidArgument("linear grid needs 0 <= t_min < t_max, samples >= 2");
  }
  std::vector<double> grid(samples);
  for (int i = 0; i < samples; ++i) {
    grid[i] = t_min + (t_max - t_min) * i / (samples - 1);
  }
  grid.back() = t_max;
  return grid;
}

/// Geometric grid on [t_min, t_max], preceded by t = 0 when include_zero.
inline std::vector<double> log_grid(double t_min, double t_max, int samples,
                                    bool include_zero = true) {
  if (samples < 2 || !(t_min > 0.0) || !(t_max > t_min)) {
    throw InvalidArgument("log grid needs 0 < t_min < t_max, samples >= 2");
  }
  std::vector<double> grid;
  grid.reserve(samples + 1);
  if (include_zero) grid.push_back(0.0);
  const double lo = std::log(t_min);
  const double hi = std::log(t_max);
  for (int i = 0; i < samples; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * i / (samples - 1)));
  }
  grid[include_zero ? 1 : 0] = t_min;
  grid.back() = t_max;
  return grid;
}

// Initial data ----------------------------------------------------------------

enum class StateBlock { u, v, theta };

/// One excited mode (one-based index) in one block.
inline StateVector single_mode_state(const CoupledGenerator& gen,
                                     StateBlock block, int mode,
                                     Complex amplitude = 1.0) {
  if (mode < 1 || mode > gen.mode_count()) {
    throw InvalidArgument("initial mode " + std::to_string(mode) +
                          " outside 1.." + std::to_string(gen.mode_count()));
  }
  StateVector s = StateVector::zero(gen.mode_count());
  Eigen::VectorXcd& target =
      block == StateBlock::u ? s.u : (block == StateBlock::v ? s.v : s.theta);
  target(mode - 1) = amplitude;
  return s;
}

/// Pure velocity excitation v_m = m^{-exponent} (one-based m).
inline StateVector power_law_state(const CoupledGenerator& gen,
                                   double exponent) {
  StateVector s = StateVector::zero(gen.mode_count());
  for (int m = 0; m < gen.mode_count(); ++m) {
    s.v(m) = std::pow(static_cast<double>(m + 1), -exponent);
  }
  return s;
}

/// Random complex state whose modal energies scale like m^{-2 decay}: each
/// coefficient is uniform in the unit square, u additionally divided by
/// sqrt(lambda_m). decay = 0 gives equal expected energy per mode.
inline StateVector random_state(const CoupledGenerator& gen,
                                std::uint64_t seed, double decay = 0.0,
                                bool real_only = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto draw = [&] {
    const double re = unit(rng);
    const double im = real_only ? 0.0 : unit(rng);
    return Complex(re, im);
  };
  const int n = gen.mode_count();
  StateVector s = StateVector::zero(n);
  for (int m = 0; m < n; ++m) {
    const double scale = std::pow(static_cast<double>(m + 1), -decay);
    s.u(m) = draw() * scale / std::sqrt(gen.lambda_u()(m));
    s.v(m) = draw() * scale;
    s.theta(m) = draw() * scale;
  }
  return s;
}

}  // namespace thermospec

#endif  // THERMOSPEC_EVOLUTION_HPP
