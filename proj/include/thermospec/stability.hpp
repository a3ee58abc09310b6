#ifndef THERMOSPEC_STABILITY_HPP
#define THERMOSPEC_STABILITY_HPP

// Spectra of the truncated generator, modal eigenvalue asymptotics, and
// power-law versus exponential fits of energy traces.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermospec/errors.hpp"
#include "thermospec/evolution.hpp"
#include "thermospec/generator.hpp"
#include "thermospec/least_squares.hpp"

namespace thermospec {

struct SpectrumReport {
  /// Sorted by imaginary part, then real part; closed under conjugation.
  std::vector<Complex> eigenvalues;
  double spectral_abscissa = 0.0;
  /// min |Re s| over the spectrum.
  double min_distance_to_imaginary_axis = 0.0;
  /// Eigenvalues with |Re s| <= axis_tolerance.
  int on_axis_count = 0;
  double axis_tolerance = 0.0;
  int mode_count = 0;
  BoundaryKind bc_u = BoundaryKind::dirichlet;
  BoundaryKind bc_theta = BoundaryKind::dirichlet;
  Coupling coupling;

  bool axis_clear() const noexcept { return on_axis_count == 0; }
};

namespace detail {

// Pairs eigenvalues of a real matrix with their conjugates and averages each
// pair so the returned set is exactly conjugation invariant.
inline std::vector<Complex> symmetrize_conjugates(const Eigen::VectorXcd& raw,
                                                  double scale) {
  const double real_tol = 1e-12 * std::max(1.0, scale);
  std::vector<Complex> real_like;
  std::vector<Complex> upper;
  std::vector<Complex> lower;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const Complex s = raw(i);
    if (std::abs(s.imag()) <= real_tol) {
      real_like.emplace_back(s.real(), 0.0);
    } else if (s.imag() > 0.0) {
      upper.push_back(s);
    } else {
      lower.push_back(s);
    }
  }
  if (upper.size() != lower.size()) {
    throw DecompositionError("spectrum is not closed under conjugation", 0.0);
  }
  auto by_imag = [](const Complex& a, const Complex& b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  };
  std::vector<Complex> mirrored;
  mirrored.reserve(lower.size());
  for (const Complex& s : lower) mirrored.push_back(std::conj(s));
  std::sort(upper.begin(), upper.end(), by_imag);
  std::sort(mirrored.begin(), mirrored.end(), by_imag);
  std::vector<Complex> out = real_like;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const Complex avg = 0.5 * (upper[i] + mirrored[i]);
    out.push_back(avg);
    out.push_back(std::conj(avg));
  }
  std::sort(out.begin(), out.end(), by_imag);
  return out;
}

}  // namespace detail

inline SpectrumReport spectrum(const CoupledGenerator& gen) {
  const Eigen::MatrixXd b = gen.euclidean_matrix();
  const double scale = b.cwiseAbs().colwise().sum().maxCoeff();
  Eigen::VectorXcd raw(gen.dimension());
  if (gen.same_basis()) {
    // Block diagonal after permutation: one 3x3 eigenproblem per mode.
    const int n = gen.mode_count();
    for (int m = 0; m < n; ++m) {
      const Eigen::EigenSolver<Eigen::Matrix3d> solver(
          gen.modal_euclidean_block(m));
      if (solver.info() != Eigen::Success) {
        throw DecompositionError("modal eigensolver failed at mode " +
                                     std::to_string(m + 1),
                                 0.0);
      }
      raw.segment(3 * m, 3) = solver.eigenvalues();
    }
  } else {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(b, false);
    if (solver.info() != Eigen::Success) {
      throw DecompositionError("dense eigensolver failed (matrix 1-norm " +
                                   std::to_string(scale) + ")",
                               scale);
    }
    raw = solver.eigenvalues();
  }
  SpectrumReport report;
  report.eigenvalues = detail::symmetrize_conjugates(raw, scale);
  report.mode_count = gen.mode_count();
  report.bc_u = gen.bc_u();
  report.bc_theta = gen.bc_theta();
  report.coupling = gen.coupling();
  report.axis_tolerance =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
  report.spectral_abscissa = -std::numeric_limits<double>::infinity();
  report.min_distance_to_imaginary_axis = std::numeric_limits<double>::infinity();
  for (const Complex& s : report.eigenvalues) {
    report.spectral_abscissa = std::max(report.spectral_abscissa, s.real());
    report.min_distance_to_imaginary_axis =
        std::min(report.min_distance_to_imaginary_axis, std::abs(s.real()));
    if (std::abs(s.real()) <= report.axis_tolerance) ++report.on_axis_count;
  }
  return report;
}

/// Roots of s^3 + lambda s^2 + (lambda + gamma^2) s + lambda^2, the
/// characteristic polynomial of one shared-eigenmode block. Sorted by
/// imaginary part.
///
/// p(0) = lambda^2 > 0 and p(-lambda) = -lambda gamma^2 <= 0, so a real root
/// lies in [-lambda, 0); it is found by safeguarded Newton, the remaining
/// quadratic is solved in closed form, and all roots are Newton-polished.
inline std::array<Complex, 3> modal_cubic(double lambda, double gamma) {
  if (!(lambda > 0.0)) throw InvalidArgument("modal_cubic: lambda must be > 0");
  const double c2 = lambda;
  const double c1 = lambda + gamma * gamma;
  const double c0 = lambda * lambda;
  auto p = [&](double s) { return ((s + c2) * s + c1) * s + c0; };
  auto dp = [&](double s) { return (3.0 * s + 2.0 * c2) * s + c1; };

  double lo = -lambda;
  double hi = 0.0;
  double r = -lambda;
  if (p(lo) != 0.0) {
    r = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double value = p(r);
      if (value == 0.0) break;
      (value < 0.0 ? lo : hi) = r;
      double next = r - value / dp(r);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - r) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                    std::abs(r)) {
        r = next;
        break;
      }
      r = next;
    }
  }

  // s^2 + q1 s + q0 with r * q0 = -c0.
  const double q1 = c2 + r;
  const double q0 = -c0 / r;
  const Complex disc = std::sqrt(Complex(q1 * q1 - 4.0 * q0, 0.0));
  const Complex big = -0.5 * (q1 + (q1 >= 0.0 ? disc : -disc));
  std::array<Complex, 3> roots{Complex(r, 0.0), big, Complex(q0, 0.0) / big};

  auto pc = [&](Complex s) { return ((s + c2) * s + c1) * s + c0; };
  auto dpc = [&](Complex s) { return (3.0 * s + 2.0 * c2) * s + c1; };
  for (Complex& s : roots) {
    for (int it = 0; it < 3; ++it) {
      const Complex d = dpc(s);
      if (std::abs(d) == 0.0) break;
      const Complex step = pc(s) / d;
      s -= step;
      if (std::abs(step) <= std::numeric_limits<double>::epsilon() * std::abs(s)) break;
    }
  }
  // A real-coefficient cubic with one complex root has its conjugate too.
  if (std::abs(roots[1].imag()) > 0.0) roots[2] = std::conj(roots[1]);
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  return roots;
}

/// The modal root with the largest imaginary part (the wave branch).
inline Complex wave_branch_root(double lambda, double gamma) {
  return modal_cubic(lambda, gamma)[2];
}

/// max Re s over the spectrum. Symmetric same-basis generators use the modal
/// cubic; everything else goes through spectrum().
inline double spectral_abscissa(const CoupledGenerator& gen) {
  if (gen.same_basis() && gen.coupling().is_symmetric()) {
    double best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < gen.mode_count(); ++m) {
      for (const Complex& s : modal_cubic(gen.lambda_u()(m), gen.coupling().gamma())) {
        best = std::max(best, s.real());
      }
    }
    return best;
  }
  return spectrum(gen).spectral_abscissa;
}

struct AbscissaSample {
  int mode_count = 0;
  /// Largest retained displacement eigenvalue.
  double lambda_top = 0.0;
  double spectral_abscissa = 0.0;
  /// spectral_abscissa * 2 lambda_top / gamma^2; NaN when gamma = 0.
  double normalized = 0.0;
};

inline std::vector<AbscissaSample> abscissa_asymptotics(
    BoundaryKind bc_u, BoundaryKind bc_theta, double gamma,
    const std::vector<int>& mode_counts, double length = std::numbers::pi) {
  std::vector<AbscissaSample> out;
  out.reserve(mode_counts.size());
  for (const int n : mode_counts) {
    const CoupledGenerator gen(bc_u, bc_theta, Coupling::symmetric(gamma), n,
                               length);
    AbscissaSample sample;
    sample.mode_count = n;
    sample.lambda_top = gen.lambda_u()(n - 1);
    sample.spectral_abscissa = spectral_abscissa(gen);
    sample.normalized =
        gamma == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                     : sample.spectral_abscissa * 2.0 * sample.lambda_top /
                           (gamma * gamma);
    out.push_back(sample);
  }
  return out;
}

// Decay fits -------------------------------------------------------------------

enum class DecayModel { power_law, exponential, inconclusive };

inline const char* to_string(DecayModel model) {
  switch (model) {
    case DecayModel::power_law:
      return "power_law";
    case DecayModel::exponential:
      return "exponential";
    default:
      return "inconclusive";
  }
}

/// Residual ratio at which one decay model is preferred over the other.
inline constexpr double kModelPreferenceRatio = 10.0;

struct DecayFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples = 0;
  /// log sqrt(E) = slope log t + intercept.
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double power_residual = 0.0;
  /// log sqrt(E) = -exp_rate t + exp_intercept.
  double exp_rate = 0.0;
  double exp_intercept = 0.0;
  double exp_fit_residual = 0.0;
  /// Resolvent-convention order: sqrt(E) ~ t^{-1/alpha}.
  double decay_order_alpha = 0.0;
  /// C in sqrt(E) ~ C t^slope, and C / ||A U0||.
  double constant_c = 0.0;
  double graph_normalized_constant = 0.0;
  DecayModel preferred = DecayModel::inconclusive;
};

inline DecayFit fit_polynomial_decay(const EnergyTrace& trace, double t_lo,
                                     double t_hi) {
  if (trace.times.empty()) throw InvalidArgument("fit_polynomial_decay: empty trace");
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
    throw InvalidArgument("fit_polynomial_decay: window needs 0 < t_lo < t_hi");
  }
  const double slack = 1e-9 * t_hi;
  if (t_lo < trace.times.front() - slack || t_hi > trace.times.back() + slack) {
    throw InvalidArgument("fit_polynomial_decay: window outside trace times");
  }
  std::vector<double> log_t;
  std::vector<double> t;
  std::vector<double> log_norm;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double ti = trace.times[i];
    if (ti < t_lo - slack || ti > t_hi + slack) continue;
    if (!(trace.energy[i] > 0.0)) {
      throw InvalidArgument("fit_polynomial_decay: energy not positive at t = " +
                            std::to_string(ti));
    }
    t.push_back(ti);
    log_t.push_back(std::log(ti));
    log_norm.push_back(0.5 * std::log(trace.energy[i]));
  }
  if (t.size() < 5) {
    throw InvalidArgument("fit_polynomial_decay: need at least 5 samples in window");
  }
  const LinearFit power = fit_line(log_t, log_norm);
  const LinearFit expo = fit_line(t, log_norm);
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples = static_cast<int>(t.size());
  fit.slope = power.slope;
  fit.intercept = power.intercept;
  fit.r_squared = power.r_squared;
  fit.power_residual = power.rms_residual;
  fit.exp_rate = -expo.slope;
  fit.exp_intercept = expo.intercept;
  fit.exp_fit_residual = expo.rms_residual;
  fit.decay_order_alpha = power.slope < 0.0
                              ? -1.0 / power.slope
                              : std::numeric_limits<double>::infinity();
  fit.constant_c = std::exp(power.intercept);
  fit.graph_normalized_constant = trace.initial_graph_norm > 0.0
                                      ? fit.constant_c / trace.initial_graph_norm
                                      : std::numeric_limits<double>::infinity();
  if (fit.exp_fit_residual >= kModelPreferenceRatio * fit.power_residual) {
    fit.preferred = DecayModel::power_law;
  } else if (fit.power_residual >= kModelPreferenceRatio * fit.exp_fit_residual) {
    fit.preferred = DecayModel::exponential;
  }
  return fit;
}

/// Fits are only meaningful before the truncation's own exponential tail:
/// t_hi <= 0.1 / |spectral abscissa| and a window of at least 1.5 decades.
struct DecayWindowCheck {
  bool valid = false;
  double max_t_hi = 0.0;
  double decades = 0.0;
  std::string reason;
};

inline constexpr double kMinWindowDecades = 1.5;

inline DecayWindowCheck check_decay_window(const CoupledGenerator& gen,
                                           double t_lo, double t_hi) {
  DecayWindowCheck check;
  const double abscissa = spectral_abscissa(gen);
  check.max_t_hi = abscissa < 0.0 ? 0.1 / -abscissa
                                  : std::numeric_limits<double>::infinity();
  check.decades = (t_lo > 0.0 && t_hi > t_lo) ? std::log10(t_hi / t_lo) : 0.0;
  if (t_hi > check.max_t_hi) {
    check.reason = "window extends past the pre-asymptotic regime; use t_max <= " +
                   std::to_string(check.max_t_hi) + " or increase modes";
  } else if (check.decades < kMinWindowDecades) {
    check.reason = "window spans " + std::to_string(check.decades) +
                   " decades; at least 1.5 are required";
  } else {
    check.valid = true;
  }
  return check;
}

}  // namespace thermospec

#endif  // THERMOSPEC_STABILITY_HPP
