#ifndef THERMOSPEC_CLI_VERIFY_HPP
#define THERMOSPEC_CLI_VERIFY_HPP

// One-shot invariant suite for a configured generator.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "thermospec/cli/config.hpp"
#include "thermospec/evolution.hpp"
#include "thermospec/generator.hpp"
#include "thermospec/resolvent.hpp"
#include "thermospec/stability.hpp"

namespace thermospec::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> notices;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
  }
};

namespace detail {

inline double relative_error(Complex got, Complex want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace detail

inline VerifyReport run_verify(const RunConfig& config) {
  VerifyReport report;
  report.seed = config.seed;
  const CoupledGenerator gen = config.generator();
  const Coupling coupling = gen.coupling();
  const bool symmetric = coupling.is_symmetric();
  const double gamma = coupling.gamma();
  const int n = gen.mode_count();
  std::uint64_t stream = config.seed;

  // Dissipativity: Re<AU, U> + ||Lambda'^{1/2} theta||^2 = -(alpha + beta) Re<G theta, v>,
  // which vanishes for the symmetric coupling.
  if (symmetric || config.coupling_sign_flip) {
    double worst = 0.0;
    for (int k = 0; k < config.verify_samples; ++k) {
      const StateVector u = random_state(gen, stream++);
      const double defect = energy_inner(gen, apply(gen, u), u).real() +
                            thermal_dissipation(gen, u);
      worst = std::max(worst, std::abs(defect) / energy_norm_sq(gen, u));
    }
    report.checks.push_back({"dissipativity_identity", worst <= 1e-10, worst, 0.0,
                             1e-10, "max |Re<AU,U> + ||A'^{1/2} theta||^2| / ||U||^2"});
  } else {
    report.notices.push_back(
        "dissipativity_identity skipped: general coupling (alpha + beta != 0)");
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    const std::vector<std::pair<double, double>> pairs = {{1.0, 2.0}, {-1.0, -3.0}, {0.5, 0.5}};
    for (const auto& [a, b] : pairs) {
      const CoupledGenerator general(gen.bc_u(), gen.bc_theta(), Coupling::general(a, b),
                                     n, gen.length());
      const double c = std::max((a + b) * (a + b), 1.0);
      for (int k = 0; k < config.verify_samples; ++k) {
        const StateVector u = random_state(general, stream++, 0.0, true);
        const double lhs = energy_inner(general, apply(general, u), u).real();
        const double rhs =
            0.5 * c * energy_norm_sq(general, u) - thermal_dissipation(general, u);
        worst = std::max(worst, lhs - rhs);
      }
    }
    report.checks.push_back({"generalized_coupling_bound", worst <= 1e-10, worst, 0.0,
                             1e-10, "max Re<AU,U> - (C/2)||U||^2 + ||A'^{1/2} theta||^2"});
  }

  if (!symmetric || config.coupling_sign_flip) {
    report.notices.push_back("witness_consistency skipped: requires the symmetric coupling");
  } else if (gamma == 0.0) {
    report.notices.push_back("witness_consistency skipped: requires gamma != 0");
  } else if (!gen.same_basis()) {
    report.notices.push_back(
        "witness_consistency skipped: mixed boundary pairs have no closed-form witness");
  } else {
    double worst = 0.0;
    const int top = std::min(32, std::max(1, n / 2));
    for (int m = 1; m <= top; ++m) {
      const WitnessSolution w = witness(gen.bc_u(), gen.bc_theta(), m, gamma, gen.length());
      StateVector rhs = StateVector::zero(n);
      rhs.v(m - 1) = 1.0;
      const StateVector sol = solve_shifted(gen, Complex(0.0, w.lambda), rhs);
      worst = std::max({worst, detail::relative_error(sol.u(m - 1), w.a),
                        detail::relative_error(sol.theta(m - 1), w.b)});
    }
    report.checks.push_back({"witness_consistency", worst <= 1e-8, worst, 0.0, 1e-8,
                             "max relative error of (a, b) for m <= " + std::to_string(top)});
  }

  if (symmetric && !config.coupling_sign_flip && gen.same_basis()) {
    double worst = 0.0;
    for (int m = 0; m < n; ++m) {
      const double lam = gen.lambda_u()(m);
      const auto r = modal_cubic(lam, gamma);
      const Complex sum = r[0] + r[1] + r[2];
      const Complex pair = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
      const Complex prod = r[0] * r[1] * r[2];
      worst = std::max({worst, detail::relative_error(sum, -lam),
                        detail::relative_error(pair, lam + gamma * gamma),
                        detail::relative_error(prod, -lam * lam)});
    }
    report.checks.push_back({"modal_cubic_vieta", worst <= 1e-9, worst, 0.0, 1e-9,
                             "max relative Vieta defect over all modes"});

    if (gamma != 0.0 && std::abs(gamma) <= 1.0 && gen.lambda_u()(n - 1) >= 400.0) {
      double worst_asym = 0.0;
      for (int m = 0; m < n; ++m) {
        const double lam = gen.lambda_u()(m);
        if (lam < 400.0) continue;
        const Complex s = wave_branch_root(lam, gamma);
        worst_asym = std::max(worst_asym, std::abs(s.real() * 2.0 * lam / (gamma * gamma) + 1.0));
      }
      report.checks.push_back({"wave_branch_asymptote", worst_asym <= 0.05, worst_asym, 0.0,
                               0.05, "max |Re s 2 lambda / gamma^2 + 1| for lambda >= 400"});
    } else {
      report.notices.push_back(
          "wave_branch_asymptote skipped: requires 0 < |gamma| <= 1 and a mode with lambda >= 400");
    }
  } else {
    report.notices.push_back(
        "modal checks skipped: require DD or NN with the symmetric coupling");
  }

  if (gamma == 0.0 && symmetric) {
    report.notices.push_back("imaginary_axis_clearance skipped: requires gamma != 0");
  } else {
    const SpectrumReport sp = spectrum(gen);
    report.checks.push_back({"imaginary_axis_clearance",
                             sp.axis_clear() && sp.spectral_abscissa < 0.0,
                             sp.spectral_abscissa, 0.0, sp.axis_tolerance,
                             "spectral abscissa must be negative"});
  }

  {
    double worst = 0.0;
    for (const Complex shift : {Complex(1.0, 0.0), Complex(0.0, 0.5), Complex(0.25, 3.0)}) {
      const StateVector f = random_state(gen, stream++);
      try {
        const StateVector u = solve_shifted(gen, shift, f);
        StateVector residual = apply(gen, u);
        residual.u = shift * u.u - residual.u - f.u;
        residual.v = shift * u.v - residual.v - f.v;
        residual.theta = shift * u.theta - residual.theta - f.theta;
        worst = std::max(worst, std::sqrt(energy_norm_sq(gen, residual) /
                                          energy_norm_sq(gen, f)));
      } catch (const SingularShift&) {
        worst = std::numeric_limits<double>::infinity();
      }
    }
    report.checks.push_back({"shifted_solve_residual", worst <= 1e-10, worst, 0.0, 1e-10,
                             "max ||(mu - A)U - F|| / ||F||"});
  }

  {
    const Propagator prop(gen, config.method);
    const StateVector u0 = random_state(gen, stream++, 1.0);
    const StateVector direct = prop(u0, 3.5);
    const StateVector composed = prop(prop(u0, 1.25), 2.25);
    StateVector diff = direct;
    diff.u -= composed.u;
    diff.v -= composed.v;
    diff.theta -= composed.theta;
    const double defect = std::sqrt(energy_norm_sq(gen, diff) / energy_norm_sq(gen, u0));
    report.checks.push_back({"semigroup_property", defect <= 1e-10, defect, 0.0, 1e-10,
                             "||T(3.5)U - T(2.25)T(1.25)U|| / ||U||"});
    const double e0 = energy_norm_sq(gen, u0);
    const double e1 = energy_norm_sq(gen, direct);
    report.checks.push_back({"contraction", e1 <= e0 * (1.0 + 1e-12), e1 / e0, 1.0, 1e-12,
                             "E(3.5) / E(0)"});
  }
  return report;
}

}  // namespace thermospec::cli

#endif  // THERMOSPEC_CLI_VERIFY_HPP
