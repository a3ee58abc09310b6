#ifndef THERMOSPEC_CLI_COMMANDS_HPP
#define THERMOSPEC_CLI_COMMANDS_HPP

// Subcommand bodies. Each returns its rendered documents instead of writing
// files so the front end and the tests share one code path.

#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermospec/cli/config.hpp"
#include "thermospec/cli/verify.hpp"
#include "thermospec/errors.hpp"
#include "thermospec/evolution.hpp"
#include "thermospec/resolvent.hpp"
#include "thermospec/stability.hpp"

namespace thermospec::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNumericalError = 2,
  kInvariantFailure = 3,
};

struct CommandResult {
  int exit_code = kOk;
  /// Written to `output`.
  std::string primary;
  /// Resolvent growth-fit JSON; empty for other commands.
  std::string secondary;
  /// Human-readable diagnostics for stderr.
  std::string message;
};

/// 17 significant digits; strtod reproduces the double exactly.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

/// JSON number, or null when not finite.
inline Json json_number(double x) {
  return std::isfinite(x) ? Json(x) : Json(nullptr);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline Json run_header(const RunConfig& c, const char* command) {
  const Coupling coupling = c.coupling();
  Json j;
  j["command"] = command;
  j["bc"] = c.bc_label();
  j["gamma"] = c.gamma;
  j["alpha"] = coupling.alpha;
  j["beta"] = coupling.beta;
  j["mode_count"] = c.modes;
  j["length"] = c.length;
  return j;
}

inline std::vector<double> resolvent_grid(const RunConfig& c, const CoupledGenerator& gen) {
  if (c.lambda_modes) return mode_frequency_grid(gen, c.lambda_m_min, c.lambda_m_max);
  return uniform_grid(c.lambda_min, c.lambda_max, c.lambda_samples);
}

inline void require_fit_modes(const RunConfig& c) {
  if (c.modes < 8) {
    throw ConfigError("modes", "config key 'modes': fitting commands need modes >= 8");
  }
}

}  // namespace detail

inline CommandResult cmd_spectrum(const RunConfig& c) {
  const CoupledGenerator gen = c.generator();
  const SpectrumReport sp = spectrum(gen);
  CommandResult result;
  if (c.json) {
    Json j = detail::run_header(c, "spectrum");
    j["spectral_abscissa"] = sp.spectral_abscissa;
    j["min_distance_to_imaginary_axis"] = sp.min_distance_to_imaginary_axis;
    j["axis_tolerance"] = sp.axis_tolerance;
    j["on_axis_count"] = sp.on_axis_count;
    j["strong_stability_precondition"] = sp.axis_clear();
    Json values = Json::array();
    for (const Complex& s : sp.eigenvalues) values.push_back({{"re", s.real()}, {"im", s.imag()}});
    j["eigenvalues"] = std::move(values);
    result.primary = dump(j);
  } else {
    std::ostringstream out;
    out << "re,im\n";
    for (const Complex& s : sp.eigenvalues) {
      out << format_double(s.real()) << ',' << format_double(s.imag()) << '\n';
    }
    result.primary = out.str();
  }
  if (!sp.axis_clear()) {
    result.message = std::to_string(sp.on_axis_count) +
                     " eigenvalue(s) on the imaginary axis: strong-stability "
                     "precondition fails\n";
  }
  return result;
}

inline CommandResult cmd_evolve(const RunConfig& c) {
  const CoupledGenerator gen = c.generator();
  const EnergyTrace trace = evolve(gen, initial_state(c, gen), time_grid(c), c.method);
  const StrongStabilityReport stability = strong_stability_report(trace);
  CommandResult result;
  if (c.json) {
    Json j = detail::run_header(c, "evolve");
    j["initial_graph_norm"] = trace.initial_graph_norm;
    j["monotone"] = stability.monotone;
    j["terminal_ratio"] = stability.terminal_ratio;
    j["t"] = trace.times;
    j["energy"] = trace.energy;
    j["state_norm"] = trace.state_norms;
    result.primary = dump(j);
  } else {
    std::ostringstream out;
    out << "t,energy,state_norm\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      out << format_double(trace.times[i]) << ',' << format_double(trace.energy[i]) << ','
          << format_double(trace.state_norms[i]) << '\n';
    }
    result.primary = out.str();
  }
  if (!stability.monotone) {
    result.exit_code = kInvariantFailure;
    result.message = "internal invariant failure: energy increased along the trace\n";
  }
  return result;
}

inline CommandResult cmd_resolvent(const RunConfig& c) {
  detail::require_fit_modes(c);
  const CoupledGenerator gen = c.generator();
  const ResolventScan s = scan(gen, detail::resolvent_grid(c, gen), c.near_eigenvalue_tol);
  CommandResult result;
  if (c.json) {
    Json j = detail::run_header(c, "resolvent");
    Json rows = Json::array();
    for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
      rows.push_back({{"lambda", s.lambdas[i]},
                      {"resolvent_norm", json_number(s.norms[i])},
                      {"flagged", static_cast<bool>(s.flagged[i])}});
    }
    j["rows"] = std::move(rows);
    result.primary = dump(j);
  } else {
    std::ostringstream out;
    out << "lambda,resolvent_norm,flagged\n";
    for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
      out << format_double(s.lambdas[i]) << ',' << format_double(s.norms[i]) << ','
          << (s.flagged[i] ? "true" : "false") << '\n';
    }
    result.primary = out.str();
  }

  double lo = c.fit_lambda_min;
  double hi = c.fit_lambda_max;
  if (lo == 0.0) {
    lo = std::sqrt(gen.lambda_u()(std::max(1, c.modes / 16) - 1));
  }
  if (hi == 0.0) {
    hi = std::sqrt(gen.lambda_u()(std::max(1, 7 * c.modes / 16) - 1));
  }
  Json fit = detail::run_header(c, "resolvent_fit");
  fit["fit_lambda_min"] = lo;
  fit["fit_lambda_max"] = hi;
  int flagged = 0;
  for (const bool f : s.flagged) flagged += f ? 1 : 0;
  fit["flagged_count"] = flagged;
  try {
    const GrowthFit g = growth_exponent(s, lo, hi);
    fit["slope"] = g.slope;
    fit["intercept"] = g.intercept;
    fit["r_squared"] = g.r_squared;
  } catch (const InvalidArgument& e) {
    fit["slope"] = nullptr;
    fit["intercept"] = nullptr;
    fit["r_squared"] = nullptr;
    fit["fit_error"] = e.what();
    result.exit_code = kNumericalError;
    result.message = std::string("growth fit failed: ") + e.what() + "\n";
  }
  result.secondary = dump(fit);
  return result;
}

inline CommandResult cmd_decay(const RunConfig& c) {
  detail::require_fit_modes(c);
  const CoupledGenerator gen = c.generator();
  CommandResult result;
  const DecayWindowCheck window = check_decay_window(gen, c.fit_t_min, c.fit_t_max);
  if (!window.valid) {
    result.exit_code = kNumericalError;
    result.message = "decay window [" + format_double(c.fit_t_min) + ", " +
                     format_double(c.fit_t_max) + "] rejected: " + window.reason +
                     " (suggested t_max <= " + format_double(window.max_t_hi) + ")\n";
    return result;
  }
  const std::vector<double> times = log_grid(c.fit_t_min, c.fit_t_max, c.t_samples, true);
  const EnergyTrace trace = evolve(gen, initial_state(c, gen), times, c.method);
  const DecayFit fit = fit_polynomial_decay(trace, c.fit_t_min, c.fit_t_max);

  Json j = detail::run_header(c, "decay");
  j["initial"] = c.initial == InitialKind::power_law     ? "power_law"
                 : c.initial == InitialKind::single_mode ? "single_mode"
                 : c.initial == InitialKind::random      ? "random"
                                                         : "zero";
  if (c.initial == InitialKind::power_law) {
    j["initial_exponent"] = c.initial_exponent;
    j["predicted_slope"] = (1.0 - 2.0 * c.initial_exponent) / 4.0;
  }
  j["window"] = {{"t_lo", fit.t_lo}, {"t_hi", fit.t_hi}};
  j["max_valid_t_hi"] = json_number(window.max_t_hi);
  j["samples"] = fit.samples;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["power_residual"] = fit.power_residual;
  j["exp_rate"] = fit.exp_rate;
  j["exp_fit_residual"] = fit.exp_fit_residual;
  j["residual_ratio"] = json_number(fit.exp_fit_residual / fit.power_residual);
  j["decay_order_alpha"] = json_number(fit.decay_order_alpha);
  j["constant_c"] = fit.constant_c;
  j["initial_graph_norm"] = trace.initial_graph_norm;
  j["graph_normalized_constant"] = json_number(fit.graph_normalized_constant);
  j["preferred_model"] = to_string(fit.preferred);
  switch (fit.preferred) {
    case DecayModel::power_law:
      j["verdict"] = "power-law decay preferred over a pure exponential";
      break;
    case DecayModel::exponential:
      j["verdict"] = "exponential model preferred: the trace decays like a single exponential";
      break;
    default:
      j["verdict"] = "neither model is preferred by a residual ratio of 10";
  }
  result.primary = dump(j);
  if (fit.preferred == DecayModel::exponential) {
    result.message = "exponential model preferred over a power law\n";
  }
  return result;
}

inline CommandResult cmd_verify(const RunConfig& c) {
  const VerifyReport report = run_verify(c);
  Json j = detail::run_header(c, "verify");
  j["seed"] = report.seed;
  Json checks = Json::array();
  std::ostringstream text;
  for (const CheckResult& check : report.checks) {
    checks.push_back({{"name", check.name},
                      {"pass", check.pass},
                      {"measured", json_number(check.measured)},
                      {"expected", check.expected},
                      {"tolerance", check.tolerance},
                      {"detail", check.detail}});
    text << (check.pass ? "PASS " : "FAIL ") << check.name << " measured="
         << format_double(check.measured) << " tolerance=" << format_double(check.tolerance)
         << '\n';
  }
  j["checks"] = std::move(checks);
  j["notices"] = report.notices;
  j["all_pass"] = report.all_pass();
  for (const std::string& notice : report.notices) text << "NOTE " << notice << '\n';
  CommandResult result;
  result.primary = dump(j);
  result.message = text.str();
  result.exit_code = report.all_pass() ? kOk : kInvariantFailure;
  return result;
}

/// Dispatches by name and maps exceptions to exit codes.
inline CommandResult run_command(const std::string& name, const ConfigValues& values) {
  CommandResult result;
  try {
    const RunConfig config = to_run_config(values);
    if (name == "spectrum") return cmd_spectrum(config);
    if (name == "evolve") return cmd_evolve(config);
    if (name == "resolvent") return cmd_resolvent(config);
    if (name == "decay") return cmd_decay(config);
    if (name == "verify") return cmd_verify(config);
    result.exit_code = kConfigError;
    result.message = "unknown command '" + name + "'\n";
  } catch (const ConfigError& e) {
    result.exit_code = kConfigError;
    result.message = std::string("config error: ") + e.what() + "\n";
  } catch (const InvalidArgument& e) {
    result.exit_code = kConfigError;
    result.message = std::string("invalid argument: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    result.exit_code = kNumericalError;
    result.message = std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace thermospec::cli

#endif  // THERMOSPEC_CLI_COMMANDS_HPP
