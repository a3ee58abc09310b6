#ifndef THERMOSPEC_CLI_CONFIG_HPP
#define THERMOSPEC_CLI_CONFIG_HPP

// Run configuration: a registry of keys with defaults, a "key = value" file
// format, and typed validation. Precedence is defaults < file < command line.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermospec/evolution.hpp"
#include "thermospec/generator.hpp"
#include "thermospec/spectral_basis.hpp"

namespace thermospec::cli {

/// Configuration problem tied to one key (empty for file-level problems).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"bc", "DD", "boundary pair: DD, DN, ND or NN (displacement, temperature)"},
      {"gamma", "1", "symmetric coupling constant"},
      {"alpha", "", "general coupling in the wave equation (needs beta)"},
      {"beta", "", "general coupling in the heat equation (needs alpha)"},
      {"decoupled", "false", "allow gamma = 0 as an explicit control run"},
      {"coupling_sign_flip", "false", "test hook: flip the sign of the heat-equation coupling"},
      {"modes", "128", "number of retained modes N"},
      {"length", "3.1415926535897931", "interval length L"},
      {"t_min", "1", "first positive time sample"},
      {"t_max", "1000", "last time sample"},
      {"t_samples", "200", "number of time samples (t = 0 is prepended on log grids)"},
      {"t_spacing", "log", "time grid spacing: log or linear"},
      {"method", "auto", "propagation path: auto, modal or dense"},
      {"lambda_grid", "modes", "resolvent grid: modes (lambda = sqrt(lambda_m)) or range"},
      {"lambda_m_min", "1", "first mode of the modes grid"},
      {"lambda_m_max", "0", "last mode of the modes grid (0: N/2)"},
      {"lambda_min", "0.5", "range grid start"},
      {"lambda_max", "64", "range grid end"},
      {"lambda_samples", "128", "range grid sample count"},
      {"fit_lambda_min", "0", "growth fit window start (0: sqrt(lambda_{N/16}))"},
      {"fit_lambda_max", "0", "growth fit window end (0: sqrt(lambda_{7N/16}))"},
      {"near_eigenvalue_tol", "1e-14", "sigma_min threshold that flags a resolvent row"},
      {"initial", "power_law", "initial data: power_law, single_mode, random or zero"},
      {"initial_mode", "1", "excited mode for single_mode (one-based)"},
      {"initial_block", "v", "excited block for single_mode: u, v or theta"},
      {"initial_exponent", "1.6", "power-law exponent s in v_m = m^-s"},
      {"fit_t_min", "10", "decay fit window start"},
      {"fit_t_max", "1000", "decay fit window end"},
      {"seed", "20240601", "seed for random initial data and verify checks"},
      {"verify_samples", "20", "random states per verify check"},
      {"format", "csv", "table format for spectrum/evolve/resolvent: csv or json"},
      {"output", "-", "output path ('-' for stdout)"},
      {"fit_output", "", "growth fit JSON path for resolvent (default: <output>.fit.json, stderr when output is '-')"},
  };
  return keys;
}

inline bool is_known_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (k.name == key) return true;
  }
  return false;
}

using ConfigValues = std::map<std::string, std::string>;

inline ConfigValues default_values() {
  ConfigValues values;
  for (const auto& k : config_keys()) values[k.name] = k.default_value;
  return values;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Parses "key = value" lines; '#' starts a comment.
inline ConfigValues parse_config_text(const std::string& text) {
  ConfigValues values;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "config line " + std::to_string(line_number) +
                                ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    if (!is_known_key(key)) {
      throw ConfigError(key, "unknown config key '" + key + "' (line " +
                                 std::to_string(line_number) + ")");
    }
    values[key] = detail::trim(line.substr(eq + 1));
  }
  return values;
}

inline ConfigValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

/// Overlays `top` onto `base`; keys in `top` win.
inline ConfigValues merge(ConfigValues base, const ConfigValues& top) {
  for (const auto& [key, value] : top) {
    if (!is_known_key(key)) {
      throw ConfigError(key, "unknown config key '" + key + "'");
    }
    base[key] = value;
  }
  return base;
}

enum class InitialKind { power_law, single_mode, random, zero };

struct RunConfig {
  BoundaryKind bc_u = BoundaryKind::dirichlet;
  BoundaryKind bc_theta = BoundaryKind::dirichlet;
  double gamma = 1.0;
  std::optional<double> alpha;
  std::optional<double> beta;
  bool decoupled = false;
  bool coupling_sign_flip = false;
  int modes = 128;
  double length = std::numbers::pi;

  double t_min = 1.0;
  double t_max = 1000.0;
  int t_samples = 200;
  bool log_spacing = true;
  EvolveMethod method = EvolveMethod::automatic;

  bool lambda_modes = true;
  int lambda_m_min = 1;
  int lambda_m_max = 0;
  double lambda_min = 0.5;
  double lambda_max = 64.0;
  int lambda_samples = 128;
  double fit_lambda_min = 0.0;
  double fit_lambda_max = 0.0;
  double near_eigenvalue_tol = 1e-14;

  InitialKind initial = InitialKind::power_law;
  int initial_mode = 1;
  StateBlock initial_block = StateBlock::v;
  double initial_exponent = 1.6;
  double fit_t_min = 10.0;
  double fit_t_max = 1000.0;
  std::uint64_t seed = 20240601;
  int verify_samples = 20;

  bool json = false;
  std::string output = "-";
  std::string fit_output;

  std::string bc_label() const { return std::string{to_char(bc_u), to_char(bc_theta)}; }

  Coupling coupling() const {
    if (alpha && beta) return Coupling::general(*alpha, *beta);
    Coupling c = Coupling::symmetric(gamma);
    if (coupling_sign_flip) c.beta = -c.beta;
    return c;
  }

  CoupledGenerator generator() const {
    return CoupledGenerator(bc_u, bc_theta, coupling(), modes, length);
  }
};

namespace detail {

inline double parse_double(const ConfigValues& v, const std::string& key) {
  const std::string& text = v.at(key);
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key, "config key '" + key + "': expected a number, got '" +
                               text + "'");
  }
}

inline long long parse_integer(const ConfigValues& v, const std::string& key) {
  const std::string& text = v.at(key);
  try {
    std::size_t used = 0;
    const long long value = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key, "config key '" + key +
                               "': expected an integer, got '" + text + "'");
  }
}

inline bool parse_bool(const ConfigValues& v, const std::string& key) {
  const std::string& text = v.at(key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "config key '" + key + "': expected true or false, got '" +
                             text + "'");
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, "config key '" + key + "': " + what);
}

}  // namespace detail

/// Typed, validated configuration. Every error names the offending key.
inline RunConfig to_run_config(const ConfigValues& raw) {
  using namespace detail;
  const ConfigValues v = merge(default_values(), raw);
  RunConfig c;

  const std::string bc = v.at("bc");
  require(bc.size() == 2, "bc", "expected two letters from {D, N}, got '" + bc + "'");
  try {
    c.bc_u = boundary_from_char(bc[0]);
    c.bc_theta = boundary_from_char(bc[1]);
  } catch (const InvalidArgument& e) {
    throw ConfigError("bc", std::string("config key 'bc': ") + e.what());
  }

  c.gamma = parse_double(v, "gamma");
  require(std::isfinite(c.gamma), "gamma", "must be finite");
  if (!v.at("alpha").empty()) c.alpha = parse_double(v, "alpha");
  if (!v.at("beta").empty()) c.beta = parse_double(v, "beta");
  require(c.alpha.has_value() == c.beta.has_value(), c.alpha ? "beta" : "alpha",
          "alpha and beta must be given together");
  c.decoupled = parse_bool(v, "decoupled");
  c.coupling_sign_flip = parse_bool(v, "coupling_sign_flip");
  if (!c.alpha) {
    require(c.gamma != 0.0 || c.decoupled, "gamma",
            "gamma = 0 is only allowed with decoupled = true");
  }

  const long long modes = parse_integer(v, "modes");
  require(modes >= 1 && modes <= 4096, "modes", "must be in 1..4096");
  c.modes = static_cast<int>(modes);
  c.length = parse_double(v, "length");
  require(c.length > 0.0 && std::isfinite(c.length), "length", "must be positive");

  c.t_min = parse_double(v, "t_min");
  c.t_max = parse_double(v, "t_max");
  const long long t_samples = parse_integer(v, "t_samples");
  require(t_samples >= 2 && t_samples <= 1000000, "t_samples", "must be in 2..1e6");
  c.t_samples = static_cast<int>(t_samples);
  const std::string spacing = v.at("t_spacing");
  require(spacing == "log" || spacing == "linear", "t_spacing",
          "expected log or linear, got '" + spacing + "'");
  c.log_spacing = spacing == "log";
  require(c.t_min >= 0.0 && (c.t_min > 0.0 || !c.log_spacing), "t_min",
          "must be positive for log spacing and non-negative otherwise");
  require(c.t_max > c.t_min, "t_max", "must exceed t_min");

  const std::string method = v.at("method");
  if (method == "auto") {
    c.method = EvolveMethod::automatic;
  } else if (method == "modal") {
    c.method = EvolveMethod::modal;
  } else if (method == "dense") {
    c.method = EvolveMethod::dense;
  } else {
    throw ConfigError("method", "config key 'method': expected auto, modal or dense");
  }
  require(c.method != EvolveMethod::modal || c.bc_u == c.bc_theta, "method",
          "modal propagation needs bc DD or NN");

  const std::string grid = v.at("lambda_grid");
  require(grid == "modes" || grid == "range", "lambda_grid",
          "expected modes or range, got '" + grid + "'");
  c.lambda_modes = grid == "modes";
  c.lambda_m_min = static_cast<int>(parse_integer(v, "lambda_m_min"));
  c.lambda_m_max = static_cast<int>(parse_integer(v, "lambda_m_max"));
  if (c.lambda_m_max == 0) c.lambda_m_max = std::max(1, c.modes / 2);
  require(c.lambda_m_min >= 1 && c.lambda_m_min <= c.modes, "lambda_m_min",
          "must be in 1..modes");
  require(c.lambda_m_max >= c.lambda_m_min && c.lambda_m_max <= c.modes,
          "lambda_m_max", "must be in lambda_m_min..modes");
  c.lambda_min = parse_double(v, "lambda_min");
  c.lambda_max = parse_double(v, "lambda_max");
  require(c.lambda_max >= c.lambda_min, "lambda_max", "must be >= lambda_min");
  const long long lambda_samples = parse_integer(v, "lambda_samples");
  require(lambda_samples >= 1 && lambda_samples <= 1000000, "lambda_samples",
          "must be in 1..1e6");
  c.lambda_samples = static_cast<int>(lambda_samples);
  c.fit_lambda_min = parse_double(v, "fit_lambda_min");
  c.fit_lambda_max = parse_double(v, "fit_lambda_max");
  require(c.fit_lambda_min >= 0.0, "fit_lambda_min", "must be >= 0");
  require(c.fit_lambda_max >= 0.0, "fit_lambda_max", "must be >= 0");
  c.near_eigenvalue_tol = parse_double(v, "near_eigenvalue_tol");
  require(c.near_eigenvalue_tol >= 0.0, "near_eigenvalue_tol", "must be >= 0");

  const std::string initial = v.at("initial");
  if (initial == "power_law") {
    c.initial = InitialKind::power_law;
  } else if (initial == "single_mode") {
    c.initial = InitialKind::single_mode;
  } else if (initial == "random") {
    c.initial = InitialKind::random;
  } else if (initial == "zero") {
    c.initial = InitialKind::zero;
  } else {
    throw ConfigError("initial", "config key 'initial': expected power_law, "
                                 "single_mode, random or zero, got '" + initial + "'");
  }
  c.initial_mode = static_cast<int>(parse_integer(v, "initial_mode"));
  require(c.initial_mode >= 1 && c.initial_mode <= c.modes, "initial_mode",
          "must be in 1..modes");
  const std::string block = v.at("initial_block");
  if (block == "u") {
    c.initial_block = StateBlock::u;
  } else if (block == "v") {
    c.initial_block = StateBlock::v;
  } else if (block == "theta") {
    c.initial_block = StateBlock::theta;
  } else {
    throw ConfigError("initial_block", "config key 'initial_block': expected u, v or theta");
  }
  c.initial_exponent = parse_double(v, "initial_exponent");
  require(std::isfinite(c.initial_exponent), "initial_exponent", "must be finite");
  c.fit_t_min = parse_double(v, "fit_t_min");
  c.fit_t_max = parse_double(v, "fit_t_max");
  require(c.fit_t_min > 0.0, "fit_t_min", "must be positive");
  require(c.fit_t_max > c.fit_t_min, "fit_t_max", "must exceed fit_t_min");
  const long long seed = parse_integer(v, "seed");
  require(seed >= 0, "seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  const long long samples = parse_integer(v, "verify_samples");
  require(samples >= 1 && samples <= 100000, "verify_samples", "must be in 1..1e5");
  c.verify_samples = static_cast<int>(samples);

  const std::string format = v.at("format");
  require(format == "csv" || format == "json", "format",
          "expected csv or json, got '" + format + "'");
  c.json = format == "json";
  c.output = v.at("output");
  require(!c.output.empty(), "output", "must not be empty");
  c.fit_output = v.at("fit_output");
  return c;
}

inline StateVector initial_state(const RunConfig& c, const CoupledGenerator& gen) {
  switch (c.initial) {
    case InitialKind::power_law:
      return power_law_state(gen, c.initial_exponent);
    case InitialKind::single_mode:
      return single_mode_state(gen, c.initial_block, c.initial_mode);
    case InitialKind::random:
      return random_state(gen, c.seed, 1.0);
    case InitialKind::zero:
      break;
  }
  return StateVector::zero(gen.mode_count());
}

inline std::vector<double> time_grid(const RunConfig& c) {
  return c.log_spacing ? log_grid(c.t_min, c.t_max, c.t_samples, true)
                       : linear_grid(c.t_min, c.t_max, c.t_samples);
}

}  // namespace thermospec::cli

#endif  // THERMOSPEC_CLI_CONFIG_HPP
