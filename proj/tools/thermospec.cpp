// thermospec: spectral analysis of the weakly coupled thermoelastic wave
// system on an interval.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "thermospec/cli/commands.hpp"

namespace {

using thermospec::cli::CommandResult;
using thermospec::cli::ConfigValues;

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

bool write_document(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path == "-") {
    fallback << text;
    return static_cast<bool>(fallback);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral semigroup analyzer for the weakly coupled thermoelastic wave system"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> descriptions = {
      {"spectrum", "eigenvalues of the truncated generator (JSON or CSV)"},
      {"evolve", "energy trace E(t) as CSV columns t,energy,state_norm"},
      {"resolvent", "resolvent norms on the imaginary axis plus a growth-exponent fit"},
      {"decay", "power-law versus exponential fit of E(t)"},
      {"verify", "run the invariant suite; exit 0 iff every check passes"},
  };
  std::map<std::string, Subcommand> subcommands;
  for (const auto& [name, description] : descriptions) {
    Subcommand& sub = subcommands[name];
    sub.app = app.add_subcommand(name, description);
    sub.app->add_option("--config", sub.config_path, "key = value configuration file");
    for (const auto& key : thermospec::cli::config_keys()) {
      const std::string shown = key.default_value.empty() ? "(unset)" : key.default_value;
      sub.app->add_option_function<std::string>(
          "--" + key.name,
          [&sub, name = key.name](const std::string& value) { sub.overrides[name] = value; },
          key.help + " [default: " + shown + "]");
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [name, sub] : subcommands) {
    if (!sub.app->parsed()) continue;
    ConfigValues values;
    try {
      if (!sub.config_path.empty()) values = thermospec::cli::read_config_file(sub.config_path);
    } catch (const thermospec::cli::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return thermospec::cli::kConfigError;
    }
    for (const auto& [key, value] : sub.overrides) values[key] = value;

    const CommandResult result = thermospec::cli::run_command(name, values);
    if (!result.message.empty()) std::cerr << result.message;
    if (result.primary.empty()) return result.exit_code;

    std::string output = "-";
    if (auto it = values.find("output"); it != values.end()) output = it->second;
    if (!write_document(output, result.primary, std::cout)) {
      std::cerr << "cannot write '" << output << "'\n";
      return thermospec::cli::kConfigError;
    }
    if (!result.secondary.empty()) {
      std::string fit_path;
      if (auto it = values.find("fit_output"); it != values.end()) fit_path = it->second;
      if (fit_path.empty()) fit_path = output == "-" ? "" : output + ".fit.json";
      const bool ok = fit_path.empty() ? write_document("-", result.secondary, std::cerr)
                                       : write_document(fit_path, result.secondary, std::cout);
      if (!ok) {
        std::cerr << "cannot write '" << fit_path << "'\n";
        return thermospec::cli::kConfigError;
      }
    }
    return result.exit_code;
  }
  return thermospec::cli::kConfigError;
}
