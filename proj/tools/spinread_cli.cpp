// spinread: analytic tables and Monte Carlo runs for optical nuclear-spin
// readout of a single Si:P donor.
//
//   spinread paper-table [--config FILE] [--out FILE] [--format csv|json-lines]
//   spinread snr-scan --tau-min 0.1ns --tau-max 5ns --tau-steps 50
//   spinread simulate --trials 100 --duration 0.5
//   spinread fidelity --times 0.01,0.1,0.6
//   spinread sweep --axis eta_d --values 0.2,0.4,0.8
//   spinread validate

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinread/spinread.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitValidation = 1;

std::vector<double> parse_times(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const auto& t : raw) {
    // Bare numbers are seconds; values with a unit go through the unit table.
    try {
      out.push_back(spinread::parse_number(t));
    } catch (const spinread::UnitError&) {
      out.push_back(spinread::parse_quantity(t, spinread::Dimension::kTime));
    }
  }
  return out;
}

double parse_delay(const std::string& raw) {
  try {
    return spinread::parse_quantity(raw, spinread::Dimension::kTime);
  } catch (const spinread::UnitError&) {
    throw spinread::UsageError("delays need a unit, e.g. 2ns: '" + raw + "'");
  }
}

void warn_if_not_perturbative(const spinread::Settings& s) {
  const auto r = spinread::evaluate(s);
  if (!r.levels.perturbative_regime()) {
    std::cerr << "warning: hyperfine/Zeeman ratio " << r.levels.perturbation_ratio()
              << " is outside the perturbative regime; flip probabilities are unreliable\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optical readout of a single 31P nuclear spin in silicon"};
  app.set_version_flag("--version", "spinread 0.1.0");

  std::string verb;
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<double> duration;
  std::optional<unsigned> threads;
  std::string tau_min = "0.1ns";
  std::string tau_max = "5ns";
  std::size_t tau_steps = 50;
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::string> times;

  app.add_option("command", verb, "paper-table, snr-scan, simulate, fidelity, sweep or validate")
      ->required()
      ->check(CLI::IsMember({"paper-table", "snr-scan", "simulate", "fidelity", "sweep", "validate"}));
  app.add_option("--config", config_path, "configuration file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
  app.add_option("--seed", seed, "root seed for all random streams");
  app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--duration", duration, "trajectory duration in seconds")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--tau-min", tau_min, "snr-scan: shortest delay, e.g. 0.1ns");
  app.add_option("--tau-max", tau_max, "snr-scan: longest delay, e.g. 5ns");
  app.add_option("--tau-steps", tau_steps, "snr-scan: grid points");
  app.add_option("--axis", axis, "sweep: key to vary");
  app.add_option("--values", values, "sweep: values for the key")->delimiter(',');
  app.add_option("--times", times, "fidelity: integration times (seconds or with unit)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    spinread::Settings settings =
        config_path.empty() ? spinread::Settings{} : spinread::load_settings(config_path);
    if (seed) settings.seed = *seed;
    if (trials) settings.trials = *trials;
    if (duration) settings.duration = *duration;
    if (threads) settings.threads = *threads;

    warn_if_not_perturbative(settings);

    spinread::Table table;
    bool validation_failed = false;
    if (verb == "paper-table" || verb == "validate") {
      table = spinread::cmd_paper_table(settings);
      validation_failed = verb == "validate" && !spinread::reference_table_passes(table);
    } else if (verb == "snr-scan") {
      table = spinread::cmd_snr_scan(settings, parse_delay(tau_min), parse_delay(tau_max), tau_steps);
    } else if (verb == "simulate") {
      table = spinread::cmd_simulate(settings);
    } else if (verb == "fidelity") {
      if (times.empty()) times = {"0.01", "0.03", "0.1", "0.3", "0.6"};
      table = spinread::cmd_fidelity(settings, parse_times(times));
    } else if (verb == "sweep") {
      if (axis.empty()) throw spinread::UsageError("sweep needs --axis and --values");
      table = spinread::cmd_sweep(settings, axis, values);
    }

    const auto fmt = format == "csv" ? spinread::OutputFormat::kCsv : spinread::OutputFormat::kJsonLines;
    if (out_path.empty()) {
      spinread::write_table(table, std::cout, fmt);
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitUsage;
      }
      spinread::write_table(table, out, fmt);
    }
    if (validation_failed) {
      std::cerr << "validate: at least one row is outside its accepted band\n";
      return kExitValidation;
    }
    return 0;
  } catch (const spinread::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const spinread::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const spinread::UnitError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
