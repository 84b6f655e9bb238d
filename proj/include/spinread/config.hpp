#pragma once

// Run settings and their flat text configuration format.
//
//   # comment
//   b_field = "10 T"
//   linewidth_fwhm = "150 MHz"
//   psi0_sq = "0.44e24 cm^-3"
//   cavity = dbr
//   preset.phc.extra_collection = 0.5
//
// One `key = value` per line. Values may be quoted. Dimensioned keys
// require a unit; see units.hpp for the accepted symbols.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinread/emission_budget.hpp"
#include "spinread/interferometer.hpp"
#include "spinread/physics_model.hpp"
#include "spinread/protocol_mc.hpp"
#include "spinread/spin_dynamics.hpp"
#include "spinread/units.hpp"

namespace spinread {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key = {}, int line = 0)
      : std::runtime_error(format(message, key, line)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& message, const std::string& key, int line) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "key '" + key + "': ";
    return out + message;
  }

  std::string key_;
  int line_;
};

struct Settings {
  double b_field = 10.0;      // T
  double temperature = 4.0;   // K
  DonorParameters donor;

  // Splitting used downstream of the level structure (lines, flip
  // probability). Defaults to the ESR-measured 60 MHz; unset means the
  // contact-interaction value computed from psi0_sq.
  std::optional<double> hyperfine_splitting = 60e6;  // Hz

  double hole_occupation = 0.8;
  std::optional<double> hole_spacing;  // Hz; unset means calibrate from hole_occupation
  double recapture_time = 1e-9;        // s
  double neutralization_time = 1e-9;   // s

  std::string cavity = "dbr";
  std::map<std::string, CavityPreset> presets{{"bare", presets::bare()},
                                              {"dbr", presets::dbr()},
                                              {"phc", presets::photonic_crystal()}};

  InterferometerConfig interferometer{2e-9, 1, 0.4, 0.0};

  double randomization_threshold = 0.1;
  std::optional<double> cross_relaxation_time = 30.0;  // s
  FlipChannels flip_channels;
  std::optional<double> flip_probability;  // per cycle; unset means composed from physics

  InitialState initial_state = InitialState::kUp;
  double duration = 0.6;  // s
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t trials = 1000;
  unsigned threads = 0;
  double target_snr = 1.0;

  const CavityPreset& active_cavity() const {
    const auto it = presets.find(cavity);
    if (it == presets.end()) throw ConfigError("unknown cavity preset '" + cavity + "'", "cavity");
    return it->second;
  }

  MagneticEnvironment environment() const { return {b_field, temperature}; }
};

namespace config_detail {

inline std::string_view trim(std::string_view s) { return detail::trim(s); }

inline std::string unquote(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    v = v.substr(1, v.size() - 2);
  }
  return std::string(v);
}

inline bool parse_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw UnitError("expected a boolean, got '" + std::string(v) + "'");
}

inline std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw UnitError("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

using Setter = std::function<void(Settings&, const std::string&)>;

struct KeySpec {
  std::string name;
  std::string help;
  bool sweepable = false;
  Setter set;
};

inline Setter quantity(double Settings::*field, Dimension d) {
  return [field, d](Settings& s, const std::string& v) { s.*field = parse_quantity(v, d); };
}

template <typename Getter>
Setter nested_quantity(Getter get, Dimension d) {
  return [get, d](Settings& s, const std::string& v) { get(s) = parse_quantity(v, d); };
}

inline const std::vector<KeySpec>& key_table() {
  using D = Dimension;
  static const std::vector<KeySpec> table = {
      {"b_field", "applied field, e.g. \"10 T\"", true, quantity(&Settings::b_field, D::kMagneticField)},
      {"temperature", "lattice temperature, e.g. \"4 K\"", true,
       quantity(&Settings::temperature, D::kTemperature)},
      {"psi0_sq", "electron density at the nucleus, e.g. \"0.44e24 cm^-3\"", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.psi0_sq; }, D::kDensity)},
      {"gamma_n", "nuclear gyromagnetic ratio, e.g. \"17.235 MHz/T\"", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.gamma_n; }, D::kGyromagneticRatio)},
      {"g0", "electron g-factor", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.g0; }, D::kDimensionless)},
      {"tau_auger", "Auger lifetime", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.tau_auger; }, D::kTime)},
      {"tau_rad", "zero-phonon radiative lifetime", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.tau_rad; }, D::kTime)},
      {"linewidth_fwhm", "PL linewidth (ordinary frequency)", true,
       nested_quantity([](Settings& s) -> double& { return s.donor.linewidth_fwhm; }, D::kFrequency)},
      {"be_hyperfine", "bound-exciton hyperfine scale", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.be_hyperfine; }, D::kFrequency)},
      {"capture_cross_section", "electron capture cross section, e.g. \"4e-11 cm^2\"", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.capture_cross_section; }, D::kArea)},
      {"effective_mass_ratio", "conduction-electron effective mass / m_e", false,
       nested_quantity([](Settings& s) -> double& { return s.donor.effective_mass_ratio; },
                       D::kDimensionless)},
      {"hyperfine_splitting", "splitting used for the lines, or \"contact\" for the computed value",
       false,
       [](Settings& s, const std::string& v) {
         if (v == "contact" || v == "auto") {
           s.hyperfine_splitting.reset();
         } else {
           s.hyperfine_splitting = parse_quantity(v, D::kFrequency);
         }
       }},
      {"hole_occupation", "target occupation of the lowest hole level", false,
       quantity(&Settings::hole_occupation, D::kDimensionless)},
      {"hole_spacing", "hole Zeeman spacing, or \"auto\" to calibrate from hole_occupation", false,
       [](Settings& s, const std::string& v) {
         if (v == "auto") {
           s.hole_spacing.reset();
         } else {
           s.hole_spacing = parse_quantity(v, D::kFrequency);
         }
       }},
      {"recapture_time", "donor re-neutralization time added to every cycle", false,
       quantity(&Settings::recapture_time, D::kTime)},
      {"neutralization_time", "capture time for the free-electron density estimate", false,
       quantity(&Settings::neutralization_time, D::kTime)},
      {"cavity", "active cavity preset (bare, dbr, phc or a custom preset.<name>)", true,
       [](Settings& s, const std::string& v) {
         if (!s.presets.contains(v)) throw UnitError("unknown cavity preset '" + v + "'");
         s.cavity = v;
       }},
      {"delay", "interferometer arm delay", true,
       nested_quantity([](Settings& s) -> double& { return s.interferometer.delay; }, D::kTime)},
      {"bias_parity", "+1 or -1", false,
       [](Settings& s, const std::string& v) {
         const double p = parse_number(v);
         if (p != 1.0 && p != -1.0) throw UnitError("bias_parity must be +1 or -1");
         s.interferometer.bias_parity = static_cast<int>(p);
       }},
      {"eta_d", "detector efficiency", true,
       nested_quantity([](Settings& s) -> double& { return s.interferometer.detector_efficiency; },
                       D::kDimensionless)},
      {"dark_rate", "total dark count rate, e.g. \"10 /s\"", false,
       nested_quantity([](Settings& s) -> double& { return s.interferometer.dark_rate; }, D::kRate)},
      {"flip_threshold", "cumulative flip probability counted as randomized", false,
       quantity(&Settings::randomization_threshold, D::kDimensionless)},
      {"cross_relaxation_time", "equilibrium nuclear relaxation time, or \"none\"", false,
       [](Settings& s, const std::string& v) {
         if (v == "none") {
           s.cross_relaxation_time.reset();
         } else {
           s.cross_relaxation_time = parse_quantity(v, D::kTime);
         }
       }},
      {"exciton_dos_factor", "free-exciton capture flip weight relative to electron capture", false,
       nested_quantity([](Settings& s) -> double& { return s.flip_channels.exciton_dos_factor; },
                       D::kDimensionless)},
      {"include_be_flip", "add the bound-exciton hyperfine flip channel", false,
       [](Settings& s, const std::string& v) { s.flip_channels.include_be_channel = parse_bool(v); }},
      {"include_radiative_flip", "add the radiative-decay flip channel", false,
       [](Settings& s, const std::string& v) {
         s.flip_channels.include_radiative_channel = parse_bool(v);
       }},
      {"include_minor_denominator_terms", "add nuclear Zeeman and hyperfine to the flip denominator",
       false,
       [](Settings& s, const std::string& v) {
         s.flip_channels.include_minor_denominator_terms = parse_bool(v);
       }},
      {"flip_probability", "per-cycle flip probability, or \"auto\"", false,
       [](Settings& s, const std::string& v) {
         if (v == "auto") {
           s.flip_probability.reset();
         } else {
           s.flip_probability = parse_quantity(v, D::kDimensionless);
         }
       }},
      {"initial_state", "up, down or random", false,
       [](Settings& s, const std::string& v) {
         if (v == "up") {
           s.initial_state = InitialState::kUp;
         } else if (v == "down") {
           s.initial_state = InitialState::kDown;
         } else if (v == "random") {
           s.initial_state = InitialState::kRandom;
         } else {
           throw UnitError("initial_state must be up, down or random");
         }
       }},
      {"duration", "simulated wall-clock time per trajectory", false,
       quantity(&Settings::duration, D::kTime)},
      {"seed", "64-bit root seed", false,
       [](Settings& s, const std::string& v) { s.seed = parse_u64(v); }},
      {"trials", "trajectories per Monte Carlo point", false,
       [](Settings& s, const std::string& v) { s.trials = parse_u64(v); }},
      {"threads", "worker threads (0 = all cores)", false,
       [](Settings& s, const std::string& v) { s.threads = static_cast<unsigned>(parse_u64(v)); }},
      {"target_snr", "power SNR defining the integration time", false,
       quantity(&Settings::target_snr, D::kDimensionless)},
  };
  return table;
}

// preset.<name>.<field>
inline bool apply_preset_key(Settings& s, const std::string& key, const std::string& value) {
  constexpr std::string_view prefix = "preset.";
  if (!key.starts_with(prefix)) return false;
  const std::string rest = key.substr(prefix.size());
  const auto dot = rest.rfind('.');
  if (dot == std::string::npos || dot == 0) {
    throw UnitError("preset keys have the form preset.<name>.<field>");
  }
  const std::string name = rest.substr(0, dot);
  const std::string field = rest.substr(dot + 1);
  auto [it, inserted] = s.presets.try_emplace(name, CavityPreset{name, 1.0, 1.0, 1.0});
  CavityPreset& p = it->second;
  const double x = parse_quantity(value, Dimension::kDimensionless);
  if (field == "beta") {
    p.beta = x;
  } else if (field == "radiative_rate_factor") {
    p.radiative_rate_factor = x;
  } else if (field == "extra_collection") {
    p.extra_collection = x;
  } else {
    throw UnitError("unknown preset field '" + field +
                    "' (expected beta, radiative_rate_factor or extra_collection)");
  }
  p.validate();
  return true;
}

}  // namespace config_detail

/// Names of keys accepted by the sweep command.
inline std::vector<std::string> sweepable_keys() {
  std::vector<std::string> out;
  for (const auto& k : config_detail::key_table()) {
    if (k.sweepable) out.push_back(k.name);
  }
  return out;
}

/// Applies one `key = value` assignment. Throws ConfigError on failure.
inline void apply_setting(Settings& s, const std::string& key, const std::string& raw_value,
                          int line = 0) {
  const std::string value = config_detail::unquote(raw_value);
  try {
    if (config_detail::apply_preset_key(s, key, value)) return;
    for (const auto& spec : config_detail::key_table()) {
      if (spec.name == key) {
        spec.set(s, value);
        return;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), key, line);
  }
  throw ConfigError("unknown key", key, line);
}

inline Settings parse_settings(std::istream& in) {
  Settings s;
  std::string text;
  int line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '"') quoted = !quoted;
      if (text[i] == '#' && !quoted) {
        text.resize(i);
        break;
      }
    }
    const std::string_view line = config_detail::trim(text);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value'", {}, line_no);
    }
    const std::string key(config_detail::trim(line.substr(0, eq)));
    const std::string value(config_detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("missing key before '='", {}, line_no);
    if (value.empty()) throw ConfigError("missing value", key, line_no);
    apply_setting(s, key, value, line_no);
  }
  // Cross-field checks once everything is read.
  try {
    s.donor.validate();
    s.environment();
    s.interferometer.validate();
    (void)s.active_cavity();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

inline Settings parse_settings(const std::string& text) {
  std::istringstream in(text);
  return parse_settings(in);
}

inline Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_settings(in);
}

}  // namespace spinread
