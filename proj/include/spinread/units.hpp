#pragma once

// Dimensioned quantities written as "<number> <unit>", e.g. "10 T",
// "150 MHz", "0.44e24 cm^-3". Values are converted to SI by a single
// multiplication with the unit's factor. Dimensioned quantities must carry
// a unit; dimensionless ones must not.

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "spinread/constants.hpp"

namespace spinread {

enum class Dimension {
  kDimensionless,
  kMagneticField,      // T
  kTemperature,        // K
  kFrequency,          // Hz (energies accepted, converted with h)
  kTime,               // s
  kDensity,            // m^-3
  kArea,               // m^2
  kRate,               // s^-1
  kGyromagneticRatio,  // rad s^-1 T^-1
};

constexpr std::string_view si_unit(Dimension d) {
  switch (d) {
    case Dimension::kDimensionless: return "";
    case Dimension::kMagneticField: return "T";
    case Dimension::kTemperature: return "K";
    case Dimension::kFrequency: return "Hz";
    case Dimension::kTime: return "s";
    case Dimension::kDensity: return "m^-3";
    case Dimension::kArea: return "m^2";
    case Dimension::kRate: return "/s";
    case Dimension::kGyromagneticRatio: return "rad/s/T";
  }
  return "";
}

class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct UnitEntry {
  std::string_view symbol;
  Dimension dimension;
  double factor;
};

inline constexpr double kHzPerEv = constants::elementary_charge / constants::planck;

inline constexpr std::array<UnitEntry, 41> kUnits{{
    {"T", Dimension::kMagneticField, 1.0},
    {"mT", Dimension::kMagneticField, 1e-3},
    {"G", Dimension::kMagneticField, 1e-4},
    {"K", Dimension::kTemperature, 1.0},
    {"mK", Dimension::kTemperature, 1e-3},
    {"Hz", Dimension::kFrequency, 1.0},
    {"kHz", Dimension::kFrequency, 1e3},
    {"MHz", Dimension::kFrequency, 1e6},
    {"GHz", Dimension::kFrequency, 1e9},
    {"THz", Dimension::kFrequency, 1e12},
    {"eV", Dimension::kFrequency, kHzPerEv},
    {"meV", Dimension::kFrequency, kHzPerEv * 1e-3},
    {"ueV", Dimension::kFrequency, kHzPerEv * 1e-6},
    {"s", Dimension::kTime, 1.0},
    {"ms", Dimension::kTime, 1e-3},
    {"us", Dimension::kTime, 1e-6},
    {"ns", Dimension::kTime, 1e-9},
    {"ps", Dimension::kTime, 1e-12},
    {"min", Dimension::kTime, 60.0},
    {"h", Dimension::kTime, 3600.0},
    {"m^-3", Dimension::kDensity, 1.0},
    {"cm^-3", Dimension::kDensity, 1e6},
    {"m^2", Dimension::kArea, 1.0},
    {"cm^2", Dimension::kArea, 1e-4},
    {"nm^2", Dimension::kArea, 1e-18},
    {"/s", Dimension::kRate, 1.0},
    {"s^-1", Dimension::kRate, 1.0},
    {"Hz", Dimension::kRate, 1.0},
    {"kHz", Dimension::kRate, 1e3},
    {"MHz", Dimension::kRate, 1e6},
    {"/ms", Dimension::kRate, 1e3},
    {"/us", Dimension::kRate, 1e6},
    {"/min", Dimension::kRate, 1.0 / 60.0},
    {"/h", Dimension::kRate, 1.0 / 3600.0},
    {"cps", Dimension::kRate, 1.0},
    {"rad/s/T", Dimension::kGyromagneticRatio, 1.0},
    {"rad s^-1 T^-1", Dimension::kGyromagneticRatio, 1.0},
    {"Hz/T", Dimension::kGyromagneticRatio, constants::two_pi},
    {"kHz/T", Dimension::kGyromagneticRatio, constants::two_pi * 1e3},
    {"MHz/T", Dimension::kGyromagneticRatio, constants::two_pi * 1e6},
    {"GHz/T", Dimension::kGyromagneticRatio, constants::two_pi * 1e9},
}};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Parses a plain floating-point literal, rejecting trailing text.
inline double parse_number(std::string_view text) {
  const std::string_view t = detail::trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || t.empty()) {
    throw UnitError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

/// Parses "<number> <unit>" into SI units of the requested dimension.
inline double parse_quantity(std::string_view text, Dimension expected) {
  const std::string_view t = detail::trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || t.empty()) {
    throw UnitError("expected '<number> <unit>', got '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw UnitError("non-finite value in '" + std::string(text) + "'");
  const std::string_view unit = detail::trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));

  if (expected == Dimension::kDimensionless) {
    if (!unit.empty()) {
      throw UnitError("dimensionless value must not carry a unit: '" + std::string(text) + "'");
    }
    return value;
  }
  if (unit.empty()) {
    throw UnitError("missing unit in '" + std::string(text) + "' (expected a " +
                    std::string(si_unit(expected)) + "-compatible unit)");
  }
  for (const auto& entry : detail::kUnits) {
    if (entry.dimension == expected && entry.symbol == unit) return value * entry.factor;
  }
  throw UnitError("unit '" + std::string(unit) + "' is not valid here (expected a " +
                  std::string(si_unit(expected)) + "-compatible unit)");
}

}  // namespace spinread
