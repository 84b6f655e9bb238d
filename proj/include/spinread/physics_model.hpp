#pragma once

// Static level structure of the neutral phosphorus donor (P0) and its bound
// exciton (P0,X) in a magnetic field.
//
// Conventions: every frequency that crosses a public boundary of this header
// is an ordinary frequency in Hz, except transition_frequencies(), which
// returns angular detunings (rad/s) for the interferometer. Optical carrier
// frequencies are never represented; lines are described by their detuning
// from the interferometer bias reference.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "spinread/constants.hpp"

namespace spinread {

class MagneticEnvironment {
 public:
  MagneticEnvironment(double b_field_tesla, double temperature_kelvin)
      : b_field_(b_field_tesla), temperature_(temperature_kelvin) {
    if (!(b_field_ > 0.0) || !std::isfinite(b_field_)) {
      throw std::invalid_argument("MagneticEnvironment: b_field must be > 0 T");
    }
    if (!(temperature_ > 0.0) || !std::isfinite(temperature_)) {
      throw std::invalid_argument("MagneticEnvironment: temperature must be > 0 K");
    }
  }

  double b_field() const { return b_field_; }
  double temperature() const { return temperature_; }

  /// k_B T / h in Hz.
  double thermal_frequency() const {
    return constants::boltzmann * temperature_ / constants::planck;
  }

 private:
  double b_field_;
  double temperature_;
};

/// Material constants for 31P in 28Si. All SI except where noted.
struct DonorParameters {
  double psi0_sq = 0.44e30;                       // m^-3 (0.44e24 cm^-3)
  double gamma_n = constants::gamma_p31;          // rad s^-1 T^-1
  double g0 = constants::free_electron_g;
  double tau_auger = 300e-9;                      // s
  double tau_rad = 2e-3;                          // s
  double linewidth_fwhm = 150e6;                  // Hz
  double be_hyperfine = 2e6;                      // Hz
  double capture_cross_section = 4e-15;           // m^2 (4e-11 cm^2)
  double effective_mass_ratio = 0.26;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("DonorParameters: ") + name + " must be > 0");
      }
    };
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("DonorParameters: ") + name + " must be >= 0");
      }
    };
    // A zero density is a legitimate limit (no contact interaction).
    non_negative(psi0_sq, "psi0_sq");
    non_negative(gamma_n, "gamma_n");
    positive(g0, "g0");
    positive(tau_auger, "tau_auger");
    positive(tau_rad, "tau_rad");
    positive(linewidth_fwhm, "linewidth_fwhm");
    non_negative(be_hyperfine, "be_hyperfine");
    positive(capture_cross_section, "capture_cross_section");
    positive(effective_mass_ratio, "effective_mass_ratio");
    if (!(tau_rad > tau_auger)) {
      throw std::invalid_argument("DonorParameters: tau_rad must exceed tau_auger");
    }
  }
};

/// Fermi-contact hyperfine splitting of the P0 ground state, in Hz:
/// (mu0/3) g0 muB gamma_n hbar |psi(0)|^2 / h.
inline double hyperfine_splitting(const DonorParameters& donor) {
  donor.validate();
  const double energy = constants::vacuum_permeability / 3.0 * donor.g0 *
                        constants::bohr_magneton * donor.gamma_n * constants::hbar *
                        donor.psi0_sq;
  return energy / constants::planck;
}

/// g0 muB B0 / h in Hz.
inline double electron_zeeman_frequency(double b_field, double g0) {
  return g0 * constants::bohr_magneton * b_field / constants::planck;
}

inline double electron_zeeman_frequency(const MagneticEnvironment& env, double g0) {
  return electron_zeeman_frequency(env.b_field(), g0);
}

/// Nuclear Zeeman frequency gamma_n B0 / 2pi in Hz.
inline double nuclear_zeeman_frequency(const MagneticEnvironment& env, double gamma_n) {
  return gamma_n * env.b_field() / constants::two_pi;
}

inline double frequency_to_millielectronvolt(double hz) {
  return hz * constants::planck / constants::elementary_charge * 1e3;
}

/// Thermal occupation of the lowest of four equally spaced hole Zeeman
/// levels: 1 / (1 + q + q^2 + q^3), q = exp(-h spacing / kT).
inline double lowest_level_occupation(const MagneticEnvironment& env, double hole_spacing) {
  if (hole_spacing < 0.0) {
    throw std::domain_error("lowest_level_occupation: hole_spacing must be >= 0");
  }
  if (std::isinf(hole_spacing)) return 1.0;
  const double q = std::exp(-hole_spacing / env.thermal_frequency());
  return 1.0 / (1.0 + q * (1.0 + q * (1.0 + q)));
}

/// Inverse of lowest_level_occupation by bisection. Result is accurate to
/// better than 1e-9 relative in the returned occupation.
inline double calibrate_hole_spacing(const MagneticEnvironment& env, double target_occupation) {
  if (!(target_occupation > 0.25 && target_occupation < 1.0)) {
    throw std::domain_error(
        "calibrate_hole_spacing: target occupation must lie in the open interval (0.25, 1)");
  }
  // Solve in x = h spacing / kT; occupation is strictly increasing in x.
  auto occupation_at = [](double x) {
    const double q = std::exp(-x);
    return 1.0 / (1.0 + q * (1.0 + q * (1.0 + q)));
  };
  double lo = 0.0;
  double hi = 1.0;
  while (occupation_at(hi) < target_occupation) {
    hi *= 2.0;
    if (hi > 1e3) {
      throw std::domain_error("calibrate_hole_spacing: target occupation numerically unreachable");
    }
  }
  for (int iter = 0; iter < 200 && hi - lo > std::numeric_limits<double>::epsilon() * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (occupation_at(mid) < target_occupation) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) * env.thermal_frequency();
}

struct LevelDiagram {
  double hyperfine_splitting = 0.0;   // Hz
  double electron_zeeman = 0.0;       // Hz
  double hole_level_spacing = 0.0;    // Hz
  double lowest_occupation = 0.25;

  /// Hyperfine/Zeeman ratio; the flip estimate and the two-line picture
  /// assume it is small.
  double perturbation_ratio() const { return hyperfine_splitting / electron_zeeman; }
  bool perturbative_regime(double limit = 1e-2) const { return perturbation_ratio() < limit; }
};

/// Builds the level diagram. The hole spacing is calibrated from
/// target_occupation unless an explicit spacing is supplied.
inline LevelDiagram make_level_diagram(const DonorParameters& donor, const MagneticEnvironment& env,
                                       double target_occupation,
                                       double hole_spacing_override = -1.0) {
  donor.validate();
  LevelDiagram d;
  d.hyperfine_splitting = hyperfine_splitting(donor);
  d.electron_zeeman = electron_zeeman_frequency(env, donor.g0);
  d.hole_level_spacing = hole_spacing_override >= 0.0
                             ? hole_spacing_override
                             : calibrate_hole_spacing(env, target_occupation);
  d.lowest_occupation = lowest_level_occupation(env, d.hole_level_spacing);
  return d;
}

/// Angular detunings (rad/s) of lines a and b from the mean optical
/// frequency: (+pi*splitting, -pi*splitting).
inline std::pair<double, double> transition_frequencies(double hyperfine_splitting) {
  if (hyperfine_splitting < 0.0) {
    throw std::domain_error("transition_frequencies: splitting must be >= 0");
  }
  const double half = constants::pi * hyperfine_splitting;
  return {half, -half};
}

/// Free-electron density (m^-3) that neutralizes an ionized donor within
/// capture_time: n = 1 / (sigma v_th t), v_th = sqrt(3 kT / m*).
inline double neutralization_electron_density(const DonorParameters& donor,
                                              const MagneticEnvironment& env,
                                              double capture_time) {
  if (!(capture_time > 0.0)) {
    throw std::domain_error("neutralization_electron_density: capture_time must be > 0");
  }
  const double v_th = std::sqrt(3.0 * constants::boltzmann * env.temperature() /
                                (donor.effective_mass_ratio * constants::electron_mass));
  return 1.0 / (donor.capture_cross_section * v_th * capture_time);
}

}  // namespace spinread
