#pragma once

// Excitation-cycle photon budget: Auger vs zero-phonon radiative decay of
// the bound exciton, modified by the photonic environment, and the chain of
// extraction/detection efficiencies that follows.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spinread/physics_model.hpp"

namespace spinread {

struct CavityPreset {
  std::string name;
  double beta = 1.0;                   // coupling into the collected mode
  double radiative_rate_factor = 1.0;  // <1 suppression, >1 Purcell enhancement
  double extra_collection = 1.0;       // downstream optics

  void validate() const {
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("CavityPreset '" + name + "': beta must lie in [0, 1]");
    }
    if (!(radiative_rate_factor > 0.0) || !std::isfinite(radiative_rate_factor)) {
      throw std::invalid_argument("CavityPreset '" + name +
                                  "': radiative_rate_factor must be > 0");
    }
    if (!(extra_collection >= 0.0 && extra_collection <= 1.0)) {
      throw std::invalid_argument("CavityPreset '" + name +
                                  "': extra_collection must lie in [0, 1]");
    }
  }
};

namespace presets {

/// Emitter in bulk, every emitted photon counted.
inline CavityPreset bare() { return {"bare", 1.0, 1.0, 1.0}; }

/// Planar DBR cavity: beta 0.8 at the cost of a 3x slower radiative rate.
inline CavityPreset dbr() { return {"dbr", 0.8, 1.0 / 3.0, 1.0}; }

/// 2D photonic-crystal defect cavity: Purcell 100, beta 1, and 0.5
/// collection of the out-coupled beam.
inline CavityPreset photonic_crystal() { return {"phc", 1.0, 100.0, 0.5}; }

inline std::array<CavityPreset, 3> all() { return {bare(), dbr(), photonic_crystal()}; }

inline std::optional<CavityPreset> find(std::string_view name) {
  for (auto& p : all()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace presets

struct EmissionModel {
  double cycle_time = 0.0;           // s, mean duration of one excitation cycle
  double radiative_branching = 0.0;  // P(cycle ends radiatively)
  double signal_fraction = 0.0;      // P(radiative photon is on line a/b)
  double be_lifetime = 0.0;          // s

  /// Probability that a single cycle produces a photon on line a or b.
  double signal_probability_per_cycle() const { return radiative_branching * signal_fraction; }

  void validate() const {
    if (!(cycle_time > 0.0) || !std::isfinite(cycle_time)) {
      throw std::invalid_argument("EmissionModel: cycle_time must be > 0");
    }
    if (!(radiative_branching >= 0.0 && radiative_branching <= 1.0)) {
      throw std::invalid_argument("EmissionModel: radiative_branching must lie in [0, 1]");
    }
    if (!(signal_fraction >= 0.0 && signal_fraction <= 1.0)) {
      throw std::invalid_argument("EmissionModel: signal_fraction must lie in [0, 1]");
    }
  }
};

/// The photonic environment rescales the radiative channel only; the Auger
/// rate is left untouched.
inline EmissionModel build_emission_model(const DonorParameters& donor, double occupation,
                                          const CavityPreset& cavity, double recapture_time) {
  donor.validate();
  cavity.validate();
  if (!(recapture_time >= 0.0)) {
    throw std::invalid_argument("build_emission_model: recapture_time must be >= 0");
  }
  if (!(occupation >= 0.0 && occupation <= 1.0)) {
    throw std::invalid_argument("build_emission_model: occupation must lie in [0, 1]");
  }
  const double radiative_rate = cavity.radiative_rate_factor / donor.tau_rad;
  const double total_rate = 1.0 / donor.tau_auger + radiative_rate;
  EmissionModel model;
  model.be_lifetime = 1.0 / total_rate;
  model.cycle_time = model.be_lifetime + recapture_time;
  model.radiative_branching = radiative_rate / total_rate;
  model.signal_fraction = occupation;
  return model;
}

/// Photons per second emitted on lines a/b.
inline double emitted_signal_flux(const EmissionModel& model) {
  return model.signal_fraction * model.radiative_branching / model.cycle_time;
}

/// Flux coupled into the cavity output mode (beta only).
inline double coupled_flux(const EmissionModel& model, const CavityPreset& cavity) {
  return emitted_signal_flux(model) * cavity.beta;
}

/// Flux reaching the detector plane.
inline double collected_flux(const EmissionModel& model, const CavityPreset& cavity) {
  return coupled_flux(model, cavity) * cavity.extra_collection;
}

inline double detected_flux(double collected, double detector_efficiency) {
  if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
    throw std::invalid_argument("detected_flux: efficiency must lie in [0, 1]");
  }
  return collected * detector_efficiency;
}

}  // namespace spinread
