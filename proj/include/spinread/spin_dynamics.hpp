#pragma once

// Nuclear-spin destabilization by the optical cycle.
//
// Each Auger event ionizes the donor; recapture of an electron (and of a
// free exciton) can proceed through a virtual hyperfine flip-flop. The
// per-capture flip probability is (1/2)(dE_hf / E_denominator)^2, with the
// denominator dominated by the electron Zeeman energy. Two captures per
// cycle give (dE_hf / E_z)^2 per cycle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "spinread/emission_budget.hpp"

namespace spinread {

struct FlipModel {
  double p_flip_per_cycle = 0.0;
  double background_rate = 0.0;         // s^-1
  double randomization_threshold = 0.1;

  void validate() const {
    if (!(p_flip_per_cycle >= 0.0 && p_flip_per_cycle <= 1.0)) {
      throw std::invalid_argument("FlipModel: p_flip_per_cycle must lie in [0, 1]");
    }
    if (!(background_rate >= 0.0) || !std::isfinite(background_rate)) {
      throw std::invalid_argument("FlipModel: background_rate must be >= 0");
    }
    if (!(randomization_threshold > 0.0 && randomization_threshold < 1.0)) {
      throw std::invalid_argument("FlipModel: randomization_threshold must lie in (0, 1)");
    }
  }

  /// Flip probability of one cycle including background relaxation over
  /// the cycle duration.
  double total_per_cycle(double cycle_time) const {
    if (p_flip_per_cycle >= 1.0) return 1.0;
    return -std::expm1(std::log1p(-p_flip_per_cycle) - background_rate * cycle_time);
  }
};

/// Per-cycle flip probability from electron plus free-exciton capture:
/// 2 * (1/2) * (hyperfine / denominator)^2. Both arguments in Hz.
inline double flip_probability_per_cycle(double hyperfine, double zeeman_denominator) {
  if (!(zeeman_denominator > 0.0)) {
    throw std::domain_error("flip_probability_per_cycle: Zeeman denominator must be > 0");
  }
  if (!(hyperfine >= 0.0)) {
    throw std::domain_error("flip_probability_per_cycle: hyperfine must be >= 0");
  }
  const double r = hyperfine / zeeman_denominator;
  return r * r;
}

/// Weight of a flip through the bound-exciton (hole) hyperfine coupling
/// relative to the donor-electron channel.
inline double be_flip_suppression(double be_hyperfine, double donor_hyperfine) {
  if (!(donor_hyperfine > 0.0)) {
    throw std::domain_error("be_flip_suppression: donor hyperfine must be > 0");
  }
  const double r = be_hyperfine / donor_hyperfine;
  return r * r;
}

/// Options for composing the per-cycle flip probability used by the
/// trajectory engine.
struct FlipChannels {
  double exciton_dos_factor = 1.0;  // free-exciton capture relative to electron capture
  bool include_be_channel = true;
  bool include_radiative_channel = true;
  bool include_minor_denominator_terms = false;  // nuclear Zeeman + hyperfine in E_denominator
};

struct FlipInputs {
  double hyperfine = 0.0;        // Hz
  double electron_zeeman = 0.0;  // Hz
  double nuclear_zeeman = 0.0;   // Hz
  double be_hyperfine = 0.0;     // Hz
  double radiative_branching = 0.0;
};

inline double composed_flip_probability(const FlipInputs& in, const FlipChannels& ch) {
  double denominator = in.electron_zeeman;
  if (ch.include_minor_denominator_terms) {
    denominator += in.nuclear_zeeman + in.hyperfine;
  }
  const double per_capture = 0.5 * flip_probability_per_cycle(in.hyperfine, denominator);
  const double capture = per_capture * (1.0 + ch.exciton_dos_factor);
  double corrections = 1.0;
  if (ch.include_be_channel && in.hyperfine > 0.0) {
    corrections += be_flip_suppression(in.be_hyperfine, in.hyperfine);
  }
  if (ch.include_radiative_channel) corrections += in.radiative_branching;
  return std::min(1.0, capture * corrections);
}

struct RandomizationBudget {
  bool unbounded = false;
  std::uint64_t linear = 0;     // ceil(threshold / p)
  std::uint64_t geometric = 0;  // ceil(ln(1 - threshold) / ln(1 - p))
};

namespace detail {
// ceil() that does not round 1999999.9999999998 up to the next integer.
inline std::uint64_t robust_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::uint64_t>(r);
  }
  return static_cast<std::uint64_t>(std::ceil(x));
}
}  // namespace detail

/// Number of excitation cycles until the cumulative flip probability
/// reaches the randomization threshold.
inline RandomizationBudget excitations_to_randomization(const FlipModel& model) {
  model.validate();
  RandomizationBudget out;
  if (model.p_flip_per_cycle == 0.0) {
    out.unbounded = true;
    out.linear = out.geometric = std::numeric_limits<std::uint64_t>::max();
    return out;
  }
  const double p = model.p_flip_per_cycle;
  const double t = model.randomization_threshold;
  out.linear = detail::robust_ceil(t / p);
  out.geometric = p >= 1.0 ? 1 : detail::robust_ceil(std::log1p(-t) / std::log1p(-p));
  return out;
}

struct PhotonBudget {
  double detected_photons = 0.0;
  double power_snr = 0.0;
};

/// Signal photons detected, and the resulting power SNR, over a given
/// number of excitation cycles.
inline PhotonBudget budget_before_randomization(double n_excitations, const EmissionModel& emission,
                                                const CavityPreset& cavity, double eta_d,
                                                double snr_per_photon_value) {
  if (!(n_excitations >= 0.0)) {
    throw std::invalid_argument("budget_before_randomization: n_excitations must be >= 0");
  }
  if (!(eta_d >= 0.0 && eta_d <= 1.0)) {
    throw std::invalid_argument("budget_before_randomization: eta_d must lie in [0, 1]");
  }
  PhotonBudget b;
  b.detected_photons = n_excitations * emission.radiative_branching * emission.signal_fraction *
                       cavity.beta * cavity.extra_collection * eta_d;
  b.power_snr = b.detected_photons * snr_per_photon_value;
  return b;
}

/// Expected background flips over a run of n cycles.
inline double background_flips(const FlipModel& model, double n_cycles, double cycle_time) {
  return model.background_rate * n_cycles * cycle_time;
}

}  // namespace spinread
