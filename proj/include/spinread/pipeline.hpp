#pragma once

// End-to-end analytic evaluation of the readout protocol from Settings, and
// the table of headline quantities with their reference values.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spinread/config.hpp"
#include "spinread/constants.hpp"
#include "spinread/emission_budget.hpp"
#include "spinread/interferometer.hpp"
#include "spinread/physics_model.hpp"
#include "spinread/protocol_mc.hpp"
#include "spinread/spin_dynamics.hpp"

namespace spinread {

struct AnalyticResult {
  LevelDiagram levels;
  double contact_hyperfine = 0.0;  // Hz, from psi0_sq
  double line_splitting = 0.0;     // Hz, used downstream
  CavityPreset cavity;
  EmissionModel emission;
  double emitted_flux = 0.0;    // photons/s on lines a/b
  double coupled_flux = 0.0;    // x beta
  double collected_flux = 0.0;  // x extra_collection
  double detected_flux = 0.0;   // x eta_d
  double delta_omega = 0.0;     // rad/s
  double gamma = 0.0;           // rad/s
  double snr_per_photon = 0.0;  // at the configured delay
  DelayOptimum optimum;
  double integration_time = 0.0;        // s, at the configured delay, detected flux
  double flip_leading = 0.0;            // (splitting / electron Zeeman)^2
  FlipModel flip;                       // what the trajectory engine uses
  RandomizationBudget budget;           // from flip.p_flip_per_cycle
  PhotonBudget photons;                 // over budget.linear cycles
  double neutralization_density = 0.0;  // m^-3
  double background_flips_in_budget = 0.0;
};

inline AnalyticResult evaluate(const Settings& s) {
  AnalyticResult r;
  const MagneticEnvironment env = s.environment();
  s.donor.validate();
  s.interferometer.validate();

  r.levels = make_level_diagram(s.donor, env, s.hole_occupation, s.hole_spacing.value_or(-1.0));
  r.contact_hyperfine = r.levels.hyperfine_splitting;
  r.line_splitting = s.hyperfine_splitting.value_or(r.contact_hyperfine);

  r.cavity = s.active_cavity();
  r.emission = build_emission_model(s.donor, r.levels.lowest_occupation, r.cavity, s.recapture_time);
  r.emitted_flux = emitted_signal_flux(r.emission);
  r.coupled_flux = coupled_flux(r.emission, r.cavity);
  r.collected_flux = collected_flux(r.emission, r.cavity);
  r.detected_flux = detected_flux(r.collected_flux, s.interferometer.detector_efficiency);

  r.delta_omega = constants::two_pi * r.line_splitting;
  r.gamma = constants::two_pi * s.donor.linewidth_fwhm;
  r.snr_per_photon = snr_per_photon(r.delta_omega, r.gamma, s.interferometer.delay);
  if (r.delta_omega > 0.0) r.optimum = optimal_delay(r.delta_omega, r.gamma);
  if (r.snr_per_photon > 0.0 && r.detected_flux > 0.0) {
    r.integration_time = integration_time(s.target_snr, r.snr_per_photon, r.detected_flux);
  } else {
    r.integration_time = std::numeric_limits<double>::infinity();
  }

  FlipInputs in;
  in.hyperfine = r.line_splitting;
  in.electron_zeeman = r.levels.electron_zeeman;
  in.nuclear_zeeman = nuclear_zeeman_frequency(env, s.donor.gamma_n);
  in.be_hyperfine = s.donor.be_hyperfine;
  in.radiative_branching = r.emission.radiative_branching;
  r.flip_leading = flip_probability_per_cycle(r.line_splitting, r.levels.electron_zeeman);
  r.flip.p_flip_per_cycle = s.flip_probability.value_or(composed_flip_probability(in, s.flip_channels));
  r.flip.background_rate = s.cross_relaxation_time ? 1.0 / *s.cross_relaxation_time : 0.0;
  r.flip.randomization_threshold = s.randomization_threshold;
  r.flip.validate();
  r.budget = excitations_to_randomization(r.flip);
  if (!r.budget.unbounded) {
    r.photons = budget_before_randomization(static_cast<double>(r.budget.linear), r.emission,
                                            r.cavity, s.interferometer.detector_efficiency,
                                            r.snr_per_photon);
    r.background_flips_in_budget =
        background_flips(r.flip, static_cast<double>(r.budget.linear), r.emission.cycle_time);
  }
  r.neutralization_density = neutralization_electron_density(s.donor, env, s.neutralization_time);
  return r;
}

inline SimulationConfig make_simulation_config(const Settings& s) {
  const AnalyticResult r = evaluate(s);
  SimulationConfig cfg;
  cfg.env = s.environment();
  cfg.donor = s.donor;
  cfg.cavity = r.cavity;
  cfg.interferometer = s.interferometer;
  cfg.flip = r.flip;
  cfg.initial_nuclear_state = s.initial_state;
  cfg.duration = s.duration;
  cfg.seed = s.seed;
  cfg.trials = s.trials;
  cfg.occupation = r.levels.lowest_occupation;
  cfg.recapture_time = s.recapture_time;
  cfg.hyperfine = r.line_splitting;
  cfg.threads = s.threads;
  return cfg;
}

struct ReferenceRow {
  std::string quantity;
  std::string unit;
  double computed = 0.0;
  double reference = 0.0;
  double lower = 0.0;  // accepted band, inclusive
  double upper = 0.0;

  bool pass() const { return computed >= lower && computed <= upper; }
  double relative_deviation() const {
    return reference != 0.0 ? (computed - reference) / reference : computed;
  }
};

namespace detail {
inline ReferenceRow rel_row(std::string q, std::string unit, double computed, double reference,
                        double center, double rel) {
  return {std::move(q), std::move(unit), computed, reference, center * (1.0 - rel), center * (1.0 + rel)};
}
inline ReferenceRow band_row(std::string q, std::string unit, double computed, double reference, double lo,
                         double hi) {
  return {std::move(q), std::move(unit), computed, reference, lo, hi};
}
}  // namespace detail

/// Headline quantities recomputed from the settings, each with its
/// reference value and accepted band. The cycle budget row starts from the
/// rounded 5e-8 flip probability, as the reference budget does, so that the
/// photon and SNR rows downstream of it check one step each.
inline std::vector<ReferenceRow> reference_table(const Settings& s) {
  using detail::band_row;
  using detail::rel_row;
  const AnalyticResult r = evaluate(s);
  const double eta = s.interferometer.detector_efficiency;
  std::vector<ReferenceRow> rows;

  rows.push_back(rel_row("hyperfine_splitting", "MHz", r.contact_hyperfine / 1e6, 60.0, 60.0, 0.03));
  rows.push_back(rel_row("electron_zeeman", "GHz", r.levels.electron_zeeman / 1e9, 280.0, 280.0, 0.02));
  rows.push_back(rel_row("electron_zeeman_energy", "meV",
                         frequency_to_millielectronvolt(r.levels.electron_zeeman), 1.2, 1.16, 0.02));
  rows.push_back(rel_row("lowest_hole_occupation", "1", r.levels.lowest_occupation, 0.8,
                         s.hole_occupation, 1e-9));

  auto flux_for = [&](const std::string& name) {
    const CavityPreset& c = s.presets.at(name);
    return build_emission_model(s.donor, r.levels.lowest_occupation, c, s.recapture_time);
  };
  const EmissionModel bare = flux_for("bare");
  const EmissionModel dbr = flux_for("dbr");
  const EmissionModel phc = flux_for("phc");
  const CavityPreset& dbr_cav = s.presets.at("dbr");
  const CavityPreset& phc_cav = s.presets.at("phc");
  rows.push_back(rel_row("emitted_flux_bare", "1/s", emitted_signal_flux(bare), 400.0, 400.0, 0.10));
  rows.push_back(rel_row("collected_flux_dbr", "1/s", collected_flux(dbr, dbr_cav), 100.0, 100.0, 0.10));
  rows.push_back(rel_row("coupled_flux_phc", "1/s", coupled_flux(phc, phc_cav), 4e4, 4e4, 0.10));

  const double snr_at_delay = r.snr_per_photon;
  rows.push_back(band_row("snr_per_photon", "1", snr_at_delay, 0.084, 0.083, 0.085));
  const DelayOptimum opt = optimal_delay(r.delta_omega, r.gamma);
  rows.push_back(band_row("optimal_delay", "ns", opt.tau * 1e9, 2.0, 1.9, 2.3));
  rows.push_back(band_row("optimal_snr_per_photon", "1", opt.snr, 0.084, 0.084, 0.085));

  // 100 photons/s collected, detector efficiency not applied (as stated).
  rows.push_back(band_row("integration_time_dbr", "s",
                          integration_time(s.target_snr, snr_at_delay, 100.0), 0.1, 0.10, 0.13));
  rows.push_back(band_row("integration_time_phc", "s",
                          integration_time(s.target_snr, snr_at_delay, collected_flux(phc, phc_cav)),
                          1e-3, 4e-4, 1.2e-3));

  rows.push_back(band_row("flip_probability_per_cycle", "1", r.flip_leading, 5e-8, 4.3e-8, 5.2e-8));
  rows.push_back(rel_row("be_flip_suppression", "1",
                         be_flip_suppression(s.donor.be_hyperfine, r.line_splitting), 1e-3,
                         1.1e-3, 0.10));

  FlipModel rounded;
  rounded.p_flip_per_cycle = 5e-8;
  rounded.randomization_threshold = s.randomization_threshold;
  const RandomizationBudget rounded_budget = excitations_to_randomization(rounded);
  const double n_cycles = static_cast<double>(rounded_budget.linear);
  rows.push_back(band_row("excitations_to_randomization", "cycles", n_cycles, 2e6, 2e6, 2e6));

  const PhotonBudget dbr_budget =
      budget_before_randomization(n_cycles, dbr, dbr_cav, eta, snr_at_delay);
  const PhotonBudget phc_budget =
      budget_before_randomization(n_cycles, phc, phc_cav, eta, snr_at_delay);
  rows.push_back(band_row("detected_photons_dbr", "photons", dbr_budget.detected_photons, 25.0, 22.0, 28.0));
  rows.push_back(rel_row("detected_photons_phc", "photons", phc_budget.detected_photons, 5e3, 4.8e3, 0.10));
  rows.push_back(band_row("budget_snr_dbr", "1", dbr_budget.power_snr, 2.0, 1.9, 2.3));
  rows.push_back(rel_row("budget_snr_phc", "1", phc_budget.power_snr, 400.0, 400.0, 0.10));

  rows.push_back(band_row("neutralization_density", "cm^-3", r.neutralization_density * 1e-6, 1e13,
                          1e13 / 1.5, 1e13 * 1.5));

  // Consistency checks; "reference" carries the bound.
  rows.push_back(band_row("background_flips_in_budget", "1",
                          background_flips(r.flip, n_cycles, dbr.cycle_time), 0.02, 0.0,
                          0.5 * s.randomization_threshold));
  rows.push_back(band_row("radiative_branching_bare", "1", bare.radiative_branching, 1.0 / 7000.0,
                          0.0, 1.0 / 5000.0));
  rows.push_back(band_row("hyperfine_to_zeeman_ratio", "1", r.levels.perturbation_ratio(), 2.1e-4,
                          0.0, 1e-2));
  return rows;
}

}  // namespace spinread
