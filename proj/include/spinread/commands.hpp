#pragma once

// Table-producing commands behind the command-line tool. Each command has a
// fixed schema; see README.md for column descriptions.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinread/config.hpp"
#include "spinread/pipeline.hpp"
#include "spinread/protocol_mc.hpp"
#include "spinread/table.hpp"

namespace spinread {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace schemas {

inline Schema paper_table() {
  using T = ColumnType;
  return {"spinread.paper-table",
          1,
          {{"quantity", T::kText},
           {"unit", T::kText},
           {"computed", T::kReal},
           {"reference", T::kReal},
           {"lower", T::kReal},
           {"upper", T::kReal},
           {"relative_deviation", T::kReal},
           {"pass", T::kBool}}};
}

inline Schema snr_scan() {
  using T = ColumnType;
  return {"spinread.snr-scan", 1, {{"kind", T::kText}, {"tau_s", T::kReal}, {"snr_per_photon", T::kReal}}};
}

inline Schema simulate() {
  using T = ColumnType;
  return {"spinread.simulate",
          1,
          {{"trial", T::kInteger},
           {"initial_state", T::kText},
           {"final_state", T::kText},
           {"cycles", T::kInteger},
           {"emitted_signal", T::kInteger},
           {"detected_signal", T::kInteger},
           {"detected_dark", T::kInteger},
           {"port_e", T::kInteger},
           {"port_f", T::kInteger},
           {"integrated_current", T::kInteger},
           {"flips", T::kInteger},
           {"decided_state", T::kText},
           {"correct", T::kBool},
           {"confidence", T::kReal}}};
}

inline Schema fidelity() {
  using T = ColumnType;
  return {"spinread.fidelity",
          1,
          {{"time_s", T::kReal},
           {"fidelity", T::kReal},
           {"ci_low", T::kReal},
           {"ci_high", T::kReal},
           {"mean_detected", T::kReal},
           {"flip_fraction", T::kReal},
           {"trials", T::kInteger}}};
}

inline Schema sweep() {
  using T = ColumnType;
  return {"spinread.sweep",
          1,
          {{"axis", T::kText},
           {"value", T::kText},
           {"hyperfine_hz", T::kReal},
           {"electron_zeeman_hz", T::kReal},
           {"occupation", T::kReal},
           {"collected_flux", T::kReal},
           {"detected_flux", T::kReal},
           {"snr_per_photon", T::kReal},
           {"integration_time_s", T::kReal},
           {"optimal_delay_s", T::kReal},
           {"optimal_snr", T::kReal},
           {"flip_probability", T::kReal},
           {"cycles_to_randomization", T::kReal},
           {"budget_photons", T::kReal},
           {"budget_snr", T::kReal}}};
}

}  // namespace schemas

inline Table cmd_paper_table(const Settings& s) {
  Table t{schemas::paper_table(), {}};
  for (const auto& row : reference_table(s)) {
    t.add_row({row.quantity, row.unit, row.computed, row.reference, row.lower, row.upper,
               row.relative_deviation(), row.pass()});
  }
  return t;
}

/// True when every row of the reference table lies inside its band.
inline bool reference_table_passes(const Table& t) {
  const std::size_t col = t.column_index("pass");
  return std::all_of(t.rows.begin(), t.rows.end(),
                     [col](const auto& row) { return std::get<bool>(row[col]); });
}

/// SNR per photon on a uniform delay grid, followed by the optimum.
inline Table cmd_snr_scan(const Settings& s, double tau_min, double tau_max, std::size_t steps) {
  if (!(tau_min > 0.0) || !(tau_max >= tau_min) || steps < 1) {
    throw UsageError("snr-scan needs 0 < tau_min <= tau_max and at least one step");
  }
  const AnalyticResult r = evaluate(s);
  Table t{schemas::snr_scan(), {}};
  for (std::size_t i = 0; i < steps; ++i) {
    const double tau =
        steps == 1 ? tau_min : tau_min + (tau_max - tau_min) * static_cast<double>(i) /
                                             static_cast<double>(steps - 1);
    t.add_row({std::string("scan"), tau, snr_per_photon(r.delta_omega, r.gamma, tau)});
  }
  t.add_row({std::string("optimum"), r.optimum.tau, r.optimum.snr});
  return t;
}

inline Table cmd_simulate(const Settings& s) {
  const SimulationConfig cfg = make_simulation_config(s);
  const PreparedSimulation sim = prepare(cfg);
  std::vector<std::vector<Cell>> rows(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t i) {
    const Trajectory traj = simulate_trajectory(sim, i);
    const ReadoutEstimate est = estimate_state(traj, sim);
    std::int64_t e = 0;
    std::int64_t f = 0;
    for (const auto& ev : traj.events) (ev.port == Port::kE ? e : f) += 1;
    const auto signal = static_cast<std::int64_t>(traj.detected_signal());
    rows[i] = {static_cast<std::int64_t>(i),
               std::string(to_string(traj.initial_state)),
               std::string(to_string(traj.final_state())),
               static_cast<std::int64_t>(traj.cycles),
               static_cast<std::int64_t>(traj.emitted_signal),
               signal,
               static_cast<std::int64_t>(traj.events.size()) - signal,
               e,
               f,
               static_cast<std::int64_t>(est.integrated_current),
               static_cast<std::int64_t>(traj.flips.size()),
               std::string(to_string(est.decided_state)),
               est.decided_state == traj.initial_state,
               est.confidence};
  });
  Table t{schemas::simulate(), {}};
  for (auto& row : rows) t.add_row(std::move(row));
  return t;
}

inline Table cmd_fidelity(const Settings& s, const std::vector<double>& times) {
  if (times.empty()) throw UsageError("fidelity needs at least one time");
  const SimulationConfig cfg = make_simulation_config(s);
  Table t{schemas::fidelity(), {}};
  for (const auto& p : fidelity_curve(cfg, times)) {
    t.add_row({p.time, p.fidelity, p.interval.low, p.interval.high, p.mean_detected,
               p.flip_fraction, static_cast<std::int64_t>(p.trials)});
  }
  return t;
}

/// Re-evaluates the analytic pipeline with `axis` set to each value in turn.
inline Table cmd_sweep(const Settings& base, const std::string& axis,
                       const std::vector<std::string>& values) {
  const auto keys = sweepable_keys();
  if (std::find(keys.begin(), keys.end(), axis) == keys.end()) {
    std::string list;
    for (const auto& k : keys) list += (list.empty() ? "" : ", ") + k;
    throw UsageError("'" + axis + "' is not sweepable; sweepable keys: " + list);
  }
  if (values.empty()) throw UsageError("sweep needs at least one value");
  Table t{schemas::sweep(), {}};
  for (const auto& v : values) {
    Settings s = base;
    apply_setting(s, axis, v);
    const AnalyticResult r = evaluate(s);
    const double cycles = r.budget.unbounded ? std::numeric_limits<double>::infinity()
                                             : static_cast<double>(r.budget.linear);
    t.add_row({axis, v, r.line_splitting, r.levels.electron_zeeman, r.levels.lowest_occupation,
               r.collected_flux, r.detected_flux, r.snr_per_photon, r.integration_time,
               r.optimum.tau, r.optimum.snr, r.flip_leading, cycles, r.photons.detected_photons,
               r.photons.power_snr});
  }
  return t;
}

}  // namespace spinread
