#pragma once

// Seeded trajectory engine for the optical readout protocol.
//
// Time advances in whole excitation cycles of fixed length. In every cycle
//   1. the nucleus flips with probability p_flip (capture flip-flops plus
//      background relaxation over the cycle);
//   2. the bound exciton, thermalized instantly over its four hole levels,
//      emits a photon on the line of the current nuclear state with
//      probability radiative_branching * occupation;
//   3. that photon survives extraction and detection with probability
//      beta * extra_collection * eta_d;
//   4. a surviving photon gets a Lorentzian detuning and is routed to port e
//      or f by the interferometer.
// Poisson dark counts are superimposed, each port with probability 1/2.
//
// Flips and emissions are independent Bernoulli processes over cycles, so
// each is generated by geometric skipping to its next success instead of
// visiting every cycle. The result has the same law as the per-cycle loop.
// Flip, emission and dark-count draws use separate derived streams: runs
// that differ only in the flip rate share every photon draw, and a prefix
// of a long trajectory is bit-identical to a shorter run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "spinread/emission_budget.hpp"
#include "spinread/interferometer.hpp"
#include "spinread/physics_model.hpp"
#include "spinread/random.hpp"
#include "spinread/spin_dynamics.hpp"
#include "spinread/statistics.hpp"

namespace spinread {

enum class NuclearState { kUp, kDown };
enum class InitialState { kUp, kDown, kRandom };

constexpr NuclearState opposite(NuclearState s) {
  return s == NuclearState::kUp ? NuclearState::kDown : NuclearState::kUp;
}

constexpr std::string_view to_string(NuclearState s) {
  return s == NuclearState::kUp ? "up" : "down";
}

constexpr std::string_view to_string(InitialState s) {
  switch (s) {
    case InitialState::kUp: return "up";
    case InitialState::kDown: return "down";
    case InitialState::kRandom: return "random";
  }
  return "?";
}

inline constexpr std::uint64_t kDefaultSeed = 20031107ULL;

struct SimulationConfig {
  MagneticEnvironment env{10.0, 4.0};
  DonorParameters donor;
  CavityPreset cavity = presets::dbr();
  InterferometerConfig interferometer{2e-9, 1, 0.4, 0.0};
  FlipModel flip;
  InitialState initial_nuclear_state = InitialState::kUp;
  double duration = 0.6;           // s
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t trials = 1000;

  double occupation = 0.8;         // lowest hole-level occupation (signal fraction)
  double recapture_time = 1e-9;    // s
  double hyperfine = -1.0;         // Hz; negative means "from the contact formula"
  unsigned threads = 0;            // 0: hardware concurrency
};

/// Default engine configuration: 10 T, 4 K, DBR cavity, TES detector with
/// eta_d = 0.4, tau = 2 ns, the ESR-measured 60 MHz splitting and the composed
/// per-cycle flip probability.
inline SimulationConfig default_simulation() {
  SimulationConfig cfg;
  cfg.hyperfine = 60e6;
  const double hf = cfg.hyperfine;
  const EmissionModel em =
      build_emission_model(cfg.donor, cfg.occupation, cfg.cavity, cfg.recapture_time);
  FlipInputs in;
  in.hyperfine = hf;
  in.electron_zeeman = electron_zeeman_frequency(cfg.env, cfg.donor.g0);
  in.nuclear_zeeman = nuclear_zeeman_frequency(cfg.env, cfg.donor.gamma_n);
  in.be_hyperfine = cfg.donor.be_hyperfine;
  in.radiative_branching = em.radiative_branching;
  cfg.flip.p_flip_per_cycle = composed_flip_probability(in, FlipChannels{});
  cfg.flip.background_rate = 1.0 / 30.0;
  return cfg;
}

/// Validated configuration plus every derived per-cycle quantity.
struct PreparedSimulation {
  SimulationConfig cfg;
  EmissionModel emission;
  SpectralLine line_up;    // line a, positive detuning
  SpectralLine line_down;  // line b, negative detuning
  double p_flip = 0.0;     // per cycle, including background
  double p_signal = 0.0;   // per cycle, photon on the current line
  double p_detect = 0.0;   // per emitted signal photon
  std::uint64_t cycles = 0;

  const SpectralLine& line(NuclearState s) const {
    return s == NuclearState::kUp ? line_up : line_down;
  }

  /// Expected detected signal rate (counts/s).
  double signal_detection_rate() const { return p_signal * p_detect / emission.cycle_time; }
};

inline PreparedSimulation prepare(const SimulationConfig& cfg) {
  if (!(cfg.duration > 0.0) || !std::isfinite(cfg.duration)) {
    throw std::invalid_argument("SimulationConfig: duration must be > 0");
  }
  if (cfg.trials < 1) throw std::invalid_argument("SimulationConfig: trials must be >= 1");
  cfg.donor.validate();
  cfg.cavity.validate();
  cfg.interferometer.validate();
  cfg.flip.validate();

  PreparedSimulation p;
  p.cfg = cfg;
  p.emission = build_emission_model(cfg.donor, cfg.occupation, cfg.cavity, cfg.recapture_time);
  p.emission.validate();
  const double hf = cfg.hyperfine >= 0.0 ? cfg.hyperfine : hyperfine_splitting(cfg.donor);
  const auto [up, down] = transition_frequencies(hf);
  const double fwhm = constants::two_pi * cfg.donor.linewidth_fwhm;
  p.line_up = {up, fwhm};
  p.line_down = {down, fwhm};
  p.p_flip = cfg.flip.total_per_cycle(p.emission.cycle_time);
  p.p_signal = p.emission.signal_probability_per_cycle();
  p.p_detect = cfg.cavity.beta * cfg.cavity.extra_collection * cfg.interferometer.detector_efficiency;
  if (!(p.p_signal <= 1.0 && p.p_detect <= 1.0 && p.p_flip <= 1.0)) {
    throw std::invalid_argument("SimulationConfig: derived per-cycle probability exceeds 1");
  }
  const double n = std::floor(cfg.duration / p.emission.cycle_time);
  if (n > 9.0e15) throw std::invalid_argument("SimulationConfig: duration spans too many cycles");
  p.cycles = static_cast<std::uint64_t>(n);
  return p;
}

enum class Origin { kSignal, kDark };

struct DetectionEvent {
  double time = 0.0;  // s
  Port port = Port::kE;
  Origin origin = Origin::kSignal;
};

struct StateSegment {
  double start = 0.0;  // s
  NuclearState state = NuclearState::kUp;
};

struct Trajectory {
  std::uint64_t trial_index = 0;
  NuclearState initial_state = NuclearState::kUp;
  std::vector<DetectionEvent> events;    // time-ordered
  std::vector<double> flips;             // flip times, s
  std::vector<StateSegment> true_state_timeline;
  std::uint64_t cycles = 0;
  std::uint64_t emitted_signal = 0;      // photons emitted on lines a/b
  double duration = 0.0;                 // s

  std::uint64_t detected_signal() const {
    return static_cast<std::uint64_t>(std::count_if(events.begin(), events.end(), [](const auto& e) {
      return e.origin == Origin::kSignal;
    }));
  }
  NuclearState final_state() const { return true_state_timeline.back().state; }
};

namespace detail {

inline NuclearState draw_initial_state(const SimulationConfig& cfg, std::uint64_t trial) {
  switch (cfg.initial_nuclear_state) {
    case InitialState::kUp: return NuclearState::kUp;
    case InitialState::kDown: return NuclearState::kDown;
    case InitialState::kRandom: {
      RandomStream rng(cfg.seed, trial, StreamPurpose::kInitialState);
      return rng.bernoulli(0.5) ? NuclearState::kUp : NuclearState::kDown;
    }
  }
  return NuclearState::kUp;
}

// Index of the next success at or after `from`, or `limit` if none before it.
inline std::uint64_t next_success(RandomStream& rng, double p, std::uint64_t from,
                                  std::uint64_t limit) {
  if (from >= limit) return limit;
  const std::uint64_t skip = rng.geometric_failures(p);
  if (skip >= limit - from) return limit;
  return from + skip;
}

}  // namespace detail

/// Runs one trajectory with an explicit initial state.
inline Trajectory simulate_trajectory(const PreparedSimulation& sim, std::uint64_t trial_index,
                                      NuclearState initial) {
  const SimulationConfig& cfg = sim.cfg;
  const double cycle_time = sim.emission.cycle_time;
  const std::uint64_t n = sim.cycles;

  Trajectory traj;
  traj.trial_index = trial_index;
  traj.initial_state = initial;
  traj.cycles = n;
  traj.duration = cfg.duration;
  traj.true_state_timeline.push_back({0.0, initial});

  RandomStream flip_rng(cfg.seed, trial_index, StreamPurpose::kFlips);
  RandomStream emit_rng(cfg.seed, trial_index, StreamPurpose::kEmission);

  NuclearState state = initial;
  std::uint64_t next_flip = detail::next_success(flip_rng, sim.p_flip, 0, n);
  std::uint64_t next_emit = detail::next_success(emit_rng, sim.p_signal, 0, n);

  while (next_emit < n) {
    // Flips in cycles up to and including the emitting cycle act first.
    while (next_flip <= next_emit) {
      state = opposite(state);
      const double t = static_cast<double>(next_flip) * cycle_time;
      traj.flips.push_back(t);
      traj.true_state_timeline.push_back({t, state});
      next_flip = detail::next_success(flip_rng, sim.p_flip, next_flip + 1, n);
    }
    ++traj.emitted_signal;
    // The number of draws below depends only on the detection outcome, never
    // on the nuclear state.
    if (emit_rng.uniform() < sim.p_detect) {
      const double detuning = sample_photon_detuning(sim.line(state), emit_rng);
      const Port port = sample_port(detuning, cfg.interferometer, emit_rng);
      traj.events.push_back({static_cast<double>(next_emit + 1) * cycle_time, port, Origin::kSignal});
    }
    next_emit = detail::next_success(emit_rng, sim.p_signal, next_emit + 1, n);
  }
  while (next_flip < n) {
    state = opposite(state);
    const double t = static_cast<double>(next_flip) * cycle_time;
    traj.flips.push_back(t);
    traj.true_state_timeline.push_back({t, state});
    next_flip = detail::next_success(flip_rng, sim.p_flip, next_flip + 1, n);
  }

  const double dark_rate = cfg.interferometer.dark_rate;
  if (dark_rate > 0.0) {
    RandomStream dark_rng(cfg.seed, trial_index, StreamPurpose::kDarkCounts);
    std::vector<DetectionEvent> darks;
    for (double t = dark_rng.exponential(dark_rate); t < cfg.duration;
         t += dark_rng.exponential(dark_rate)) {
      darks.push_back({t, dark_rng.bernoulli(0.5) ? Port::kE : Port::kF, Origin::kDark});
    }
    std::vector<DetectionEvent> merged;
    merged.reserve(traj.events.size() + darks.size());
    std::merge(traj.events.begin(), traj.events.end(), darks.begin(), darks.end(),
               std::back_inserter(merged),
               [](const DetectionEvent& a, const DetectionEvent& b) { return a.time < b.time; });
    traj.events = std::move(merged);
  }
  return traj;
}

inline Trajectory simulate_trajectory(const PreparedSimulation& sim, std::uint64_t trial_index) {
  return simulate_trajectory(sim, trial_index, detail::draw_initial_state(sim.cfg, trial_index));
}

inline Trajectory simulate_trajectory(const SimulationConfig& cfg, std::uint64_t trial_index) {
  return simulate_trajectory(prepare(cfg), trial_index);
}

/// Keeps only the first n detection events.
inline Trajectory first_detections(const Trajectory& traj, std::size_t n) {
  Trajectory out = traj;
  if (out.events.size() > n) out.events.resize(n);
  return out;
}

struct ReadoutEstimate {
  NuclearState decided_state = NuclearState::kUp;
  long long integrated_current = 0;  // #e - #f
  std::uint64_t n_detected = 0;
  double confidence = 0.5;
  bool tie_broken_by_coin = false;
};

/// Sign detector on the integrated current. The state whose line has the
/// matching mean-current sign is chosen; zero current falls back to a coin
/// drawn from the trial's decision stream. Confidence is the posterior of
/// the chosen state under two equal-variance Gaussians with per-detection
/// mean +/-m and variance 1 - m^2, where m is the mean current of a line
/// diluted by the expected dark-count fraction.
inline ReadoutEstimate estimate_state(const Trajectory& traj, const PreparedSimulation& sim) {
  ReadoutEstimate est;
  est.n_detected = traj.events.size();
  for (const auto& e : traj.events) est.integrated_current += port_value(e.port);

  const double up_mean = mean_current(sim.line_up, sim.cfg.interferometer);
  const int up_sign = up_mean > 0.0 ? 1 : (up_mean < 0.0 ? -1 : 0);
  const long long vote = static_cast<long long>(up_sign) * est.integrated_current;

  if (vote == 0) {
    RandomStream coin(sim.cfg.seed, traj.trial_index, StreamPurpose::kDecision);
    est.decided_state = coin.bernoulli(0.5) ? NuclearState::kUp : NuclearState::kDown;
    est.tie_broken_by_coin = true;
    est.confidence = 0.5;
    return est;
  }
  est.decided_state = vote > 0 ? NuclearState::kUp : NuclearState::kDown;

  const double signal_rate = sim.signal_detection_rate();
  const double dark_rate = sim.cfg.interferometer.dark_rate;
  const double purity = signal_rate + dark_rate > 0.0 ? signal_rate / (signal_rate + dark_rate) : 0.0;
  const double m = std::abs(up_mean) * purity;
  const double v = 1.0 - m * m;
  if (v <= 0.0) {
    est.confidence = 1.0;
  } else {
    const double llr = 2.0 * m * std::abs(static_cast<double>(est.integrated_current)) / v;
    est.confidence = 1.0 / (1.0 + std::exp(-llr));
  }
  return est;
}

inline ReadoutEstimate estimate_state(const Trajectory& traj, const SimulationConfig& cfg) {
  return estimate_state(traj, prepare(cfg));
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers store results by index.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t i = w; i < count; i += workers) fn(i);
    });
  }
}

struct FidelityPoint {
  double time = 0.0;
  double fidelity = 0.0;
  Interval interval;           // Wilson score interval
  double mean_detected = 0.0;
  double flip_fraction = 0.0;  // trials with at least one flip by `time`
  std::uint64_t trials = 0;
};

/// Readout fidelity versus integration time. Trial i starts in state up
/// for even i and down for odd i. Trial streams do not depend on the
/// duration, so the run for a shorter time is an exact prefix of the run
/// for a longer one.
inline std::vector<FidelityPoint> fidelity_curve(const SimulationConfig& cfg,
                                                 const std::vector<double>& time_grid,
                                                 double z = 2.576) {
  std::vector<FidelityPoint> curve;
  for (double t : time_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("fidelity_curve: times must be >= 0");
  }
  for (double t : time_grid) {
    SimulationConfig point_cfg = cfg;
    point_cfg.duration = std::max(t, std::numeric_limits<double>::min());
    const PreparedSimulation sim = prepare(point_cfg);

    std::vector<char> correct(cfg.trials);
    std::vector<char> flipped(cfg.trials);
    std::vector<std::uint64_t> detected(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::uint64_t i) {
      const NuclearState initial = i % 2 == 0 ? NuclearState::kUp : NuclearState::kDown;
      const Trajectory traj = simulate_trajectory(sim, i, initial);
      const ReadoutEstimate est = estimate_state(traj, sim);
      correct[i] = est.decided_state == initial;
      flipped[i] = !traj.flips.empty();
      detected[i] = est.n_detected;
    });

    FidelityPoint pt;
    pt.time = t;
    pt.trials = cfg.trials;
    const auto n_correct = static_cast<std::uint64_t>(std::count(correct.begin(), correct.end(), 1));
    const auto n_flipped = static_cast<std::uint64_t>(std::count(flipped.begin(), flipped.end(), 1));
    double total_detected = 0.0;
    for (auto d : detected) total_detected += static_cast<double>(d);
    const double trials = static_cast<double>(cfg.trials);
    pt.fidelity = static_cast<double>(n_correct) / trials;
    pt.interval = wilson_interval(n_correct, cfg.trials, z);
    pt.mean_detected = total_detected / trials;
    pt.flip_fraction = static_cast<double>(n_flipped) / trials;
    curve.push_back(pt);
  }
  return curve;
}

struct MomentReport {
  std::uint64_t n = 0;
  double mean_empirical = 0.0;
  double mean_analytic = 0.0;
  double mean_stderr = 0.0;
  double variance_empirical = 0.0;
  double variance_analytic = 0.0;
  double variance_stderr = 0.0;
  double z_limit = 5.0;

  double mean_z() const { return z_score(mean_empirical, mean_analytic, mean_stderr); }
  double variance_z() const {
    return z_score(variance_empirical, variance_analytic, variance_stderr);
  }
  bool pass() const { return mean_z() <= z_limit && variance_z() <= z_limit; }

 private:
  static double z_score(double emp, double ana, double se) {
    const double d = std::abs(emp - ana);
    if (se > 0.0) return d / se;
    return d <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  }
};

/// Samples n photons from the line, routes each through the interferometer
/// and compares the mean and variance of the +/-1 port variable with the
/// analytic expressions. Standard errors use the exact law of a +/-1
/// variable with the analytic mean.
inline MomentReport mc_moment_validation(const SpectralLine& line, const InterferometerConfig& cfg,
                                         std::uint64_t n, std::uint64_t seed) {
  if (n < 10000) throw std::invalid_argument("mc_moment_validation: n must be >= 1e4");
  line.validate();
  cfg.validate();
  RandomStream rng(seed, 0, StreamPurpose::kPhotonSampling);
  RunningMoments moments;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double detuning = sample_photon_detuning(line, rng);
    moments.add(static_cast<double>(port_value(sample_port(detuning, cfg, rng))));
  }
  MomentReport r;
  r.n = n;
  r.mean_empirical = moments.mean();
  r.variance_empirical = moments.variance();
  r.mean_analytic = mean_current(line, cfg);
  r.variance_analytic = current_variance(line, cfg);

  const double mu = r.mean_analytic;
  const double p = 0.5 * (1.0 + mu);
  const double var = r.variance_analytic;
  const double mu4 = p * std::pow(1.0 - mu, 4) + (1.0 - p) * std::pow(1.0 + mu, 4);
  const double nn = static_cast<double>(n);
  r.mean_stderr = std::sqrt(var / nn);
  r.variance_stderr =
      std::sqrt(std::max(0.0, mu4 / nn - var * var * (nn - 3.0) / (nn * (nn - 1.0))));
  return r;
}

}  // namespace spinread
