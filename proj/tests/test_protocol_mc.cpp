#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "spinread/protocol_mc.hpp"

namespace spinread {
namespace {

SimulationConfig no_flip_config() {
  SimulationConfig cfg = default_simulation();
  cfg.flip.p_flip_per_cycle = 0.0;
  cfg.flip.background_rate = 0.0;
  return cfg;
}

// Bright configuration: PhC preset with a perfect detector, ~2e4 counts/s.
SimulationConfig bright_config() {
  SimulationConfig cfg = no_flip_config();
  cfg.cavity = presets::photonic_crystal();
  cfg.interferometer.detector_efficiency = 1.0;
  return cfg;
}

bool same_events(const std::vector<DetectionEvent>& a, const std::vector<DetectionEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].time != b[i].time || a[i].port != b[i].port || a[i].origin != b[i].origin) return false;
  }
  return true;
}

TEST(Random, DerivedSeedsAreDistinct) {
  EXPECT_NE(derive_seed(1, 0, StreamPurpose::kFlips), derive_seed(1, 0, StreamPurpose::kEmission));
  EXPECT_NE(derive_seed(1, 0, StreamPurpose::kFlips), derive_seed(1, 1, StreamPurpose::kFlips));
  EXPECT_NE(derive_seed(1, 0, StreamPurpose::kFlips), derive_seed(2, 0, StreamPurpose::kFlips));
  EXPECT_EQ(derive_seed(9, 4, StreamPurpose::kDecision), derive_seed(9, 4, StreamPurpose::kDecision));
}

TEST(Random, GeometricMeanMatches) {
  RandomStream rng(5);
  const double p = 0.01;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.geometric_failures(p));
  const double mean = (1.0 - p) / p;
  const double se = std::sqrt((1.0 - p) / (p * p) / n);
  EXPECT_NEAR(sum / n, mean, 5.0 * se);
  EXPECT_EQ(rng.geometric_failures(1.0), 0u);
  EXPECT_EQ(rng.geometric_failures(0.0), std::numeric_limits<std::uint64_t>::max());
}

TEST(Prepare, RejectsInvalidConfigs) {
  SimulationConfig cfg = default_simulation();
  cfg.duration = 0.0;
  EXPECT_THROW(prepare(cfg), std::invalid_argument);
  cfg = default_simulation();
  cfg.trials = 0;
  EXPECT_THROW(prepare(cfg), std::invalid_argument);
  cfg = default_simulation();
  cfg.flip.p_flip_per_cycle = 2.0;
  EXPECT_THROW(prepare(cfg), std::invalid_argument);
  cfg = default_simulation();
  cfg.interferometer.bias_parity = 0;
  EXPECT_THROW(prepare(cfg), std::invalid_argument);
}

TEST(Prepare, DerivedQuantities) {
  const PreparedSimulation sim = prepare(default_simulation());
  EXPECT_NEAR(sim.signal_detection_rate(), 42.5249, 1e-3);
  EXPECT_DOUBLE_EQ(sim.line_up.detuning, constants::pi * 60e6);
  EXPECT_DOUBLE_EQ(sim.line_down.detuning, -constants::pi * 60e6);
  EXPECT_EQ(sim.cycles, static_cast<std::uint64_t>(std::floor(0.6 / sim.emission.cycle_time)));
}

TEST(Trajectory, DeterministicReruns) {
  SimulationConfig cfg = default_simulation();
  cfg.interferometer.dark_rate = 5.0;
  const PreparedSimulation sim = prepare(cfg);
  for (std::uint64_t trial : {0u, 1u, 77u}) {
    const Trajectory a = simulate_trajectory(sim, trial);
    const Trajectory b = simulate_trajectory(sim, trial);
    EXPECT_TRUE(same_events(a.events, b.events));
    EXPECT_EQ(a.flips, b.flips);
    EXPECT_EQ(a.emitted_signal, b.emitted_signal);
    const ReadoutEstimate ea = estimate_state(a, sim);
    const ReadoutEstimate eb = estimate_state(b, sim);
    EXPECT_EQ(ea.decided_state, eb.decided_state);
    EXPECT_EQ(ea.confidence, eb.confidence);
  }
}

TEST(Trajectory, DifferentTrialsDiffer) {
  const PreparedSimulation sim = prepare(default_simulation());
  EXPECT_FALSE(same_events(simulate_trajectory(sim, 0).events, simulate_trajectory(sim, 1).events));
}

TEST(Trajectory, ShorterRunIsPrefixOfLongerRun) {
  SimulationConfig cfg = default_simulation();
  cfg.cavity = presets::photonic_crystal();
  cfg.flip.p_flip_per_cycle = 1e-5;
  cfg.interferometer.dark_rate = 100.0;
  SimulationConfig short_cfg = cfg;
  short_cfg.duration = 0.01;
  cfg.duration = 0.05;
  const PreparedSimulation long_sim = prepare(cfg);
  const PreparedSimulation short_sim = prepare(short_cfg);
  const double short_end = static_cast<double>(short_sim.cycles) * short_sim.emission.cycle_time;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const Trajectory a = simulate_trajectory(short_sim, trial, NuclearState::kUp);
    const Trajectory b = simulate_trajectory(long_sim, trial, NuclearState::kUp);
    std::vector<DetectionEvent> b_signal;
    std::vector<DetectionEvent> b_dark;
    std::vector<DetectionEvent> a_signal;
    std::vector<DetectionEvent> a_dark;
    for (const auto& e : b.events) {
      if (e.origin == Origin::kSignal && e.time <= short_end) b_signal.push_back(e);
      if (e.origin == Origin::kDark && e.time < short_cfg.duration) b_dark.push_back(e);
    }
    for (const auto& e : a.events) (e.origin == Origin::kSignal ? a_signal : a_dark).push_back(e);
    EXPECT_GT(a_signal.size(), 0u);
    EXPECT_TRUE(same_events(a_signal, b_signal));
    EXPECT_TRUE(same_events(a_dark, b_dark));
    std::vector<double> b_flips;
    for (double t : b.flips) {
      if (t < short_end) b_flips.push_back(t);
    }
    EXPECT_EQ(a.flips, b_flips);
  }
}

TEST(Trajectory, PhotonAccounting) {
  SimulationConfig cfg = default_simulation();
  cfg.interferometer.dark_rate = 20.0;
  const PreparedSimulation sim = prepare(cfg);
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const Trajectory t = simulate_trajectory(sim, trial);
    EXPECT_LE(t.detected_signal(), t.emitted_signal);
    EXPECT_LE(t.emitted_signal, t.cycles);
    for (std::size_t i = 1; i < t.events.size(); ++i) EXPECT_LE(t.events[i - 1].time, t.events[i].time);
    for (const auto& e : t.events) {
      EXPECT_GE(e.time, 0.0);
      EXPECT_LE(e.time, cfg.duration);
    }
    EXPECT_EQ(t.true_state_timeline.size(), t.flips.size() + 1);
  }
}

TEST(Trajectory, FlipsAlternateState) {
  SimulationConfig cfg = no_flip_config();
  cfg.flip.p_flip_per_cycle = 1e-5;
  const Trajectory t = simulate_trajectory(prepare(cfg), 3, NuclearState::kDown);
  ASSERT_GT(t.flips.size(), 2u);
  for (std::size_t i = 1; i < t.true_state_timeline.size(); ++i) {
    EXPECT_EQ(t.true_state_timeline[i].state, opposite(t.true_state_timeline[i - 1].state));
    EXPECT_GT(t.true_state_timeline[i].start, t.true_state_timeline[i - 1].start);
  }
  EXPECT_EQ(t.final_state(), t.flips.size() % 2 == 0 ? NuclearState::kDown : NuclearState::kUp);
}

TEST(Trajectory, EmissionDrawsDoNotDependOnFlipRate) {
  SimulationConfig a = no_flip_config();
  SimulationConfig b = no_flip_config();
  b.flip.p_flip_per_cycle = 1e-6;
  const Trajectory ta = simulate_trajectory(prepare(a), 8, NuclearState::kUp);
  const Trajectory tb = simulate_trajectory(prepare(b), 8, NuclearState::kUp);
  ASSERT_EQ(ta.events.size(), tb.events.size());
  for (std::size_t i = 0; i < ta.events.size(); ++i) EXPECT_EQ(ta.events[i].time, tb.events[i].time);
  EXPECT_EQ(ta.emitted_signal, tb.emitted_signal);
}

TEST(Trajectory, RandomInitialStateUsesBoth) {
  SimulationConfig cfg = no_flip_config();
  cfg.initial_nuclear_state = InitialState::kRandom;
  cfg.duration = 1e-3;
  const PreparedSimulation sim = prepare(cfg);
  int up = 0;
  for (std::uint64_t i = 0; i < 400; ++i) up += simulate_trajectory(sim, i).initial_state == NuclearState::kUp;
  EXPECT_GT(up, 140);
  EXPECT_LT(up, 260);
}

TEST(Trajectory, DetectedRateMatchesDetectedFlux) {
  SimulationConfig cfg = default_simulation();
  cfg.duration = 1.0;
  const PreparedSimulation sim = prepare(cfg);
  const int trials = 1000;
  double total = 0.0;
  for (int i = 0; i < trials; ++i) total += static_cast<double>(simulate_trajectory(sim, i).detected_signal());
  const double expected = sim.signal_detection_rate() * static_cast<double>(sim.cycles) * sim.emission.cycle_time;
  EXPECT_NEAR(expected, 42.52, 0.01);
  // Poisson counts: combined standard error sqrt(expected / trials).
  EXPECT_NEAR(total / trials, expected, 3.0 * std::sqrt(expected / trials));
}

TEST(Estimator, UnanimousPortEMeansDown) {
  const PreparedSimulation sim = prepare(default_simulation());
  Trajectory t;
  t.true_state_timeline.push_back({0.0, NuclearState::kUp});
  for (int i = 0; i < 100; ++i) t.events.push_back({i * 1e-3, Port::kE, Origin::kSignal});
  const ReadoutEstimate e = estimate_state(t, sim);
  EXPECT_EQ(e.decided_state, NuclearState::kDown);
  EXPECT_EQ(e.integrated_current, 100);
  EXPECT_GT(e.confidence, 0.999);
  EXPECT_FALSE(e.tie_broken_by_coin);
}

TEST(Estimator, ParityReversesDecision) {
  SimulationConfig cfg = default_simulation();
  cfg.interferometer.bias_parity = -1;
  Trajectory t;
  t.true_state_timeline.push_back({0.0, NuclearState::kUp});
  for (int i = 0; i < 10; ++i) t.events.push_back({i * 1e-3, Port::kE, Origin::kSignal});
  EXPECT_EQ(estimate_state(t, prepare(cfg)).decided_state, NuclearState::kUp);
}

TEST(Estimator, NoPhotonsMeansCoin) {
  const PreparedSimulation sim = prepare(default_simulation());
  int up = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Trajectory t;
    t.trial_index = i;
    t.true_state_timeline.push_back({0.0, NuclearState::kUp});
    const ReadoutEstimate e = estimate_state(t, sim);
    EXPECT_EQ(e.confidence, 0.5);
    EXPECT_TRUE(e.tie_broken_by_coin);
    up += e.decided_state == NuclearState::kUp;
  }
  EXPECT_GT(up, 60);
  EXPECT_LT(up, 140);
}

TEST(Estimator, ConfidenceGrowsWithCurrent) {
  const PreparedSimulation sim = prepare(default_simulation());
  double prev = 0.5;
  for (int n = 1; n < 40; n += 3) {
    Trajectory t;
    t.true_state_timeline.push_back({0.0, NuclearState::kUp});
    for (int i = 0; i < n; ++i) t.events.push_back({i * 1e-3, Port::kF, Origin::kSignal});
    const ReadoutEstimate e = estimate_state(t, sim);
    EXPECT_GT(e.confidence, prev);
    prev = e.confidence;
  }
}

TEST(DarkCounts, DiluteMeanCurrent) {
  SimulationConfig cfg = bright_config();
  cfg.duration = 0.01;
  const double signal_rate = prepare(cfg).signal_detection_rate();
  cfg.interferometer.dark_rate = signal_rate;  // purity 1/2
  const PreparedSimulation sim = prepare(cfg);
  RunningMoments per_detection;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const Trajectory t = simulate_trajectory(sim, i, NuclearState::kUp);
    for (const auto& e : t.events) per_detection.add(port_value(e.port));
  }
  const double undiluted = mean_current(sim.line_up, cfg.interferometer);
  const double se = std::sqrt(per_detection.variance() / static_cast<double>(per_detection.count()));
  EXPECT_NEAR(per_detection.mean(), 0.5 * undiluted, 4.0 * se);
  EXPECT_GT(std::abs(per_detection.mean() - undiluted), 10.0 * se);
}

TEST(DarkCounts, OnlyDarkCountsCarryNoInformation) {
  SimulationConfig cfg = no_flip_config();
  cfg.cavity = CavityPreset{"blind", 0.0, 1.0, 1.0};
  cfg.interferometer.dark_rate = 200.0;
  cfg.duration = 0.1;
  const PreparedSimulation sim = prepare(cfg);
  int correct = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    const Trajectory t = simulate_trajectory(sim, i, NuclearState::kUp);
    EXPECT_EQ(t.detected_signal(), 0u);
    correct += estimate_state(t, sim).decided_state == NuclearState::kUp;
  }
  EXPECT_NEAR(static_cast<double>(correct) / trials, 0.5, 4.0 * std::sqrt(0.25 / trials));
}

TEST(Fidelity, FullContrastIsPerfect) {
  // Lines a quarter period apart: every photon of a line exits one port.
  SimulationConfig cfg = bright_config();
  cfg.donor.linewidth_fwhm = 1.0;
  cfg.interferometer.delay = 1.0 / (2.0 * 60e6);
  cfg.trials = 200;
  const auto curve = fidelity_curve(cfg, {1e-3});
  EXPECT_EQ(curve[0].fidelity, 1.0);
}

TEST(Fidelity, ZeroTimeIsChance) {
  SimulationConfig cfg = default_simulation();
  cfg.trials = 2000;
  const auto curve = fidelity_curve(cfg, {0.0});
  EXPECT_EQ(curve[0].mean_detected, 0.0);
  EXPECT_TRUE(curve[0].interval.contains(0.5));
}

TEST(Fidelity, LongTimeWithoutFlipsApproachesOne) {
  SimulationConfig cfg = bright_config();
  cfg.trials = 200;
  const auto curve = fidelity_curve(cfg, {0.05});
  EXPECT_GE(curve[0].fidelity, 0.995);
  EXPECT_EQ(curve[0].flip_fraction, 0.0);
}

TEST(Fidelity, ThreadCountDoesNotChangeResults) {
  SimulationConfig cfg = default_simulation();
  cfg.trials = 300;
  cfg.threads = 1;
  const auto serial = fidelity_curve(cfg, {0.1, 0.3});
  cfg.threads = 4;
  const auto parallel = fidelity_curve(cfg, {0.1, 0.3});
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].fidelity, parallel[i].fidelity);
    EXPECT_EQ(serial[i].mean_detected, parallel[i].mean_detected);
    EXPECT_EQ(serial[i].flip_fraction, parallel[i].flip_fraction);
  }
}

TEST(Fidelity, RejectsNegativeTimes) {
  EXPECT_THROW(fidelity_curve(default_simulation(), {-1.0}), std::invalid_argument);
}

// Exact Poisson mixture over detected counts of the Gaussian decision
// oracle, computed offline: DBR defaults, flips disabled, 0.5 s.
TEST(Fidelity, DbrHalfSecondMatchesOracle) {
  SimulationConfig cfg = no_flip_config();
  cfg.trials = 4000;
  const auto curve = fidelity_curve(cfg, {0.5});
  EXPECT_TRUE(curve[0].interval.contains(0.7462)) << curve[0].fidelity;
}

TEST(Fidelity, FlipsReduceFidelityAtSixHundredMilliseconds) {
  SimulationConfig with = default_simulation();
  with.trials = 4000;
  SimulationConfig without = with;
  without.flip.p_flip_per_cycle = 0.0;
  without.flip.background_rate = 0.0;
  const FidelityPoint a = fidelity_curve(with, {0.6})[0];
  const FidelityPoint b = fidelity_curve(without, {0.6})[0];
  // Common random numbers: photon draws are shared, so the deficit is
  // carried by the flipped trials alone.
  const double deficit = b.fidelity - a.fidelity;
  EXPECT_GT(deficit, 0.0);
  EXPECT_LE(deficit, a.flip_fraction);
  EXPECT_NEAR(a.flip_fraction, 0.095, 0.02);
}

}  // namespace
}  // namespace spinread
