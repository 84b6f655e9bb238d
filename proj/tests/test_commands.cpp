#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "spinread/commands.hpp"

namespace spinread {
namespace {

double row_value(const Table& t, const std::string& quantity) {
  const std::size_t q = t.column_index("quantity");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (std::get<std::string>(t.rows[i][q]) == quantity) return t.real(i, "computed");
  }
  ADD_FAILURE() << "no row " << quantity;
  return 0.0;
}

void expect_round_trip(const Table& t) {
  for (OutputFormat f : {OutputFormat::kCsv, OutputFormat::kJsonLines}) {
    std::stringstream ss;
    write_table(t, ss, f);
    const Table back = f == OutputFormat::kCsv ? read_csv(ss, t.schema) : read_json_lines(ss, t.schema);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(back.rows[i], t.rows[i]);
  }
}

TEST(PaperTable, DefaultsPass) {
  const Table t = cmd_paper_table(Settings{});
  EXPECT_TRUE(reference_table_passes(t));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_TRUE(std::get<bool>(t.rows[i][t.column_index("pass")]))
        << std::get<std::string>(t.rows[i][0]);
  }
  expect_round_trip(t);
}

TEST(PaperTable, PerfectDetectorScalesPhotonRows) {
  Settings s;
  const Table base = cmd_paper_table(s);
  s.interferometer.detector_efficiency = 1.0;
  const Table ideal = cmd_paper_table(s);
  for (const char* q : {"detected_photons_dbr", "detected_photons_phc"}) {
    EXPECT_NEAR(row_value(ideal, q), row_value(base, q) / 0.4, 1e-12 * row_value(ideal, q)) << q;
  }
}

TEST(PaperTable, DoubleFieldQuartersFlipProbability) {
  Settings s;
  const double p10 = row_value(cmd_paper_table(s), "flip_probability_per_cycle");
  s.b_field = 20.0;
  const Table t = cmd_paper_table(s);
  EXPECT_NEAR(row_value(t, "flip_probability_per_cycle"), p10 / 4.0, 1e-12 * p10);
  EXPECT_FALSE(reference_table_passes(t));
}

TEST(PaperTable, ValidateFailsOutsideBands) {
  Settings s;
  s.donor.linewidth_fwhm = 60e6;
  EXPECT_FALSE(reference_table_passes(cmd_paper_table(s)));
}

TEST(SnrScan, MaximumNearTwoNanoseconds) {
  const Table t = cmd_snr_scan(Settings{}, 0.1e-9, 5e-9, 50);
  ASSERT_EQ(t.rows.size(), 51u);
  const std::size_t last = t.rows.size() - 1;
  EXPECT_EQ(std::get<std::string>(t.rows[last][0]), "optimum");
  EXPECT_NEAR(t.real(last, "tau_s"), 2.01865e-9, 1e-13);
  EXPECT_NEAR(t.real(last, "snr_per_photon"), 0.0840414, 1e-7);
  for (std::size_t i = 0; i < last; ++i) EXPECT_LE(t.real(i, "snr_per_photon"), t.real(last, "snr_per_photon"));
  expect_round_trip(t);
}

TEST(SnrScan, NarrowLineExceedsOne) {
  Settings s;
  s.donor.linewidth_fwhm = 3e6;
  const Table t = cmd_snr_scan(s, 1e-9, 20e-9, 100);
  EXPECT_GT(t.real(t.rows.size() - 1, "snr_per_photon"), 1.0);
}

TEST(SnrScan, EmptyRangeIsUsageError) {
  EXPECT_THROW(cmd_snr_scan(Settings{}, 5e-9, 1e-9, 10), UsageError);
  EXPECT_THROW(cmd_snr_scan(Settings{}, 0.0, 1e-9, 10), UsageError);
  EXPECT_THROW(cmd_snr_scan(Settings{}, 1e-9, 2e-9, 0), UsageError);
}

TEST(Sweep, EfficiencyHalvesIntegrationTime) {
  const Table t = cmd_sweep(Settings{}, "eta_d", {"0.2", "0.4", "0.8"});
  ASSERT_EQ(t.rows.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_NEAR(t.real(i, "integration_time_s"), 0.5 * t.real(i - 1, "integration_time_s"),
                1e-12 * t.real(i - 1, "integration_time_s"));
  }
  expect_round_trip(t);
}

TEST(Sweep, FlipProbabilityInverseSquareInField) {
  const Table t = cmd_sweep(Settings{}, "b_field", {"5 T", "10 T", "20 T"});
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_NEAR(t.real(i, "flip_probability"), 0.25 * t.real(i - 1, "flip_probability"),
                1e-12 * t.real(i - 1, "flip_probability"));
  }
}

TEST(Sweep, SnrDecreasesWithLinewidth) {
  const Table t = cmd_sweep(Settings{}, "linewidth_fwhm", {"3 MHz", "60 MHz", "150 MHz"});
  EXPECT_NEAR(t.real(0, "snr_per_photon"), 0.6004, 1e-4);
  EXPECT_NEAR(t.real(1, "snr_per_photon"), 0.2724, 1e-4);
  EXPECT_NEAR(t.real(2, "snr_per_photon"), 0.08403, 1e-5);
  EXPECT_GT(t.real(0, "snr_per_photon"), t.real(1, "snr_per_photon"));
  EXPECT_GT(t.real(1, "snr_per_photon"), t.real(2, "snr_per_photon"));
}

TEST(Sweep, CavityPresets) {
  const Table t = cmd_sweep(Settings{}, "cavity", {"bare", "dbr", "phc"});
  EXPECT_GT(t.real(2, "collected_flux"), t.real(0, "collected_flux"));
  EXPECT_GT(t.real(0, "collected_flux"), t.real(1, "collected_flux"));
}

TEST(Sweep, UnknownKeyListsSweepableKeys) {
  try {
    cmd_sweep(Settings{}, "tau_auger", {"1 ns"});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    for (const auto& k : sweepable_keys()) EXPECT_NE(msg.find(k), std::string::npos) << k;
  }
  EXPECT_THROW(cmd_sweep(Settings{}, "eta_d", {}), UsageError);
  EXPECT_THROW(cmd_sweep(Settings{}, "b_field", {"10"}), ConfigError);
}

TEST(Simulate, OneRowPerTrialAndDeterministic) {
  Settings s;
  s.trials = 20;
  s.duration = 0.2;
  const Table a = cmd_simulate(s);
  ASSERT_EQ(a.rows.size(), 20u);
  s.threads = 1;
  const Table b = cmd_simulate(s);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i], b.rows[i]);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.real(i, "port_e") + a.real(i, "port_f"), a.real(i, "detected_signal") + a.real(i, "detected_dark"));
    EXPECT_LE(a.real(i, "detected_signal"), a.real(i, "emitted_signal"));
  }
  expect_round_trip(a);
}

TEST(Simulate, SeedChangesOutput) {
  Settings s;
  s.trials = 10;
  s.duration = 0.2;
  const Table a = cmd_simulate(s);
  s.seed += 1;
  const Table b = cmd_simulate(s);
  bool differ = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) differ = differ || a.rows[i] != b.rows[i];
  EXPECT_TRUE(differ);
}

TEST(FidelityCommand, RowsPerTime) {
  Settings s;
  s.trials = 100;
  const Table t = cmd_fidelity(s, {0.01, 0.1});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_LE(t.real(0, "ci_low"), t.real(0, "fidelity"));
  EXPECT_GE(t.real(0, "ci_high"), t.real(0, "fidelity"));
  EXPECT_THROW(cmd_fidelity(s, {}), UsageError);
  expect_round_trip(t);
}

}  // namespace
}  // namespace spinread
