#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "spinread/spin_dynamics.hpp"

namespace spinread {
namespace {

TEST(FlipProbability, LeadingOrder) {
  EXPECT_NEAR(flip_probability_per_cycle(60e6, 280e9), 4.5918367e-8, 1e-14);
  EXPECT_EQ(flip_probability_per_cycle(0.0, 280e9), 0.0);
  EXPECT_THROW(flip_probability_per_cycle(60e6, 0.0), std::domain_error);
  EXPECT_THROW(flip_probability_per_cycle(-1.0, 280e9), std::domain_error);
}

TEST(FlipProbability, InverseSquareInZeeman) {
  const double p10 = flip_probability_per_cycle(60e6, 280e9);
  EXPECT_NEAR(flip_probability_per_cycle(60e6, 560e9), p10 / 4.0, 1e-20);
}

TEST(FlipProbability, BoundExcitonSuppression) {
  EXPECT_NEAR(be_flip_suppression(2e6, 60e6), 1.0 / 900.0, 1e-15);
  EXPECT_THROW(be_flip_suppression(2e6, 0.0), std::domain_error);
}

TEST(FlipProbability, ComposedChannels) {
  FlipInputs in{60e6, 280e9, 172.35e6, 2e6, 1.5e-4};
  FlipChannels bare{1.0, false, false, false};
  EXPECT_NEAR(composed_flip_probability(in, bare), flip_probability_per_cycle(60e6, 280e9), 1e-20);

  const FlipChannels all;
  const double expect = flip_probability_per_cycle(60e6, 280e9) * (1.0 + 1.0 / 900.0 + 1.5e-4);
  EXPECT_NEAR(composed_flip_probability(in, all), expect, 1e-20);

  FlipChannels electrons_only{0.0, false, false, false};
  EXPECT_NEAR(composed_flip_probability(in, electrons_only), 0.5 * flip_probability_per_cycle(60e6, 280e9),
              1e-20);

  FlipChannels minor{1.0, false, false, true};
  EXPECT_LT(composed_flip_probability(in, minor), composed_flip_probability(in, bare));
}

TEST(FlipModel, TotalIncludesBackground) {
  FlipModel m{0.0, 1.0 / 30.0, 0.1};
  EXPECT_NEAR(m.total_per_cycle(300e-9), 1e-8, 1e-14);
  m.p_flip_per_cycle = 5e-8;
  EXPECT_NEAR(m.total_per_cycle(300e-9), 6e-8, 1e-14);
  m.background_rate = 0.0;
  EXPECT_NEAR(m.total_per_cycle(300e-9), 5e-8, 1e-20);
}

TEST(FlipModel, Validation) {
  EXPECT_THROW((FlipModel{1.5, 0.0, 0.1}).validate(), std::invalid_argument);
  EXPECT_THROW((FlipModel{0.1, -1.0, 0.1}).validate(), std::invalid_argument);
  EXPECT_THROW((FlipModel{0.1, 0.0, 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW((FlipModel{0.1, 0.0, 0.0}).validate(), std::invalid_argument);
}

TEST(Randomization, RoundedProbabilityGivesExactBudget) {
  const RandomizationBudget b = excitations_to_randomization(FlipModel{5e-8, 0.0, 0.1});
  EXPECT_FALSE(b.unbounded);
  EXPECT_EQ(b.linear, 2000000u);
  EXPECT_EQ(b.geometric, 2107211u);  // ceil(2107210.26)
  // The cumulative flip probability at the linear budget.
  EXPECT_NEAR(-std::expm1(2e6 * std::log1p(-5e-8)), 0.0951626, 1e-6);
}

TEST(Randomization, CeilingAndScaling) {
  const RandomizationBudget b = excitations_to_randomization(FlipModel{3e-8, 0.0, 0.1});
  EXPECT_EQ(b.linear, 3333334u);
  const RandomizationBudget half = excitations_to_randomization(FlipModel{1e-8, 0.0, 0.1});
  const RandomizationBudget full = excitations_to_randomization(FlipModel{2e-8, 0.0, 0.1});
  EXPECT_EQ(half.linear, 2 * full.linear);
}

TEST(Randomization, ZeroProbabilityIsUnbounded) {
  const RandomizationBudget b = excitations_to_randomization(FlipModel{0.0, 0.0, 0.1});
  EXPECT_TRUE(b.unbounded);
}

TEST(Randomization, CertainFlipGivesOneCycle) {
  const RandomizationBudget b = excitations_to_randomization(FlipModel{1.0, 0.0, 0.1});
  EXPECT_EQ(b.linear, 1u);
  EXPECT_EQ(b.geometric, 1u);
}

TEST(PhotonBudget, DbrAndPhcReference) {
  const DonorParameters d;
  const EmissionModel dbr = build_emission_model(d, 0.8, presets::dbr(), 1e-9);
  const PhotonBudget b = budget_before_randomization(2e6, dbr, presets::dbr(), 0.4, 0.0840336);
  EXPECT_NEAR(b.detected_photons, 25.5987, 1e-3);
  EXPECT_NEAR(b.power_snr, 2.1512, 1e-3);

  const EmissionModel phc = build_emission_model(d, 0.8, presets::photonic_crystal(), 1e-9);
  const PhotonBudget p = budget_before_randomization(2e6, phc, presets::photonic_crystal(), 0.4, 0.0840336);
  EXPECT_NEAR(p.detected_photons, 4729.06, 0.01);
}

TEST(PhotonBudget, LinearInEfficiency) {
  const EmissionModel dbr = build_emission_model(DonorParameters{}, 0.8, presets::dbr(), 1e-9);
  const PhotonBudget a = budget_before_randomization(2e6, dbr, presets::dbr(), 0.4, 0.084);
  const PhotonBudget b = budget_before_randomization(2e6, dbr, presets::dbr(), 1.0, 0.084);
  EXPECT_NEAR(b.detected_photons, a.detected_photons / 0.4, 1e-10);
  EXPECT_THROW(budget_before_randomization(-1.0, dbr, presets::dbr(), 0.4, 0.084), std::invalid_argument);
  EXPECT_THROW(budget_before_randomization(1.0, dbr, presets::dbr(), 1.4, 0.084), std::invalid_argument);
}

TEST(Background, FlipsOverBudget) {
  const FlipModel m{5e-8, 1.0 / 30.0, 0.1};
  EXPECT_NEAR(background_flips(m, 2e6, 300e-9), 0.02, 1e-12);
}

}  // namespace
}  // namespace spinread
