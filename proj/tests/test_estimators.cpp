#include "surrokit/estimators.hpp"

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "surrokit/error.hpp"
#include "surrokit/simulator.hpp"

namespace surrokit {
namespace {

using oracle::kControl;
using oracle::kT1;
using oracle::kT2;

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

OutcomePanel six_user_fixture() {
  return oracle::make_panel("fx", DayRange(1, 3),
                            {{kControl, {1, 2, 3}},
                             {kControl, {2, 2, 2}},
                             {kControl, {4, 5, 3}},
                             {kT1, {3, 4, 5}},
                             {kT1, {5, 5, 8}},
                             {kT1, {2, 3, 4}}},
                            3);
}

SimConfig noisy_config(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.users_per_arm = 80;
  c.arms_per_experiment = 2;
  c.noise_sd = 0.5;
  c.ar1_rho = 0.4;
  c.effect_scale = 0.3;
  c.effect_tail_df = 4.0;
  c.novelty_floor = 0.4;
  c.novelty_halflife = 5.0;
  return c;
}

TEST(WelchSeTest, ClosedFormAndFloor) {
  std::vector<double> g{0.0, 2.0};
  EXPECT_DOUBLE_EQ(welch_se(g, g), std::sqrt(2.0));
  std::vector<double> flat{3.0, 3.0, 3.0};
  EXPECT_EQ(welch_se(flat, flat), kStdErrorFloor);
  std::vector<double> one{1.0};
  EXPECT_EQ(error_of([&] { welch_se(one, g); }), ErrorCode::DegenerateGroup);
}

TEST(WelchSeTest, MatchesTwoPassOracle) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> dist(1e3, 5.0);
  std::vector<double> a(37), b(91);
  for (auto& v : a) v = dist(gen);
  for (auto& v : b) v = dist(gen);
  EXPECT_NEAR(welch_se(a, b), oracle::welch_se(a, b), 1e-12 * oracle::welch_se(a, b));
}

TEST(EffectEstimateTest, DerivedFieldsFollowPointAndError) {
  EffectEstimate e = make_estimate("x", kT1, EstimateKind::Direct, 63, std::nullopt, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(e.z_stat, 1.0);
  const double phi = 0.5 * (1.0 + std::erf(1.0 / std::sqrt(2.0)));
  EXPECT_NEAR(e.p_value, 2.0 * (1.0 - phi), 1e-15);
  EXPECT_NEAR(e.p_value, 0.31731050786291415, 1e-15);
  EXPECT_DOUBLE_EQ(e.ci_low, 0.5 - 1.959964 * 0.5);
  EXPECT_DOUBLE_EQ(e.ci_high, 0.5 + 1.959964 * 0.5);
  EXPECT_LE(e.ci_low, e.point);
  EXPECT_GE(e.ci_high, e.point);
  EffectEstimate floored = make_estimate("x", kT1, EstimateKind::Direct, 63, std::nullopt, 1.0, 0.0);
  EXPECT_EQ(floored.std_error, kStdErrorFloor);
  EXPECT_TRUE(std::isfinite(floored.z_stat));
}

TEST(DirectEffectTest, ConstantGroups) {
  auto p = oracle::make_panel("e", DayRange(1, 2),
                              {{kControl, {3, 3}}, {kControl, {3, 3}}, {kT1, {5, 5}}, {kT1, {5, 5}}}, 2);
  EffectEstimate e = direct_effect(p, kT1);
  EXPECT_EQ(e.point, 2.0);
  EXPECT_EQ(e.kind, EstimateKind::Direct);
  EXPECT_EQ(e.days, 2);
}

TEST(DirectEffectTest, DuplicatedControlGivesZero) {
  auto p = oracle::make_panel("e", DayRange(1, 2),
                              {{kControl, {1, 4}}, {kControl, {2, 7}}, {kT1, {1, 4}}, {kT1, {2, 7}}}, 2);
  EXPECT_EQ(direct_effect(p, kT1).point, 0.0);
}

TEST(DirectEffectTest, SixUserFixtureMatchesHandWelch) {
  EffectEstimate e = direct_effect(six_user_fixture(), kT1);
  // per-user means: control 2, 2, 4; t1 4, 6, 3  ->  point 5/3, se^2 = 11/9
  EXPECT_NEAR(e.point, 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(e.std_error, std::sqrt(11.0 / 9.0), 1e-14);
}

TEST(DirectEffectTest, ErrorPaths) {
  auto p = six_user_fixture();
  EXPECT_EQ(error_of([&] { direct_effect(p, kT2); }), ErrorCode::UnknownArm);
  EXPECT_EQ(error_of([&] { direct_effect(p, kControl); }), ErrorCode::ControlAsTreatment);
  EXPECT_EQ(error_of([&] { direct_effect(p, kT1, 4); }), ErrorCode::MissingDay);
}

TEST(DirectEffectTest, TreatmentShiftMovesPointByShift) {
  OutcomePanel p = simulate_experiment(noisy_config(1), 0).panel;
  const double shift = 0.75;
  std::vector<UserRecord> users;
  for (const auto& u : p.users()) {
    std::vector<double> v(u.outcomes().begin(), u.outcomes().end());
    if (u.arm().name == "t1") {
      for (auto& x : v) x += shift;
    }
    users.emplace_back(u.user_id(), u.arm(), std::move(v));
  }
  OutcomePanel shifted(p.experiment_id(), p.day_range(), std::move(users), p.horizon());
  EXPECT_NEAR(direct_effect(shifted, kT1).point - direct_effect(p, kT1).point, shift, 1e-12);
  EXPECT_EQ(direct_effect(shifted, kT2).point, direct_effect(p, kT2).point);
}

TEST(SurrogateEffectTest, FullOrderFitsMatchDirect) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    OutcomePanel p = simulate_experiment(noisy_config(seed), 0).panel;
    const SurrogateModel models[] = {fit_similar(p, 63), fit_pretest(p, 63)};
    for (const auto& model : models) {
      for (const auto& arm : p.treatment_arms()) {
        EffectEstimate d = direct_effect(p, arm);
        EffectEstimate s = surrogate_effect(model, p, arm);
        EXPECT_EQ(s.kind, EstimateKind::Surrogate);
        EXPECT_EQ(s.days, 63);
        EXPECT_TRUE(oracle::rel_close(s.point, d.point, 1e-8)) << s.point << " vs " << d.point;
        EXPECT_TRUE(oracle::rel_close(s.std_error, d.std_error, 1e-8));
      }
    }
  }
}

TEST(SurrogateEffectTest, RunningMeanAtHorizonIsIdentical) {
  OutcomePanel p = simulate_experiment(noisy_config(2), 0).panel;
  for (const auto& arm : p.treatment_arms()) {
    EffectEstimate d = direct_effect(p, arm);
    EffectEstimate s = surrogate_effect(running_mean_model(63), p, arm);
    EXPECT_EQ(s.point, d.point);
    EXPECT_EQ(s.std_error, d.std_error);
    EXPECT_EQ(s.p_value, d.p_value);
  }
}

TEST(SurrogateEffectTest, ZeroNoiseFlatEffectIsRecovered) {
  SimConfig c;
  c.users_per_arm = 10;
  c.noise_sd = 0.0;
  c.baseline_sd = 0.0;
  c.novelty_floor = 1.0;
  c.effect_scale = 0.2;
  c.seed = 4;
  SimulatedExperiment exp = simulate_experiment(c, 0);
  const double tau = exp.true_effects.at("t1");
  EXPECT_NEAR(surrogate_effect(running_mean_model(7), exp.panel, kT1).point, tau, 1e-8);
  SurrogateModel lag_one(0.0, {1.0}, ModelSource::SimilarTest);
  EXPECT_NEAR(surrogate_effect(lag_one, exp.panel, kT1).point, tau, 1e-8);
}

TEST(SurrogateEffectTest, OrderBeyondPanelIsOutOfRange) {
  auto p = six_user_fixture();
  EXPECT_EQ(error_of([&] { surrogate_effect(running_mean_model(4), p, kT1); }),
            ErrorCode::OutOfRange);
  EXPECT_EQ(error_of([&] { surrogate_effect(running_mean_model(2), p, kControl); }),
            ErrorCode::ControlAsTreatment);
}

TEST(ZTestTest, Classes) {
  auto est = [](double point, double se) {
    return make_estimate("x", kT1, EstimateKind::Direct, 63, std::nullopt, point, se);
  };
  EXPECT_EQ(z_test(est(2.0, 0.5), 0.05), SignificanceClass::SigPositive);
  EXPECT_EQ(z_test(est(-2.0, 0.5), 0.05), SignificanceClass::SigNegative);
  EXPECT_EQ(z_test(est(0.5, 0.5), 0.05), SignificanceClass::NotSig);
  EXPECT_EQ(z_test(est(0.0, 0.5), 0.05), SignificanceClass::NotSig);
  EXPECT_THROW(z_test(est(1.0, 1.0), 0.0), Error);
}

TEST(WindowEffectTest, PrePeriodPlacebo) {
  OutcomePanel p = simulate_experiment(noisy_config(3), 0).panel;
  EffectEstimate placebo = window_effect(p, kT1, -63, -1);
  EXPECT_EQ(placebo.days, 63);
  // no treatment term before allocation
  EXPECT_LT(std::abs(placebo.z_stat), 4.0);
}

}  // namespace
}  // namespace surrokit
