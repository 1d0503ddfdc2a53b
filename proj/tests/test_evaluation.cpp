#include "surrokit/evaluation.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "surrokit/error.hpp"
#include "surrokit/rng.hpp"

namespace surrokit {
namespace {

using SC = SignificanceClass;

EffectEstimate est(const std::string& exp, const std::string& arm, double z) {
  return make_estimate(exp, ArmLabel{arm, false}, EstimateKind::Direct, 63, std::nullopt, z, 1.0);
}

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

TEST(ClassifyPairsTest, SimpleCases) {
  std::vector<EffectEstimate> d{est("e1", "t1", 4.0), est("e1", "t2", 4.0)};
  std::vector<EffectEstimate> s{est("e1", "t2", 0.0), est("e1", "t1", 4.0)};
  auto pairs = classify_pairs(d, s, 0.05);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].arm, "t1");
  EXPECT_EQ(pairs[0].direct_class, SC::SigPositive);
  EXPECT_EQ(pairs[0].surrogate_class, SC::SigPositive);
  EXPECT_EQ(pairs[1].direct_class, SC::SigPositive);
  EXPECT_EQ(pairs[1].surrogate_class, SC::NotSig);
}

TEST(ClassifyPairsTest, KeyMismatch) {
  std::vector<EffectEstimate> d{est("e1", "t1", 1.0)};
  std::vector<EffectEstimate> s{est("e2", "t1", 1.0)};
  try {
    classify_pairs(d, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KeyMismatch);
    EXPECT_NE(std::string(e.what()).find("e1"), std::string::npos);
  }
  std::vector<EffectEstimate> dup{est("e1", "t1", 1.0), est("e1", "t1", 2.0)};
  EXPECT_EQ(error_of([&] { classify_pairs(dup, d); }), ErrorCode::KeyMismatch);
}

TEST(ClassifyPairsTest, TwentyPairFixtureHandCount) {
  // (direct z, surrogate z); |z| > 1.96 is significant at alpha 0.05.
  const std::pair<double, double> zs[20] = {
      {3.0, 2.5},  {2.1, 2.2},   {5.0, 1.0},   {0.3, 0.1},  {-0.5, 1.2},   // PP PP PN NN NN
      {-2.5, -3.0}, {-4.0, 0.0}, {1.0, 2.0},   {0.0, 0.0},  {1.5, -1.5},   // GG GN NP NN NN
      {2.5, 0.5},  {-0.1, -2.2}, {0.8, 0.9},   {3.3, 3.3},  {-1.9, -1.99}, // PN NG NN PP NG
      {1.95, 1.97}, {-3.0, -0.4}, {0.2, -0.2}, {2.0, 2.0},  {-2.1, -2.1},  // NP GN NN PP GG
  };
  std::vector<EffectEstimate> d, s;
  for (int i = 0; i < 20; ++i) {
    const std::string arm = "t" + std::to_string(i);
    d.push_back(est("fx", arm, zs[i].first));
    s.push_back(est("fx", arm, zs[i].second));
  }
  ConfusionMatrix3 m = confusion(classify_pairs(d, s, 0.05));
  // Hand count (P = SigPositive, N = NotSig, G = SigNegative):
  // PP {0,1,13,18}=4  PN {2,10}=2  NP {7,15}=2  NN {3,4,8,9,12,17}=6
  // NG {11,14}=2  GN {6,16}=2  GG {5,19}=2   -> total 20
  EXPECT_EQ(m.at(SC::SigPositive, SC::SigPositive), 4u);
  EXPECT_EQ(m.at(SC::SigPositive, SC::NotSig), 2u);
  EXPECT_EQ(m.at(SC::NotSig, SC::SigPositive), 2u);
  EXPECT_EQ(m.at(SC::NotSig, SC::NotSig), 6u);
  EXPECT_EQ(m.at(SC::NotSig, SC::SigNegative), 2u);
  EXPECT_EQ(m.at(SC::SigNegative, SC::NotSig), 2u);
  EXPECT_EQ(m.at(SC::SigNegative, SC::SigNegative), 2u);
  EXPECT_EQ(m.total(), 20u);
}

TEST(ConfusionTest, SmallCases) {
  std::vector<DecisionPair> one{{"e", "t1", SC::SigPositive, SC::SigPositive}};
  ConfusionMatrix3 m = confusion(one);
  EXPECT_EQ(m.at(SC::SigPositive, SC::SigPositive), 1u);
  EXPECT_EQ(m.total(), 1u);

  std::vector<DecisionPair> four(4, DecisionPair{"e", "t", SC::NotSig, SC::NotSig});
  EXPECT_EQ(confusion(four).at(SC::NotSig, SC::NotSig), 4u);
  EXPECT_EQ(confusion(four).total(), 4u);

  EXPECT_EQ(error_of([] { confusion(std::vector<DecisionPair>{}); }), ErrorCode::EmptyInput);
}

TEST(ConfusionTest, TotalConservationAndPermutationInvariance) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> cls(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DecisionPair> pairs(1 + trial * 7);
    for (auto& p : pairs) {
      p.direct_class = static_cast<SC>(cls(gen));
      p.surrogate_class = static_cast<SC>(cls(gen));
    }
    ConfusionMatrix3 m = confusion(pairs);
    EXPECT_EQ(m.total(), pairs.size());
    std::shuffle(pairs.begin(), pairs.end(), gen);
    ConfusionMatrix3 shuffled = confusion(pairs);
    EXPECT_EQ(shuffled, m);

    // sharded counting merges to the same matrix
    const auto mid = static_cast<std::ptrdiff_t>(pairs.size() / 2);
    ConfusionMatrix3 merged;
    if (mid > 0) merged += confusion(std::span(pairs).first(static_cast<std::size_t>(mid)));
    merged += confusion(std::span(pairs).subspan(static_cast<std::size_t>(mid)));
    EXPECT_EQ(merged, m);

    LaunchMetrics lm = launch_metrics(m);
    for (const Metric* metric : {&lm.precision, &lm.recall}) {
      if (metric->defined()) {
        EXPECT_GE(metric->value(), 0.0);
        EXPECT_LE(metric->value(), 1.0);
      }
    }
    EXPECT_GE(lm.agreement, 0.0);
    EXPECT_LE(lm.agreement, 1.0);
  }
}

TEST(LaunchMetricsTest, DiagonalMatrixIsPerfect) {
  ConfusionMatrix3 m({{{5, 0, 0}, {0, 7, 0}, {0, 0, 2}}});
  LaunchMetrics lm = launch_metrics(m);
  EXPECT_EQ(lm.precision.value(), 1.0);
  EXPECT_EQ(lm.recall.value(), 1.0);
  EXPECT_EQ(lm.agreement, 1.0);
}

TEST(LaunchMetricsTest, HandBuiltMatrix) {
  ConfusionMatrix3 m({{{13, 7, 0}, {3, 60, 2}, {1, 4, 10}}});
  LaunchMetrics lm = launch_metrics(m);
  EXPECT_EQ(lm.precision.value(), 13.0 / 17.0);
  EXPECT_EQ(lm.recall.value(), 13.0 / 20.0);
  EXPECT_EQ(lm.agreement, 83.0 / 100.0);
  EXPECT_EQ(lm.surrogate_ns_rate, 71.0 / 100.0);
  EXPECT_EQ(lm.direct_ns_rate, 65.0 / 100.0);
  EXPECT_EQ(lm.false_launch_negatives, 1u);
}

TEST(LaunchMetricsTest, UndefinedDenominatorsAreExplicit) {
  ConfusionMatrix3 m({{{0, 0, 0}, {0, 9, 1}, {0, 2, 3}}});
  LaunchMetrics lm = launch_metrics(m);
  EXPECT_FALSE(lm.precision.defined());
  EXPECT_FALSE(lm.recall.defined());
  EXPECT_FALSE(lm.precision.get().has_value());
  EXPECT_EQ(error_of([&] { lm.precision.value(); }), ErrorCode::UndefinedMetric);
  EXPECT_EQ(error_of([&] { lm.recall.value(); }), ErrorCode::UndefinedMetric);
  EXPECT_EQ(error_of([] { launch_metrics(ConfusionMatrix3{}); }), ErrorCode::EmptyInput);
}

TEST(LaunchMetricsTest, ReportedOperatingPoint) {
  // Closest integer matrix to the reported precision 0.79, recall 0.65,
  // NotSig shares 0.865 (surrogate) / 0.79 (direct) and no false launches.
  ConfusionMatrix3 m({{{65, 35, 0}, {17, 773, 0}, {0, 57, 53}}});
  LaunchMetrics lm = launch_metrics(m);
  EXPECT_NEAR(lm.precision.value(), 0.79, 0.005);
  EXPECT_DOUBLE_EQ(lm.recall.value(), 0.65);
  EXPECT_DOUBLE_EQ(lm.surrogate_ns_rate, 0.865);
  EXPECT_DOUBLE_EQ(lm.direct_ns_rate, 0.79);
  EXPECT_EQ(lm.false_launch_negatives, 0u);
  EXPECT_DOUBLE_EQ(lm.agreement, 0.891);
  // The NotSig marginals differ by 0.075, which must sit off the diagonal, so
  // agreement over all nine cells cannot exceed 0.925 with these rates.
  EXPECT_LE(lm.agreement, 1.0 - std::abs(lm.surrogate_ns_rate - lm.direct_ns_rate) + 1e-12);
}

TEST(KurtosisTest, NormalAndStudentT) {
  CounterRng rng(2024, 1);
  std::vector<double> normal(100000), t10(100000), t5(100000);
  for (auto& v : normal) v = rng.normal();
  for (auto& v : t10) v = rng.student_t(10.0);
  for (auto& v : t5) v = rng.student_t(5.0);
  EXPECT_NEAR(scaled_distribution(normal).excess_kurtosis.value(), 0.0, 0.1);
  EXPECT_NEAR(scaled_distribution(t10).excess_kurtosis.value(), 6.0 / (10.0 - 4.0), 0.5);
  EXPECT_GT(scaled_distribution(t5).excess_kurtosis.value(), 3.0);
}

TEST(KurtosisTest, SmallSampleMatchesBiasCorrectedFormula) {
  // x = 1,2,3,4,10: mean 4, m2 = 50/5 = 10, m4 = 1394/5 = 278.8; g2 = 2.788 - 3 = -0.212
  // G2 = (n-1)/((n-2)(n-3)) * ((n+1) g2 + 6) = 4/6 * (-1.272 + 6) = 3.152
  std::vector<double> x{1, 2, 3, 4, 10};
  EXPECT_NEAR(excess_kurtosis(x).value(), 3.152, 1e-12);
  EXPECT_FALSE(excess_kurtosis(std::vector<double>{1, 2, 3}).has_value());
  EXPECT_FALSE(excess_kurtosis(std::vector<double>{2, 2, 2, 2}).has_value());
}

TEST(ScaledDistributionTest, ScalingAndIdempotence) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> dist(0.3, 4.0);
  std::vector<double> v(500);
  for (auto& x : v) x = dist(gen);
  DistributionSummary self = scaled_distribution(v);
  EXPECT_NEAR(self.std_dev, 1.0, 1e-9);
  DistributionSummary again = scaled_distribution(self.scaled_values);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(again.scaled_values[i], self.scaled_values[i], 1e-9);
  }

  std::vector<double> ref{1.0, 3.0};  // sample std sqrt(2)
  DistributionSummary by_ref = scaled_distribution(std::vector<double>{2.0, 4.0}, ref);
  EXPECT_DOUBLE_EQ(by_ref.scale, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(by_ref.scaled_values[1], 4.0 / std::sqrt(2.0));

  EXPECT_EQ(error_of([] { scaled_distribution(std::vector<double>{1.0}, std::vector<double>{2.0, 2.0}); }),
            ErrorCode::ZeroVariance);
  EXPECT_EQ(error_of([] { scaled_distribution(std::vector<double>{1.0}, std::vector<double>{2.0}); }),
            ErrorCode::ZeroVariance);
}

TEST(KernelDensityTest, IntegratesToOne) {
  CounterRng rng(3, 3);
  std::vector<double> v(2000);
  for (auto& x : v) x = rng.normal();
  auto curve = kernel_density(v, 512);
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += 0.5 * (curve[i].density + curve[i - 1].density) * (curve[i].x - curve[i - 1].x);
  }
  EXPECT_NEAR(area, 1.0, 1e-3);
  EXPECT_GT(silverman_bandwidth(v), 0.0);
}

TEST(ThroughputTest, CapacityGain) {
  EXPECT_EQ(capacity_gain(56, 14), 3.0);
  EXPECT_EQ(capacity_gain(63, 63), 0.0);
  EXPECT_EQ(capacity_gain(63, 14), 3.5);
  EXPECT_EQ(error_of([] { capacity_gain(14, 56); }), ErrorCode::InvalidCycle);
  EXPECT_EQ(error_of([] { capacity_gain(14, 0); }), ErrorCode::InvalidCycle);
}

TEST(ThroughputTest, ExtraExperimentsNeeded) {
  EXPECT_NEAR(extra_experiments_needed(0.65), 0.5384615384615385, 1e-15);
  EXPECT_EQ(extra_experiments_needed(1.0), 0.0);
  EXPECT_EQ(extra_experiments_needed(0.5), 1.0);
  EXPECT_EQ(error_of([] { extra_experiments_needed(0.0); }), ErrorCode::InvalidRecall);
  EXPECT_EQ(error_of([] { extra_experiments_needed(1.5); }), ErrorCode::InvalidRecall);
  EXPECT_GT(capacity_gain(56, 14), extra_experiments_needed(0.65));
}

}  // namespace
}  // namespace surrokit
