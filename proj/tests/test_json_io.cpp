#include "surrokit/json_io.hpp"

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "surrokit/error.hpp"

namespace surrokit {
namespace {

TEST(SimConfigJsonTest, RoundTripAndInfinity) {
  SimConfig c;
  c.n_experiments = 7;
  c.total_treatment_arms = 20;
  c.noise_sd = 0.123456789;
  c.seed = 18446744073709551615ULL;
  Json j = to_json(c);
  EXPECT_EQ(j["effect_tail_df"], "inf");
  SimConfig back = sim_config_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.n_experiments, 7u);
  EXPECT_EQ(back.total_treatment_arms, 20u);
  EXPECT_EQ(back.noise_sd, c.noise_sd);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_TRUE(std::isinf(back.effect_tail_df));

  auto parsed = sim_config_from_json(nlohmann::json::parse(R"({"effect_tail_df": 3, "seed": 5})"));
  EXPECT_EQ(parsed.effect_tail_df, 3.0);
  EXPECT_EQ(parsed.seed, 5u);
}

TEST(SimConfigJsonTest, Rejections) {
  auto code = [](const char* text) {
    try {
      sim_config_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code(R"({"n_experimnts": 3})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(R"({"n_experiments": -3})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(R"({"ar1_rho": 1.2})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(R"({"noise_sd": "big"})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(R"({"seed": -1})"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code(R"([1, 2])"), ErrorCode::InvalidConfig);
}

TEST(ModelJsonTest, RoundTripIsExact) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> coef(1 + trial % 9);
    for (auto& v : coef) v = dist(gen) * std::pow(10.0, trial % 7 - 3);
    FitDiagnostics d{static_cast<std::size_t>(100 + trial), 0.5, dist(gen) * dist(gen), true};
    SurrogateModel m(dist(gen), coef, trial % 2 ? ModelSource::PreTest : ModelSource::SimilarTest, d);
    Json j = to_json(m);
    ASSERT_TRUE(j.contains("order") && j.contains("intercept") && j.contains("coefficients") &&
                j.contains("source") && j.contains("diagnostics"));
    SurrogateModel back = surrogate_model_from_json(nlohmann::json::parse(dump(j)));
    EXPECT_EQ(back.intercept(), m.intercept());
    EXPECT_EQ(back.coefficients(), m.coefficients());
    EXPECT_EQ(back.source(), m.source());
    EXPECT_EQ(back.diagnostics().residual_variance, d.residual_variance);
    EXPECT_EQ(back.diagnostics().n_train, d.n_train);
  }
  SurrogateModel rm = running_mean_model(3);
  EXPECT_EQ(surrogate_model_from_json(nlohmann::json::parse(dump(to_json(rm)))).coefficients(),
            rm.coefficients());
  EXPECT_THROW(surrogate_model_from_json(nlohmann::json::parse(
                   R"({"order": 2, "intercept": 0, "coefficients": [1], "source": "similar"})")),
               Error);
}

TEST(EstimateJsonTest, RecordFieldsAndExactRoundTrip) {
  EffectEstimate e = make_estimate("exp00001", ArmLabel{"t3", false}, EstimateKind::Surrogate, 14,
                                   ModelSource::PreTest, 0.1 + 0.2, 1.0 / 3.0);
  Json j = to_json(e);
  for (const char* key : {"experiment_id", "arm", "kind", "T", "point", "std_error", "z", "p",
                          "ci_low", "ci_high"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["kind"], "surrogate");
  EXPECT_EQ(j["source"], "pretest");
  EffectEstimate back = effect_estimate_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.point, e.point);
  EXPECT_EQ(back.std_error, e.std_error);
  EXPECT_EQ(back.p_value, e.p_value);
  EXPECT_EQ(back.ci_low, e.ci_low);
  EXPECT_EQ(back.days, 14);
  EXPECT_EQ(back.source, ModelSource::PreTest);
  EXPECT_EQ(back.kind, EstimateKind::Surrogate);
}

TEST(GroundTruthJsonTest, RoundTrip) {
  GroundTruth t{{"exp00000", {{"t1", 0.25}, {"t2", -1e-7}}}, {"exp00001", {{"t1", 3.0}}}};
  EXPECT_EQ(ground_truth_from_json(nlohmann::json::parse(dump(ground_truth_to_json(t)))), t);
}

TEST(AtomicWriteTest, ReplacesFile) {
  auto dir = std::filesystem::temp_directory_path() / "surrokit_atomic_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "x.json";
  write_text_atomically(path, "{\"a\": 1}");
  write_text_atomically(path, "{\"a\": 2}");
  EXPECT_EQ(read_json_file(path)["a"], 2);
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), {}), 1);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace surrokit
