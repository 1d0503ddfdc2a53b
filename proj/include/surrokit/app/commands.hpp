#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "surrokit/estimators.hpp"
#include "surrokit/panel.hpp"
#include "surrokit/surrogate.hpp"

namespace surrokit::app {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kEstimatesSuffix = ".estimates.json";
inline constexpr const char* kGroundTruthFile = "ground_truth.json";
inline constexpr const char* kManifestFile = "manifest.json";

// Bad flag combinations; the CLI maps these to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  double alpha = kDefaultAlpha;
  int horizon = kDefaultHorizon;
  bool horizon_given = false;
};

struct SimulateOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
};

struct AnalyzeOptions {
  // A panel CSV, or a directory of them (one estimates file per panel).
  std::filesystem::path panel;
  std::string regime = "pretest";
  std::optional<std::filesystem::path> donor;
  std::optional<int> order;
  bool sweep_order = false;
  std::optional<std::filesystem::path> model_in;
  std::optional<std::filesystem::path> model_out;
  std::filesystem::path out;
};

struct EvaluateOptions {
  std::filesystem::path estimates_dir;
  std::filesystem::path out;
  // Selects the surrogate order when estimate files hold several.
  std::optional<int> order;
  double long_cycle = 56.0;
  double short_cycle = 14.0;
  bool density = false;
};

void run_simulate(const GlobalOptions& global, const SimulateOptions& options);
void run_analyze(const GlobalOptions& global, const AnalyzeOptions& options);
void run_evaluate(const GlobalOptions& global, const EvaluateOptions& options);

// Resolved form of AnalyzeOptions: which orders to estimate and, unless the
// regime fits per panel (pretest), the models shared by every panel.
struct AnalysisPlan {
  int horizon = kDefaultHorizon;
  ModelSource regime = ModelSource::PreTest;
  std::vector<int> orders;
  std::vector<SurrogateModel> shared_models;  // parallel to `orders`, or empty
};

AnalysisPlan make_plan(const GlobalOptions& global, const AnalyzeOptions& options);

// Direct estimates for every treatment arm followed by surrogate estimates for
// every (arm, order), sorted by (arm, kind, order).
std::vector<EffectEstimate> analyze_panel(const OutcomePanel& panel, const AnalysisPlan& plan);

}  // namespace surrokit::app
