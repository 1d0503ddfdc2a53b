#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "surrokit/estimators.hpp"
#include "surrokit/evaluation.hpp"
#include "surrokit/simulator.hpp"
#include "surrokit/surrogate.hpp"

namespace surrokit {

using Json = nlohmann::ordered_json;

Json to_json(const SimConfig& config);
SimConfig sim_config_from_json(const nlohmann::json& j);
SimConfig load_sim_config(const std::filesystem::path& path);

// {order, intercept, coefficients[], source, diagnostics{}}
Json to_json(const SurrogateModel& model);
SurrogateModel surrogate_model_from_json(const nlohmann::json& j);

// {experiment_id, arm, is_control, kind, T, source, point, std_error, z, p, ci_low, ci_high}
Json to_json(const EffectEstimate& estimate);
EffectEstimate effect_estimate_from_json(const nlohmann::json& j);

Json to_json(const ConfusionMatrix3& matrix);
Json to_json(const Metric& metric);  // number, or null when undefined
Json to_json(const DistributionSummary& summary, const std::string& scaled_values_path);

// {experiment_id: {arm: true_effect}}
using GroundTruth = std::map<std::string, std::map<std::string, double>>;
Json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
// Writes through a temporary file and a rename so readers never see a partial file.
void write_text_atomically(const std::filesystem::path& path, const std::string& text);
std::string dump(const Json& j);

}  // namespace surrokit
