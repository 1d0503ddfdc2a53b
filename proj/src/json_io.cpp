#include "surrokit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "surrokit/error.hpp"

namespace surrokit {

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, ErrorCode code) {
  if (!j.contains(key)) throw Error(code, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(code, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void optional_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("field '") + key + "': " + e.what());
  }
}

std::size_t count_field(const nlohmann::json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Json to_json(const SimConfig& c) {
  Json j;
  j["n_experiments"] = c.n_experiments;
  j["arms_per_experiment"] = c.arms_per_experiment;
  j["total_treatment_arms"] = c.total_treatment_arms;
  j["users_per_arm"] = c.users_per_arm;
  j["horizon"] = c.horizon;
  j["pre_period"] = c.pre_period;
  j["baseline_mean"] = c.baseline_mean;
  j["baseline_sd"] = c.baseline_sd;
  j["noise_sd"] = c.noise_sd;
  j["ar1_rho"] = c.ar1_rho;
  j["effect_scale"] = c.effect_scale;
  if (std::isinf(c.effect_tail_df)) {
    j["effect_tail_df"] = "inf";
  } else {
    j["effect_tail_df"] = c.effect_tail_df;
  }
  j["novelty_floor"] = c.novelty_floor;
  j["novelty_halflife"] = c.novelty_halflife;
  j["seed"] = c.seed;
  return j;
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  static const char* known[] = {"n_experiments", "arms_per_experiment", "total_treatment_arms",
                                "users_per_arm", "horizon", "pre_period", "baseline_mean",
                                "baseline_sd", "noise_sd", "ar1_rho", "effect_scale",
                                "effect_tail_df", "novelty_floor", "novelty_halflife", "seed"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error(ErrorCode::InvalidConfig, "unknown config field '" + key + "'");
  }
  SimConfig c;
  c.n_experiments = count_field(j, "n_experiments", c.n_experiments);
  c.arms_per_experiment = count_field(j, "arms_per_experiment", c.arms_per_experiment);
  c.total_treatment_arms = count_field(j, "total_treatment_arms", c.total_treatment_arms);
  c.users_per_arm = count_field(j, "users_per_arm", c.users_per_arm);
  optional_field(j, "horizon", c.horizon);
  optional_field(j, "pre_period", c.pre_period);
  optional_field(j, "baseline_mean", c.baseline_mean);
  optional_field(j, "baseline_sd", c.baseline_sd);
  optional_field(j, "noise_sd", c.noise_sd);
  optional_field(j, "ar1_rho", c.ar1_rho);
  optional_field(j, "effect_scale", c.effect_scale);
  if (j.contains("effect_tail_df")) {
    const auto& v = j.at("effect_tail_df");
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) {
      c.effect_tail_df = std::numeric_limits<double>::infinity();
    } else if (v.is_number()) {
      c.effect_tail_df = v.get<double>();
    } else {
      throw Error(ErrorCode::InvalidConfig, "effect_tail_df must be a number or \"inf\"");
    }
  }
  optional_field(j, "novelty_floor", c.novelty_floor);
  optional_field(j, "novelty_halflife", c.novelty_halflife);
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<long long>() < 0)) {
      throw Error(ErrorCode::InvalidConfig, "seed must be a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  try {
    return sim_config_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw Error(e.code() == ErrorCode::Io ? ErrorCode::Io : ErrorCode::InvalidConfig,
                path.string() + ": " + e.what());
  }
}

Json to_json(const SurrogateModel& model) {
  Json j;
  j["order"] = model.order();
  j["intercept"] = model.intercept();
  j["coefficients"] = model.coefficients();
  j["source"] = std::string(to_string(model.source()));
  const auto& d = model.diagnostics();
  j["diagnostics"] = Json{{"n_train", d.n_train},
                          {"r_squared", d.r_squared},
                          {"residual_variance", d.residual_variance},
                          {"rank_ok", d.rank_ok}};
  return j;
}

SurrogateModel surrogate_model_from_json(const nlohmann::json& j) {
  constexpr auto bad = ErrorCode::InvalidArgument;
  const int order = field<int>(j, "order", bad);
  auto coefficients = field<std::vector<double>>(j, "coefficients", bad);
  if (order < 1 || static_cast<std::size_t>(order) != coefficients.size()) {
    throw Error(bad, "model order does not match coefficient count");
  }
  FitDiagnostics d;
  if (j.contains("diagnostics")) {
    const auto& dj = j.at("diagnostics");
    d.n_train = field<std::size_t>(dj, "n_train", bad);
    d.r_squared = field<double>(dj, "r_squared", bad);
    d.residual_variance = field<double>(dj, "residual_variance", bad);
    d.rank_ok = field<bool>(dj, "rank_ok", bad);
  }
  return SurrogateModel(field<double>(j, "intercept", bad), std::move(coefficients),
                        model_source_from_string(field<std::string>(j, "source", bad)), d);
}

Json to_json(const EffectEstimate& e) {
  Json j;
  j["experiment_id"] = e.experiment_id;
  j["arm"] = e.arm.name;
  j["kind"] = std::string(to_string(e.kind));
  j["T"] = e.days;
  j["source"] = e.source ? Json(std::string(to_string(*e.source))) : Json(nullptr);
  j["point"] = e.point;
  j["std_error"] = e.std_error;
  j["z"] = e.z_stat;
  j["p"] = e.p_value;
  j["ci_low"] = e.ci_low;
  j["ci_high"] = e.ci_high;
  return j;
}

EffectEstimate effect_estimate_from_json(const nlohmann::json& j) {
  constexpr auto bad = ErrorCode::MalformedRow;
  EffectEstimate e;
  e.experiment_id = field<std::string>(j, "experiment_id", bad);
  e.arm = ArmLabel{field<std::string>(j, "arm", bad), false};
  const auto kind = field<std::string>(j, "kind", bad);
  if (kind == "direct") {
    e.kind = EstimateKind::Direct;
  } else if (kind == "surrogate") {
    e.kind = EstimateKind::Surrogate;
  } else {
    throw Error(bad, "unknown estimate kind '" + kind + "'");
  }
  e.days = field<int>(j, "T", bad);
  if (j.contains("source") && !j.at("source").is_null()) {
    e.source = model_source_from_string(field<std::string>(j, "source", bad));
  }
  e.point = field<double>(j, "point", bad);
  e.std_error = field<double>(j, "std_error", bad);
  e.z_stat = field<double>(j, "z", bad);
  e.p_value = field<double>(j, "p", bad);
  e.ci_low = field<double>(j, "ci_low", bad);
  e.ci_high = field<double>(j, "ci_high", bad);
  return e;
}

Json to_json(const ConfusionMatrix3& matrix) {
  Json rows = Json::array();
  for (const auto& row : matrix.counts()) rows.push_back(Json(row));
  return rows;
}

Json to_json(const Metric& metric) {
  return metric.defined() ? Json(metric.value()) : Json(nullptr);
}

Json to_json(const DistributionSummary& s, const std::string& scaled_values_path) {
  Json j;
  j["n"] = s.n;
  j["scale"] = s.scale;
  j["mean"] = s.mean;
  j["std_dev"] = s.std_dev;
  j["excess_kurtosis"] = s.excess_kurtosis ? Json(*s.excess_kurtosis) : Json(nullptr);
  j["scaled_values_path"] = scaled_values_path;
  return j;
}

Json ground_truth_to_json(const GroundTruth& truth) {
  Json j = Json::object();
  for (const auto& [exp, arms] : truth) {
    Json a = Json::object();
    for (const auto& [arm, value] : arms) a[arm] = value;
    j[exp] = std::move(a);
  }
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth out;
  try {
    for (const auto& [exp, arms] : j.items()) {
      for (const auto& [arm, value] : arms.items()) out[exp][arm] = value.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, std::string("ground truth: ") + e.what());
  }
  return out;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, path.string() + ": " + e.what());
  }
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::Io, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace surrokit
