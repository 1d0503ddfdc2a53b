#include "surrokit/simulator.hpp"

#include <cmath>
#include <cstdio>

#include "surrokit/error.hpp"
#include "surrokit/rng.hpp"

namespace surrokit {

namespace {

constexpr std::uint64_t kEffectStream = 0;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

std::string padded(const char* prefix, std::size_t value, int width) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, value);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  require(n_experiments > 0, "n_experiments must be positive");
  require(arms_per_experiment > 0, "arms_per_experiment must be positive");
  require(total_treatment_arms == 0 || total_treatment_arms >= n_experiments,
          "total_treatment_arms must give every experiment at least one arm");
  require(users_per_arm > 0, "users_per_arm must be positive");
  require(horizon > 0, "horizon must be positive");
  require(pre_period >= 0, "pre_period must be non-negative");
  require(std::isfinite(baseline_mean), "baseline_mean must be finite");
  require(std::isfinite(baseline_sd) && baseline_sd >= 0.0, "baseline_sd must be >= 0");
  require(std::isfinite(noise_sd) && noise_sd >= 0.0, "noise_sd must be >= 0");
  require(ar1_rho >= 0.0 && ar1_rho < 1.0, "ar1_rho must lie in [0, 1)");
  require(std::isfinite(effect_scale), "effect_scale must be finite");
  require(effect_tail_df > 0.0, "effect_tail_df must be positive");
  require(novelty_floor >= 0.0 && novelty_floor <= 1.0, "novelty_floor must lie in [0, 1]");
  require(novelty_halflife > 0.0 && std::isfinite(novelty_halflife),
          "novelty_halflife must be positive");
}

std::size_t SimConfig::treatment_arms(std::size_t experiment_index) const {
  if (total_treatment_arms == 0) return arms_per_experiment;
  const std::size_t base = total_treatment_arms / n_experiments;
  const std::size_t extra = total_treatment_arms % n_experiments;
  return base + (experiment_index < extra ? 1 : 0);
}

std::size_t SimConfig::total_arms() const {
  return total_treatment_arms ? total_treatment_arms : arms_per_experiment * n_experiments;
}

double novelty_profile(const SimConfig& config, int day) {
  if (day < 1) return 0.0;
  const double decay = std::exp2(-static_cast<double>(day - 1) / config.novelty_halflife);
  return config.novelty_floor + (1.0 - config.novelty_floor) * decay;
}

double mean_novelty(const SimConfig& config) {
  double sum = 0.0;
  for (int t = 1; t <= config.horizon; ++t) sum += novelty_profile(config, t);
  return sum / static_cast<double>(config.horizon);
}

std::string experiment_id_for(std::size_t index) { return padded("exp", index, 5); }

SimulatedExperiment simulate_experiment(const SimConfig& config, std::size_t index) {
  config.validate();
  require(index < config.n_experiments, "experiment index out of range");

  const std::size_t n_treat = config.treatment_arms(index);
  CounterRng effect_rng(config.seed, index, kEffectStream);
  std::vector<ArmLabel> arms;
  std::vector<double> effects;  // per arm, control = 0
  arms.push_back(ArmLabel{"control", true});
  effects.push_back(0.0);
  for (std::size_t a = 1; a <= n_treat; ++a) {
    arms.push_back(ArmLabel{padded("t", a, 1), false});
    effects.push_back(config.effect_scale * effect_rng.student_t(config.effect_tail_df));
  }

  const DayRange days = config.pre_period > 0 ? DayRange(-config.pre_period, config.horizon)
                                              : DayRange(1, config.horizon);
  const std::size_t width = days.size();
  std::vector<double> profile(width);
  for (std::size_t k = 0; k < width; ++k) profile[k] = novelty_profile(config, days.day_at(k));

  const double innovation_sd = config.noise_sd * std::sqrt(1.0 - config.ar1_rho * config.ar1_rho);
  std::vector<UserRecord> users;
  users.reserve(arms.size() * config.users_per_arm);
  std::size_t user_no = 0;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    for (std::size_t u = 0; u < config.users_per_arm; ++u, ++user_no) {
      CounterRng rng(config.seed, index, 1 + user_no);
      const double level = config.baseline_mean + config.baseline_sd * rng.normal();
      std::vector<double> outcomes(width);
      double noise = config.noise_sd * rng.normal();
      for (std::size_t k = 0; k < width; ++k) {
        if (k > 0) noise = config.ar1_rho * noise + innovation_sd * rng.normal();
        outcomes[k] = level + effects[a] * profile[k] + noise;
      }
      users.emplace_back(padded("u", user_no, 6), arms[a], std::move(outcomes));
    }
  }

  SimulatedExperiment out{
      OutcomePanel(experiment_id_for(index), days, std::move(users), config.horizon), {}};
  const double g_bar = mean_novelty(config);
  for (std::size_t a = 1; a < arms.size(); ++a) out.true_effects[arms[a].name] = effects[a] * g_bar;
  return out;
}

void for_each_experiment(const SimConfig& config,
                         const std::function<void(SimulatedExperiment&&)>& sink) {
  config.validate();
  for (std::size_t i = 0; i < config.n_experiments; ++i) sink(simulate_experiment(config, i));
}

std::vector<SimulatedExperiment> simulate_corpus(const SimConfig& config) {
  std::vector<SimulatedExperiment> out;
  out.reserve(config.n_experiments);
  for_each_experiment(config, [&](SimulatedExperiment&& e) { out.push_back(std::move(e)); });
  return out;
}

}  // namespace surrokit
