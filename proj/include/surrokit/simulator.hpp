#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "surrokit/panel.hpp"

namespace surrokit {

/// Generative model, per experiment, arm a and user i:
///
///   Y_it = b_i + tau_a * g(t) * [t >= 1] + e_it
///   b_i  ~ Normal(baseline_mean, baseline_sd^2)
///   tau_a = effect_scale * StudentT(effect_tail_df)
///   g(t) = novelty_floor + (1 - novelty_floor) * 2^(-(t - 1) / novelty_halflife)
///   e_it  AR(1) with coefficient ar1_rho and marginal sd noise_sd, run
///         continuously from the first pre-period day through the horizon.
struct SimConfig {
  std::size_t n_experiments = 1;
  // Treatment arms per experiment (control excluded).
  std::size_t arms_per_experiment = 1;
  // When nonzero, overrides arms_per_experiment: this many treatment arms are
  // spread over the experiments as evenly as possible, earlier experiments
  // taking the remainder.
  std::size_t total_treatment_arms = 0;
  std::size_t users_per_arm = 100;
  int horizon = kDefaultHorizon;
  int pre_period = kDefaultHorizon;
  double baseline_mean = 1.0;
  double baseline_sd = 1.0;
  double noise_sd = 0.3;
  double ar1_rho = 0.3;
  double effect_scale = 0.01;
  // +inf draws Gaussian effects.
  double effect_tail_df = std::numeric_limits<double>::infinity();
  double novelty_floor = 1.0;
  double novelty_halflife = 7.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t treatment_arms(std::size_t experiment_index) const;
  std::size_t total_arms() const;
};

struct SimulatedExperiment {
  OutcomePanel panel;
  // Ground-truth average daily effect over days 1..horizon, keyed by arm name.
  std::map<std::string, double> true_effects;
};

double novelty_profile(const SimConfig& config, int day);
// Mean of novelty_profile over days 1..horizon.
double mean_novelty(const SimConfig& config);

std::string experiment_id_for(std::size_t index);

SimulatedExperiment simulate_experiment(const SimConfig& config, std::size_t index);

// Generates experiments one at a time in index order.
void for_each_experiment(const SimConfig& config,
                         const std::function<void(SimulatedExperiment&&)>& sink);
std::vector<SimulatedExperiment> simulate_corpus(const SimConfig& config);

}  // namespace surrokit
