#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surrokit/panel.hpp"
#include "surrokit/surrogate.hpp"

namespace surrokit {

inline constexpr double kZCritical95 = 1.959964;
// Standard errors below this are replaced by it so z stays finite.
inline constexpr double kStdErrorFloor = 1e-12;
inline constexpr double kDefaultAlpha = 0.05;

enum class EstimateKind { Direct, Surrogate };

std::string_view to_string(EstimateKind kind);

struct EffectEstimate {
  std::string experiment_id;
  ArmLabel arm;
  EstimateKind kind = EstimateKind::Direct;
  // Direct: horizon in days. Surrogate: model order.
  int days = 0;
  // Set for surrogate estimates only.
  std::optional<ModelSource> source;
  double point = 0.0;
  double std_error = 0.0;
  double z_stat = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Fills z, p and the 95% interval from point and std_error (floored).
EffectEstimate make_estimate(std::string experiment_id, ArmLabel arm, EstimateKind kind,
                             int days, std::optional<ModelSource> source, double point,
                             double std_error);

// Two-sided normal p-value, 2 * (1 - Phi(|z|)).
double two_sided_p_value(double z);

double sample_variance(std::span<const double> values);

/// sqrt(s_a^2 / n_a + s_b^2 / n_b) with unbiased sample variances. A zero
/// result is logged and replaced by kStdErrorFloor.
double welch_se(std::span<const double> group_a, std::span<const double> group_b);

EffectEstimate direct_effect(const OutcomePanel& panel, const ArmLabel& arm, int horizon);
EffectEstimate direct_effect(const OutcomePanel& panel, const ArmLabel& arm);

// Difference in per-user window means over [from_day, to_day]; used for
// placebo reads on the pre-period.
EffectEstimate window_effect(const OutcomePanel& panel, const ArmLabel& arm, int from_day,
                             int to_day);

EffectEstimate surrogate_effect(const SurrogateModel& model, const OutcomePanel& panel,
                                const ArmLabel& arm);

enum class SignificanceClass { SigPositive = 0, NotSig = 1, SigNegative = 2 };

std::string_view to_string(SignificanceClass c);

SignificanceClass z_test(const EffectEstimate& estimate, double alpha = kDefaultAlpha);

}  // namespace surrokit
