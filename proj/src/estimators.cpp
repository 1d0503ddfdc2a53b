#include "surrokit/estimators.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "surrokit/error.hpp"

namespace surrokit {

namespace {

ArmLabel resolve_treatment(const OutcomePanel& panel, const ArmLabel& arm) {
  auto found = panel.find_arm(arm.name);
  if (!found) {
    throw Error(ErrorCode::UnknownArm,
                "arm '" + arm.name + "' not in experiment " + panel.experiment_id());
  }
  if (found->is_control) {
    throw Error(ErrorCode::ControlAsTreatment,
                "arm '" + arm.name + "' is the control of " + panel.experiment_id());
  }
  return *found;
}

// Difference of arm and control means of a per-user statistic.
std::pair<double, double> difference_in_means(const OutcomePanel& panel, const ArmLabel& arm,
                                              std::span<const double> per_user) {
  std::vector<double> treated;
  std::vector<double> control;
  const auto& users = panel.users();
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i].arm().name == arm.name) {
      treated.push_back(per_user[i]);
    } else if (users[i].arm().is_control) {
      control.push_back(per_user[i]);
    }
  }
  if (treated.size() < 2 || control.size() < 2) {
    throw Error(ErrorCode::DegenerateGroup, "arm '" + arm.name + "' of " +
                                                panel.experiment_id() +
                                                " needs >= 2 users in arm and control");
  }
  const double point = mean_of(treated) - mean_of(control);
  return {point, welch_se(treated, control)};
}

}  // namespace

std::string_view to_string(EstimateKind kind) {
  return kind == EstimateKind::Direct ? "direct" : "surrogate";
}

std::string_view to_string(SignificanceClass c) {
  switch (c) {
    case SignificanceClass::SigPositive: return "sig_positive";
    case SignificanceClass::NotSig: return "not_sig";
    case SignificanceClass::SigNegative: return "sig_negative";
  }
  return "unknown";
}

double two_sided_p_value(double z) {
  // erfc keeps precision far into the tail, unlike 1 - Phi.
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

EffectEstimate make_estimate(std::string experiment_id, ArmLabel arm, EstimateKind kind,
                             int days, std::optional<ModelSource> source, double point,
                             double std_error) {
  EffectEstimate e;
  e.experiment_id = std::move(experiment_id);
  e.arm = std::move(arm);
  e.kind = kind;
  e.days = days;
  e.source = source;
  e.point = point;
  e.std_error = std_error < kStdErrorFloor ? kStdErrorFloor : std_error;
  e.z_stat = e.point / e.std_error;
  e.p_value = two_sided_p_value(e.z_stat);
  e.ci_low = e.point - kZCritical95 * e.std_error;
  e.ci_high = e.point + kZCritical95 * e.std_error;
  return e;
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::DegenerateGroup, "variance needs at least 2 values");
  }
  // Welford
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  return m2 / static_cast<double>(n - 1);
}

double welch_se(std::span<const double> group_a, std::span<const double> group_b) {
  if (group_a.size() < 2 || group_b.size() < 2) {
    throw Error(ErrorCode::DegenerateGroup, "each group needs at least 2 values");
  }
  const double se =
      std::sqrt(sample_variance(group_a) / static_cast<double>(group_a.size()) +
                sample_variance(group_b) / static_cast<double>(group_b.size()));
  if (!(se > 0.0)) {
    spdlog::warn("DegenerateVariance: both groups are constant, std error floored to {}",
                 kStdErrorFloor);
    return kStdErrorFloor;
  }
  return se;
}

EffectEstimate window_effect(const OutcomePanel& panel, const ArmLabel& arm, int from_day,
                             int to_day) {
  ArmLabel resolved = resolve_treatment(panel, arm);
  PanelWindow days = window(panel, from_day, to_day);
  std::vector<double> means(days.rows());
  for (std::size_t i = 0; i < days.rows(); ++i) means[i] = mean_of(days.row(i));
  auto [point, se] = difference_in_means(panel, resolved, means);
  return make_estimate(panel.experiment_id(), std::move(resolved), EstimateKind::Direct,
                       to_day - from_day + 1, std::nullopt, point, se);
}

EffectEstimate direct_effect(const OutcomePanel& panel, const ArmLabel& arm, int horizon) {
  ArmLabel resolved = resolve_treatment(panel, arm);
  if (horizon < 1 || !panel.day_range().contains(1, horizon)) {
    throw Error(ErrorCode::MissingDay, "panel " + panel.experiment_id() + " lacks days 1.." +
                                           std::to_string(horizon));
  }
  return window_effect(panel, resolved, 1, horizon);
}

EffectEstimate direct_effect(const OutcomePanel& panel, const ArmLabel& arm) {
  return direct_effect(panel, arm, panel.horizon());
}

EffectEstimate surrogate_effect(const SurrogateModel& model, const OutcomePanel& panel,
                                const ArmLabel& arm) {
  ArmLabel resolved = resolve_treatment(panel, arm);
  std::vector<double> predicted = predict(model, panel);
  auto [point, se] = difference_in_means(panel, resolved, predicted);
  return make_estimate(panel.experiment_id(), std::move(resolved), EstimateKind::Surrogate,
                       model.order(), model.source(), point, se);
}

SignificanceClass z_test(const EffectEstimate& estimate, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  if (estimate.p_value < alpha) {
    if (estimate.point > 0.0) return SignificanceClass::SigPositive;
    if (estimate.point < 0.0) return SignificanceClass::SigNegative;
  }
  return SignificanceClass::NotSig;
}

}  // namespace surrokit
