#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surrokit/estimators.hpp"

namespace surrokit {

struct DecisionPair {
  std::string experiment_id;
  std::string arm;
  SignificanceClass direct_class = SignificanceClass::NotSig;
  SignificanceClass surrogate_class = SignificanceClass::NotSig;
};

// Pairs estimates by (experiment_id, arm). Output is sorted by that key.
std::vector<DecisionPair> classify_pairs(std::span<const EffectEstimate> direct,
                                         std::span<const EffectEstimate> surrogate,
                                         double alpha = kDefaultAlpha);

/// Rows are the direct-read class, columns the surrogate-read class, both in
/// SignificanceClass order (SigPositive, NotSig, SigNegative).
class ConfusionMatrix3 {
 public:
  using Counts = std::array<std::array<std::size_t, 3>, 3>;

  ConfusionMatrix3() = default;
  explicit ConfusionMatrix3(const Counts& counts) : counts_(counts) {}

  std::size_t at(SignificanceClass direct, SignificanceClass surrogate) const;
  void add(SignificanceClass direct, SignificanceClass surrogate, std::size_t n = 1);
  const Counts& counts() const { return counts_; }

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t direct_total(SignificanceClass c) const;
  std::size_t surrogate_total(SignificanceClass c) const;

  ConfusionMatrix3& operator+=(const ConfusionMatrix3& other);
  friend bool operator==(const ConfusionMatrix3&, const ConfusionMatrix3&) = default;

 private:
  Counts counts_{};
};

ConfusionMatrix3 confusion(std::span<const DecisionPair> pairs);

/// A ratio that may be undefined because its denominator is zero. Reading an
/// undefined value throws ErrorCode::UndefinedMetric; it never yields NaN.
class Metric {
 public:
  Metric() = default;
  static Metric ratio(std::size_t numerator, std::size_t denominator, std::string name);

  bool defined() const { return value_.has_value(); }
  double value() const;
  std::optional<double> get() const { return value_; }
  const std::string& name() const { return name_; }

 private:
  std::optional<double> value_;
  std::string name_;
};

struct LaunchMetrics {
  // P(direct SigPositive | surrogate SigPositive)
  Metric precision;
  // P(surrogate SigPositive | direct SigPositive)
  Metric recall;
  double agreement = 0.0;
  double surrogate_ns_rate = 0.0;
  double direct_ns_rate = 0.0;
  // Surrogate says launch while the direct read is significantly negative.
  std::size_t false_launch_negatives = 0;
};

LaunchMetrics launch_metrics(const ConfusionMatrix3& matrix);

// Bias-corrected sample excess kurtosis (G2). Undefined for n < 4 or zero variance.
std::optional<double> excess_kurtosis(std::span<const double> values);

struct DistributionSummary {
  std::size_t n = 0;
  double scale = 1.0;  // sample std of the scaling vector
  double mean = 0.0;
  double std_dev = 0.0;
  std::optional<double> excess_kurtosis;
  std::vector<double> scaled_values;
};

// Divides `values` by the sample std of `scale_by`; statistics describe the
// scaled values.
DistributionSummary scaled_distribution(std::span<const double> values,
                                        std::span<const double> scale_by);
// Self-scaled variant.
DistributionSummary scaled_distribution(std::span<const double> values);

struct DensityPoint {
  double x;
  double density;
};

double silverman_bandwidth(std::span<const double> values);
// Gaussian KDE evaluated on `grid_points` evenly spaced points covering the data +-3h.
std::vector<DensityPoint> kernel_density(std::span<const double> values,
                                         std::size_t grid_points = 256);

double capacity_gain(double long_cycle_days, double short_cycle_days);
double extra_experiments_needed(double recall);

}  // namespace surrokit
