#include "surrokit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "surrokit/error.hpp"

namespace surrokit {

namespace {

std::size_t idx(SignificanceClass c) { return static_cast<std::size_t>(c); }

using Key = std::pair<std::string, std::string>;

std::map<Key, const EffectEstimate*> index_by_key(std::span<const EffectEstimate> estimates,
                                                  std::string_view what) {
  std::map<Key, const EffectEstimate*> out;
  for (const auto& e : estimates) {
    auto [it, inserted] = out.emplace(Key{e.experiment_id, e.arm.name}, &e);
    if (!inserted) {
      throw Error(ErrorCode::KeyMismatch, "duplicate " + std::string(what) + " estimate for (" +
                                              e.experiment_id + ", " + e.arm.name + ")");
    }
  }
  return out;
}

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;  // central moments divided by n
  double m4 = 0.0;
};

Moments central_moments(std::span<const double> values) {
  Moments m;
  const double n = static_cast<double>(values.size());
  for (double v : values) m.mean += v;
  m.mean /= n;
  for (double v : values) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m4 += d2 * d2;
  }
  m.m2 /= n;
  m.m4 /= n;
  return m;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  Moments m = central_moments(values);
  const double n = static_cast<double>(values.size());
  return std::sqrt(m.m2 * n / (n - 1.0));
}

}  // namespace

// ---------------------------------------------------------------------------
// Pairing and tabulation

std::vector<DecisionPair> classify_pairs(std::span<const EffectEstimate> direct,
                                         std::span<const EffectEstimate> surrogate,
                                         double alpha) {
  auto direct_by_key = index_by_key(direct, "direct");
  auto surrogate_by_key = index_by_key(surrogate, "surrogate");
  for (const auto& [key, _] : direct_by_key) {
    if (!surrogate_by_key.contains(key)) {
      throw Error(ErrorCode::KeyMismatch,
                  "(" + key.first + ", " + key.second + ") has no surrogate estimate");
    }
  }
  for (const auto& [key, _] : surrogate_by_key) {
    if (!direct_by_key.contains(key)) {
      throw Error(ErrorCode::KeyMismatch,
                  "(" + key.first + ", " + key.second + ") has no direct estimate");
    }
  }
  std::vector<DecisionPair> pairs;
  pairs.reserve(direct_by_key.size());
  for (const auto& [key, d] : direct_by_key) {
    const EffectEstimate* s = surrogate_by_key.at(key);
    pairs.push_back(DecisionPair{key.first, key.second, z_test(*d, alpha), z_test(*s, alpha)});
  }
  return pairs;
}

std::size_t ConfusionMatrix3::at(SignificanceClass direct, SignificanceClass surrogate) const {
  return counts_[idx(direct)][idx(surrogate)];
}

void ConfusionMatrix3::add(SignificanceClass direct, SignificanceClass surrogate, std::size_t n) {
  counts_[idx(direct)][idx(surrogate)] += n;
}

std::size_t ConfusionMatrix3::total() const {
  std::size_t t = 0;
  for (const auto& row : counts_) {
    for (auto c : row) t += c;
  }
  return t;
}

std::size_t ConfusionMatrix3::trace() const {
  return counts_[0][0] + counts_[1][1] + counts_[2][2];
}

std::size_t ConfusionMatrix3::direct_total(SignificanceClass c) const {
  const auto& row = counts_[idx(c)];
  return row[0] + row[1] + row[2];
}

std::size_t ConfusionMatrix3::surrogate_total(SignificanceClass c) const {
  return counts_[0][idx(c)] + counts_[1][idx(c)] + counts_[2][idx(c)];
}

ConfusionMatrix3& ConfusionMatrix3::operator+=(const ConfusionMatrix3& other) {
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) counts_[r][c] += other.counts_[r][c];
  }
  return *this;
}

ConfusionMatrix3 confusion(std::span<const DecisionPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no decision pairs");
  ConfusionMatrix3 m;
  for (const auto& p : pairs) m.add(p.direct_class, p.surrogate_class);
  return m;
}

// ---------------------------------------------------------------------------
// Launch metrics

Metric Metric::ratio(std::size_t numerator, std::size_t denominator, std::string name) {
  Metric m;
  m.name_ = std::move(name);
  if (denominator > 0) {
    m.value_ = static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  return m;
}

double Metric::value() const {
  if (!value_) throw Error(ErrorCode::UndefinedMetric, name_ + " has a zero denominator");
  return *value_;
}

LaunchMetrics launch_metrics(const ConfusionMatrix3& matrix) {
  const std::size_t total = matrix.total();
  if (total == 0) throw Error(ErrorCode::EmptyInput, "confusion matrix is empty");
  using SC = SignificanceClass;
  const std::size_t both_launch = matrix.at(SC::SigPositive, SC::SigPositive);

  LaunchMetrics out;
  out.precision = Metric::ratio(both_launch, matrix.surrogate_total(SC::SigPositive), "precision");
  out.recall = Metric::ratio(both_launch, matrix.direct_total(SC::SigPositive), "recall");
  const double n = static_cast<double>(total);
  out.agreement = static_cast<double>(matrix.trace()) / n;
  out.surrogate_ns_rate = static_cast<double>(matrix.surrogate_total(SC::NotSig)) / n;
  out.direct_ns_rate = static_cast<double>(matrix.direct_total(SC::NotSig)) / n;
  out.false_launch_negatives = matrix.at(SC::SigNegative, SC::SigPositive);
  return out;
}

// ---------------------------------------------------------------------------
// Distribution diagnostics

std::optional<double> excess_kurtosis(std::span<const double> values) {
  if (values.size() < 4) return std::nullopt;
  Moments m = central_moments(values);
  if (!(m.m2 > 0.0)) return std::nullopt;
  const double n = static_cast<double>(values.size());
  const double g2 = m.m4 / (m.m2 * m.m2) - 3.0;
  return (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
}

DistributionSummary scaled_distribution(std::span<const double> values,
                                        std::span<const double> scale_by) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values to summarize");
  if (scale_by.size() < 2) {
    throw Error(ErrorCode::ZeroVariance, "scaling vector needs at least 2 values");
  }
  const double scale = sample_std(scale_by);
  if (!(scale > 0.0)) throw Error(ErrorCode::ZeroVariance, "scaling vector is constant");

  DistributionSummary s;
  s.n = values.size();
  s.scale = scale;
  s.scaled_values.reserve(values.size());
  for (double v : values) s.scaled_values.push_back(v / scale);
  double sum = 0.0;
  for (double v : s.scaled_values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  s.std_dev = sample_std(s.scaled_values);
  s.excess_kurtosis = excess_kurtosis(s.scaled_values);
  return s;
}

DistributionSummary scaled_distribution(std::span<const double> values) {
  return scaled_distribution(values, values);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::EmptyInput, "bandwidth needs >= 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double sd = sample_std(values);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw Error(ErrorCode::ZeroVariance, "constant values have no density");
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

std::vector<DensityPoint> kernel_density(std::span<const double> values, std::size_t grid_points) {
  if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 grid points");
  const double h = silverman_bandwidth(values);
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h *
                             std::sqrt(2.0 * std::numbers::pi));
  std::vector<DensityPoint> out;
  out.reserve(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = lo + step * static_cast<double>(g);
    double acc = 0.0;
    for (double v : values) {
      const double u = (x - v) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out.push_back({x, acc * norm});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Throughput

double capacity_gain(double long_cycle_days, double short_cycle_days) {
  if (!(short_cycle_days > 0.0) || !(long_cycle_days >= short_cycle_days) ||
      !std::isfinite(long_cycle_days)) {
    throw Error(ErrorCode::InvalidCycle, "cycles must satisfy long >= short > 0");
  }
  return long_cycle_days / short_cycle_days - 1.0;
}

double extra_experiments_needed(double recall) {
  if (!(recall > 0.0 && recall <= 1.0)) {
    throw Error(ErrorCode::InvalidRecall, "recall must lie in (0, 1]");
  }
  return 1.0 / recall - 1.0;
}

}  // namespace surrokit
