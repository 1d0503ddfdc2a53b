#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "surrokit/panel.hpp"

namespace surrokit {

enum class ModelSource { PreTest, SimilarTest, RunningMean };

std::string_view to_string(ModelSource source);
ModelSource model_source_from_string(std::string_view text);

struct FitDiagnostics {
  std::size_t n_train = 0;
  double r_squared = 0.0;
  double residual_variance = 0.0;
  bool rank_ok = true;
};

/// Linear auto-surrogate: predicted long-term mean = intercept + sum_t coef[t-1] * Y_t
/// over post-allocation days 1..order.
class SurrogateModel {
 public:
  SurrogateModel(double intercept, std::vector<double> coefficients, ModelSource source,
                 FitDiagnostics diagnostics = {});

  int order() const { return static_cast<int>(coefficients_.size()); }
  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  ModelSource source() const { return source_; }
  const FitDiagnostics& diagnostics() const { return diagnostics_; }

  // Prediction for one user's outcomes on days 1..order.
  double predict_row(std::span<const double> first_days) const;

 private:
  double intercept_;
  std::vector<double> coefficients_;
  ModelSource source_;
  FitDiagnostics diagnostics_;
};

// OLS of targets on [1, features]. Requires rows > cols + 1 and full column rank.
SurrogateModel fit_least_squares(const Eigen::MatrixXd& features,
                                 const Eigen::VectorXd& targets,
                                 ModelSource source = ModelSource::SimilarTest);

// Trains on the panel's own pre-allocation window. Pre-day -H maps to pseudo-day 1
// and pre-day -1 to pseudo-day H, where H is the panel horizon; the target is the
// mean over all H pseudo-days and the features are the first `order` of them.
SurrogateModel fit_pretest(const OutcomePanel& panel, int order);

// Trains on post-allocation days of a donor experiment, all arms pooled.
SurrogateModel fit_similar(const OutcomePanel& donor, int order);

SurrogateModel running_mean_model(int order);

std::vector<double> predict(const SurrogateModel& model, const OutcomePanel& panel);

}  // namespace surrokit
