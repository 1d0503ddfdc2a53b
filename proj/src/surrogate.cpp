#include "surrokit/surrogate.hpp"

#include <algorithm>
#include <string>

#include "surrokit/error.hpp"
#include "surrokit/least_squares.hpp"

namespace surrokit {

namespace {

void check_order(int order, int horizon) {
  if (order < 1 || order > horizon) {
    throw Error(ErrorCode::InvalidArgument, "order " + std::to_string(order) +
                                                " outside [1, " + std::to_string(horizon) + "]");
  }
}

}  // namespace

std::string_view to_string(ModelSource source) {
  switch (source) {
    case ModelSource::PreTest: return "pretest";
    case ModelSource::SimilarTest: return "similar";
    case ModelSource::RunningMean: return "running-mean";
  }
  return "unknown";
}

ModelSource model_source_from_string(std::string_view text) {
  if (text == "pretest") return ModelSource::PreTest;
  if (text == "similar") return ModelSource::SimilarTest;
  if (text == "running-mean") return ModelSource::RunningMean;
  throw Error(ErrorCode::InvalidArgument, "unknown model source '" + std::string(text) + "'");
}

SurrogateModel::SurrogateModel(double intercept, std::vector<double> coefficients,
                               ModelSource source, FitDiagnostics diagnostics)
    : intercept_(intercept),
      coefficients_(std::move(coefficients)),
      source_(source),
      diagnostics_(diagnostics) {
  if (coefficients_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "surrogate model needs at least one coefficient");
  }
  if (source_ == ModelSource::RunningMean) {
    const double weight = 1.0 / static_cast<double>(coefficients_.size());
    bool fixed = intercept_ == 0.0;
    for (double c : coefficients_) fixed = fixed && c == weight;
    if (!fixed) {
      throw Error(ErrorCode::InvalidArgument,
                  "running-mean model must have intercept 0 and weights 1/order");
    }
  }
}

double SurrogateModel::predict_row(std::span<const double> first_days) const {
  if (first_days.size() < coefficients_.size()) {
    throw Error(ErrorCode::OutOfRange, "prediction needs " +
                                           std::to_string(coefficients_.size()) + " days");
  }
  first_days = first_days.first(coefficients_.size());
  if (source_ == ModelSource::RunningMean) {
    // Same arithmetic as long_term_mean, so order == horizon matches it bit for bit.
    return mean_of(first_days);
  }
  double acc = intercept_;
  for (std::size_t t = 0; t < coefficients_.size(); ++t) acc += coefficients_[t] * first_days[t];
  return acc;
}

SurrogateModel fit_least_squares(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                 ModelSource source) {
  const Eigen::Index n = features.rows();
  const Eigen::Index order = features.cols();
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "no feature columns");
  if (targets.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "targets length does not match feature rows");
  }
  if (n <= order + 1) {
    throw Error(ErrorCode::TooFewRows, std::to_string(n) + " rows for order " +
                                           std::to_string(order) + " (need > order + 1)");
  }

  Eigen::MatrixXd design(n, order + 1);
  design.col(0).setOnes();
  design.rightCols(order) = features;
  auto solution = solve_least_squares(design, targets);

  FitDiagnostics diag;
  diag.n_train = static_cast<std::size_t>(n);
  const double ssr = solution.residuals.squaredNorm();
  const double sst = (targets.array() - targets.mean()).matrix().squaredNorm();
  diag.residual_variance = ssr / static_cast<double>(n - order - 1);
  if (sst > 0.0) {
    diag.r_squared = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  } else {
    diag.r_squared = 1.0;  // constant target reproduced by the intercept
  }
  diag.rank_ok = true;

  std::vector<double> coefficients(solution.coefficients.data() + 1,
                                   solution.coefficients.data() + order + 1);
  return SurrogateModel(solution.coefficients(0), std::move(coefficients), source, diag);
}

SurrogateModel fit_pretest(const OutcomePanel& panel, int order) {
  const int horizon = panel.horizon();
  check_order(order, horizon);
  if (!panel.day_range().contains(-horizon, -1)) {
    throw Error(ErrorCode::MissingPrePeriod,
                "panel " + panel.experiment_id() + " lacks pre-period days -" +
                    std::to_string(horizon) + "..-1");
  }
  PanelWindow pre = window(panel, -horizon, -1);
  const auto n = static_cast<Eigen::Index>(pre.rows());
  Eigen::MatrixXd features(n, order);
  Eigen::VectorXd targets(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = pre.row(static_cast<std::size_t>(i));
    for (int t = 0; t < order; ++t) features(i, t) = row[static_cast<std::size_t>(t)];
    targets(i) = mean_of(row);
  }
  return fit_least_squares(features, targets, ModelSource::PreTest);
}

SurrogateModel fit_similar(const OutcomePanel& donor, int order) {
  check_order(order, donor.horizon());
  if (!donor.day_range().contains(1, donor.horizon())) {
    throw Error(ErrorCode::MissingDay, "donor " + donor.experiment_id() + " lacks days 1.." +
                                           std::to_string(donor.horizon()));
  }
  PanelWindow post = window(donor, 1, order);
  const auto n = static_cast<Eigen::Index>(donor.size());
  Eigen::VectorXd targets(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    targets(i) = long_term_mean(donor, static_cast<std::size_t>(i));
  }
  return fit_least_squares(post.to_matrix(), targets, ModelSource::SimilarTest);
}

SurrogateModel running_mean_model(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  std::vector<double> coefficients(static_cast<std::size_t>(order),
                                   1.0 / static_cast<double>(order));
  return SurrogateModel(0.0, std::move(coefficients), ModelSource::RunningMean);
}

std::vector<double> predict(const SurrogateModel& model, const OutcomePanel& panel) {
  PanelWindow days = window(panel, 1, model.order());
  std::vector<double> out;
  out.reserve(days.rows());
  for (std::size_t i = 0; i < days.rows(); ++i) out.push_back(model.predict_row(days.row(i)));
  return out;
}

}  // namespace surrokit
