#pragma once

#include <Eigen/Dense>

namespace surrokit {

inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresSolution {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  // Smallest |R_kk| relative to the largest column norm of the design.
  double min_relative_pivot = 0.0;
};

/// Minimizes ||design * b - targets||_2 with a column-pivoted Householder QR.
///
/// The design must have more rows than columns. A column whose remaining
/// pivot falls below `rank_tolerance` times the largest original column norm
/// makes the system rank deficient, which is reported as
/// ErrorCode::RankDeficient instead of falling back to a pseudo-inverse.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design,
                                         const Eigen::VectorXd& targets,
                                         double rank_tolerance = kRankTolerance);

}  // namespace surrokit
