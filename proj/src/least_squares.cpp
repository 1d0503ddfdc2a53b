#include "surrokit/least_squares.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "surrokit/error.hpp"

namespace surrokit {

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design,
                                         const Eigen::VectorXd& targets,
                                         double rank_tolerance) {
  using Index = Eigen::Index;
  const Index m = design.rows();
  const Index p = design.cols();
  if (targets.size() != m) {
    throw Error(ErrorCode::InvalidArgument, "targets length does not match design rows");
  }
  if (p == 0 || m <= p) {
    throw Error(ErrorCode::TooFewRows, std::to_string(m) + " rows for " +
                                           std::to_string(p) + " columns");
  }
  if (!design.allFinite() || !targets.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "least squares inputs must be finite");
  }

  Eigen::MatrixXd a = design;
  Eigen::VectorXd qty = targets;
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});

  const double largest_norm = design.colwise().norm().maxCoeff();
  const double threshold = rank_tolerance * largest_norm;
  double min_pivot = largest_norm;

  for (Index k = 0; k < p; ++k) {
    // Pivot on the largest remaining column norm (recomputed, not downdated).
    Index best = k;
    double best_norm = -1.0;
    for (Index j = k; j < p; ++j) {
      double nrm = a.col(j).tail(m - k).norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = j;
      }
    }
    if (best != k) {
      a.col(k).swap(a.col(best));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(best)]);
    }
    if (!(best_norm > threshold)) {
      throw Error(ErrorCode::RankDeficient,
                  "design column rank " + std::to_string(k) + " < " + std::to_string(p));
    }

    // Householder reflector v with H x = -sign(x0) ||x|| e0.
    auto x = a.col(k).tail(m - k);
    const double alpha = x(0) >= 0.0 ? -best_norm : best_norm;
    Eigen::VectorXd v = x;
    v(0) -= alpha;
    const double vnorm_sq = v.squaredNorm();
    if (vnorm_sq > 0.0) {
      for (Index j = k + 1; j < p; ++j) {
        auto col = a.col(j).tail(m - k);
        col -= v * (2.0 * v.dot(col) / vnorm_sq);
      }
      auto ytail = qty.tail(m - k);
      ytail -= v * (2.0 * v.dot(ytail) / vnorm_sq);
    }
    x.setZero();
    x(0) = alpha;
    min_pivot = std::min(min_pivot, std::abs(alpha));
  }

  // Back substitution on the upper-triangular R.
  Eigen::VectorXd z(p);
  for (Index i = p - 1; i >= 0; --i) {
    double s = qty(i);
    for (Index j = i + 1; j < p; ++j) s -= a(i, j) * z(j);
    z(i) = s / a(i, i);
  }

  LeastSquaresSolution out;
  out.coefficients.resize(p);
  for (Index k = 0; k < p; ++k) out.coefficients(perm[static_cast<std::size_t>(k)]) = z(k);
  out.residuals = targets - design * out.coefficients;
  out.min_relative_pivot = largest_norm > 0.0 ? min_pivot / largest_norm : 0.0;
  return out;
}

}  // namespace surrokit
