#pragma once

#include "ies/spectral.hpp"

#include <vector>

namespace ies {

/// Leave-one-out local linear regression coordinate ranking.
struct LlrReport {
  Eigen::VectorXd r;          // r[k-1] is the error of coordinate k, r_1 = 1
  std::vector<int> order;     // 1-based coordinates by r descending, ties by index
  Eigen::VectorXd bandwidth;  // h used when predicting coordinate k (NaN for k = 1)

  /// First k entries of `order`, sorted.
  std::vector<int> top(std::size_t k) const;
};

struct LlrOptions {
  Index max_coords = 0;        // rank only coordinates 1..max_coords, 0 means all
  Index median_sample = 2000;  // points used for the median pairwise distance
};

/// Gaussian weights exp(-|x_j - x_i|^2 / h^2), with weight 0 on j = i.
Eigen::VectorXd llr_weights(const Eigen::MatrixXd& X, Index i, double h);

/// Leave-one-out local linear prediction of y at point i from predictors X.
double llr_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Index i, double h);

/// Median pairwise distance between rows of X over an evenly strided subsample.
double median_pairwise_distance(const Eigen::MatrixXd& X, Index max_points);

LlrReport llr_coord_search(const Eigen::MatrixXd& Y, const LlrOptions& options = {});
LlrReport llr_coord_search(const SpectralEmbedding& embedding, const LlrOptions& options = {});

}  // namespace ies
