#pragma once

#include "ies/spectral.hpp"

#include <vector>

namespace ies {

/// Per-point rank-d co-metric H(i) = U(i) diag(Sigma(i)) U(i)^T of the embedding.
class MetricField {
 public:
  MetricField() = default;
  MetricField(Index n, Index m, Index d);

  Index n() const { return n_; }
  Index m() const { return m_; }
  Index d() const { return d_; }

  /// m x d orthonormal basis at point i.
  auto U(Index i) const { return U_.middleCols(i * d_, d_); }
  auto U(Index i) { return U_.middleCols(i * d_, d_); }
  /// d singular values at point i, nonincreasing and positive.
  auto Sigma(Index i) const { return Sigma_.col(i); }
  auto Sigma(Index i) { return Sigma_.col(i); }

  Eigen::MatrixXd H(Index i) const;
  /// Pseudo-inverse of H(i).
  Eigen::MatrixXd G(Index i) const;

  /// Points whose d-th eigenvalue fell below 1e-12 of the largest.
  const std::vector<Index>& rank_warnings() const { return rank_warnings_; }
  std::vector<Index>& rank_warnings() { return rank_warnings_; }

 private:
  Index n_ = 0, m_ = 0, d_ = 0;
  Eigen::MatrixXd U_;      // m x (n d)
  Eigen::MatrixXd Sigma_;  // d x n
  std::vector<Index> rank_warnings_;
};

/// Untruncated co-metric sum_j P_ij (y_j - y_i)(y_j - y_i)^T, where P = I - L.
Eigen::MatrixXd raw_cometric(const Eigen::MatrixXd& Y, const Laplacian& lap, Index i);

MetricField rmetric(const SpectralEmbedding& embedding, const Laplacian& lap, Index d);
MetricField rmetric(const SpectralEmbedding& embedding, Index d);

/// Rows of U(i) at the 1-based coordinates S, one |S| x d block per point.
std::vector<Eigen::MatrixXd> submatrix_basis(const MetricField& field,
                                             const std::vector<int>& S);

}  // namespace ies
