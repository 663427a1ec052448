#pragma once

#include "ies/dataset.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ies {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Truncated Gaussian kernel K_ij = exp(-|x_i - x_j|^2 / eps^2) for |x_i - x_j| <= radius.
struct SparseKernel {
  Index n = 0;
  double eps = 0.0;
  double c = 3.0;
  double radius = 0.0;
  SparseMatrix K;
  std::vector<Index> isolated;        // points whose only neighbor is themselves
  std::vector<std::string> warnings;
};

/// Renormalized graph Laplacian L = I - W~^-1 W^-1 K W^-1.
struct Laplacian {
  Index n = 0;
  double eps = 0.0;
  SparseMatrix L;
  SparseMatrix L_tilde;   // W^-1 K W^-1
  Eigen::VectorXd w;      // K 1
  Eigen::VectorXd w_tilde;  // L_tilde 1
};

SparseKernel build_kernel(const Dataset& ds, double eps, double c = 3.0);

Laplacian build_laplacian(const SparseKernel& kernel);

/// Median k-th nearest neighbor distance over at most 2000 points chosen by seed.
double bandwidth_heuristic(const Dataset& ds, Index k, std::uint64_t seed = 0);

/// Indices of at most `limit` distinct points chosen uniformly by seed, ascending.
std::vector<Index> subsample_indices(Index n, Index limit, std::uint64_t seed);

/// Number of connected components of the sparsity graph of a symmetric matrix.
Index connected_components(const SparseMatrix& adjacency);

/// Coordinate-format dump: header "i,j,value", one nonzero per line, 0-based.
void write_coo_csv(const SparseMatrix& matrix, const std::filesystem::path& path);

}  // namespace ies
