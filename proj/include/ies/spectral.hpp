#pragma once

#include "ies/graph.hpp"

#include <memory>

namespace ies {

enum class EigenMethod { Auto, Lanczos, Dense };

struct EmbedOptions {
  double tol = 1e-8;  // residual bound |L phi - lambda phi| <= tol * max(1, lambda)
  EigenMethod method = EigenMethod::Auto;
  Index dense_below = 512;
  std::uint64_t seed = 42;
};

/// Diffusion-maps embedding: eigenpairs 1..m of L, with phi_0 dropped.
struct SpectralEmbedding {
  Eigen::MatrixXd Y;         // n x m, unit-norm columns phi_1..phi_m
  Eigen::VectorXd lambdas;   // m + 1 values, lambda_0 = 0 first
  Eigen::VectorXd residuals; // m + 1 residual norms in the unsymmetrized problem
  std::shared_ptr<const Laplacian> laplacian;
  Index m = 0;

  Index n() const { return Y.rows(); }
  /// Multiplier turning graph eigenvalues into Laplace-Beltrami units (4 / eps^2).
  double lambda_scale() const;
};

SpectralEmbedding embed(std::shared_ptr<const Laplacian> laplacian, Index m,
                        const EmbedOptions& options = {});

/// Flips each column so its largest-magnitude entry is positive (first one on ties).
void fix_signs(Eigen::MatrixXd& Y);

}  // namespace ies
