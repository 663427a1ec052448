#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace ies {

/// y = A x for a symmetric operator A.
using SymmetricOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct LanczosOptions {
  int basis_size = 0;       // 0 picks max(2 nev + 1, nev + 24)
  int max_restarts = 2000;
  double tol = 1e-11;       // residual bound |A v - theta v| <= tol * max(1, |theta|)
  std::uint64_t seed = 42;
};

struct LanczosResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns
  Eigen::VectorXd residuals;
  int restarts = 0;
  int matvecs = 0;
  bool converged = false;
};

/// Thick-restart Lanczos with full reorthogonalization for the `nev` largest
/// eigenpairs of an n x n symmetric operator.
LanczosResult lanczos_largest(const SymmetricOperator& op, Eigen::Index n, int nev,
                              const LanczosOptions& options = {});

}  // namespace ies
