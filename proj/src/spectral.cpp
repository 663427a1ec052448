#include "ies/spectral.hpp"

#include "ies/errors.hpp"
#include "ies/lanczos.hpp"
#include "ies/parallel.hpp"

#include <cmath>
#include <sstream>

namespace ies {

double SpectralEmbedding::lambda_scale() const {
  const double eps = laplacian ? laplacian->eps : 0.0;
  return eps > 0.0 ? 4.0 / (eps * eps) : 1.0;
}

void fix_signs(Eigen::MatrixXd& Y) {
  for (Index k = 0; k < Y.cols(); ++k) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < Y.rows(); ++i) {
      if (std::abs(Y(i, k)) > best) {
        best = std::abs(Y(i, k));
        arg = i;
      }
    }
    if (Y(arg, k) < 0.0) Y.col(k) = -Y.col(k);
  }
}

SpectralEmbedding embed(std::shared_ptr<const Laplacian> laplacian, Index m,
                        const EmbedOptions& options) {
  if (!laplacian) fail(ErrorKind::Parameter, "no Laplacian given");
  const Laplacian& lap = *laplacian;
  const Index n = lap.n;
  if (m < 1) fail(ErrorKind::Parameter, "m must be >= 1");
  if (m + 1 > n)
    fail(ErrorKind::Parameter, "m + 1 = " + std::to_string(m + 1) + " exceeds n = " +
                                   std::to_string(n));
  const Index components = connected_components(lap.L_tilde);
  if (components > 1)
    fail(ErrorKind::Topology, "graph has " + std::to_string(components) +
                                  " connected components; increase eps or remove outliers");

  // S = W~^-1/2 L~ W~^-1/2 is symmetric with eigenvalues 1 - lambda.
  const Eigen::VectorXd isqrt = lap.w_tilde.cwiseSqrt().cwiseInverse();
  SparseMatrix S = lap.L_tilde;
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(S, i); it; ++it)
      it.valueRef() = it.value() * isqrt[i] * isqrt[it.col()];

  const int nev = static_cast<int>(m + 1);
  Eigen::VectorXd mu;
  Eigen::MatrixXd V;
  const bool dense = options.method == EigenMethod::Dense ||
                     (options.method == EigenMethod::Auto && n < options.dense_below);
  if (dense) {
    const Eigen::MatrixXd Sd = Eigen::MatrixXd(S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Sd + Sd.transpose()));
    if (eig.info() != Eigen::Success) fail(ErrorKind::Numeric, "dense eigensolver failed");
    mu = eig.eigenvalues().reverse().head(nev);
    V = eig.eigenvectors().rowwise().reverse().leftCols(nev);
  } else {
    const double cond = lap.w_tilde.maxCoeff() / lap.w_tilde.minCoeff();
    LanczosOptions lo;
    lo.seed = options.seed;
    lo.tol = std::max(1e-14, 0.1 * options.tol / std::sqrt(cond));
    auto op = [&S](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      y.resize(x.size());
      parallel_for(static_cast<std::size_t>(S.rows()), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          double acc = 0.0;
          for (SparseMatrix::InnerIterator it(S, static_cast<Index>(i)); it; ++it)
            acc += it.value() * x[it.col()];
          y[static_cast<Index>(i)] = acc;
        }
      }, 2048);
    };
    LanczosResult lr = lanczos_largest(op, n, nev, lo);
    if (!lr.converged) {
      std::ostringstream msg;
      msg << "Lanczos did not converge after " << lr.restarts
          << " restarts; max residual " << lr.residuals.maxCoeff();
      fail(ErrorKind::Numeric, msg.str());
    }
    mu = lr.values;
    V = lr.vectors;
  }

  Eigen::MatrixXd phi = isqrt.asDiagonal() * V;
  for (Index k = 0; k < phi.cols(); ++k) phi.col(k).normalize();
  fix_signs(phi);

  SpectralEmbedding out;
  out.laplacian = laplacian;
  out.m = m;
  out.lambdas.resize(nev);
  for (int k = 0; k < nev; ++k) out.lambdas[k] = std::max(0.0, 1.0 - mu[k]);
  for (int k = 1; k < nev; ++k)
    out.lambdas[k] = std::max(out.lambdas[k], out.lambdas[k - 1]);

  out.residuals.resize(nev);
  const Eigen::MatrixXd Lphi = lap.L * phi;
  for (int k = 0; k < nev; ++k) {
    out.residuals[k] = (Lphi.col(k) - out.lambdas[k] * phi.col(k)).norm();
    if (out.residuals[k] > options.tol * std::max(1.0, out.lambdas[k])) {
      std::ostringstream msg;
      msg << "eigenpair " << k << " residual " << out.residuals[k] << " exceeds tolerance "
          << options.tol;
      fail(ErrorKind::Numeric, msg.str());
    }
  }
  out.Y = phi.rightCols(m);
  return out;
}

}  // namespace ies
