#include "ies/lanczos.hpp"

#include "ies/errors.hpp"
#include "ies/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ies {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthogonalizes w against V(:, 0:k) with two passes of classical Gram-Schmidt.
// Accumulated projection coefficients are written to coeffs.
void orthogonalize(const MatrixXd& V, Index k, VectorXd& w, VectorXd& coeffs) {
  coeffs = VectorXd::Zero(k);
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXd h = V.leftCols(k).transpose() * w;
    w.noalias() -= V.leftCols(k) * h;
    coeffs += h;
  }
}

VectorXd random_unit(Index n, std::uint64_t seed, std::uint64_t counter) {
  CounterRng rng(seed, counter);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v / v.norm();
}

}  // namespace

LanczosResult lanczos_largest(const SymmetricOperator& op, Index n, int nev,
                              const LanczosOptions& options) {
  if (nev < 1 || nev > n) fail(ErrorKind::Parameter, "nev must satisfy 1 <= nev <= n");
  int ncv = options.basis_size > 0 ? options.basis_size : std::max(2 * nev + 1, nev + 24);
  ncv = static_cast<int>(std::min<Index>(ncv, n));
  if (ncv <= nev && ncv < n) ncv = static_cast<int>(std::min<Index>(nev + 1, n));

  LanczosResult result;
  MatrixXd V(n, ncv + 1);
  MatrixXd T = MatrixXd::Zero(ncv, ncv);
  VectorXd w(n), coeffs;
  std::uint64_t fresh = 0;

  V.col(0) = random_unit(n, options.seed, fresh++);
  Index k = 0;        // number of locked (thick-restart) columns
  double beta = 0.0;  // norm of the residual appended after column ncv-1

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    for (Index j = k; j < ncv; ++j) {
      op(V.col(j), w);
      ++result.matvecs;
      orthogonalize(V, j + 1, w, coeffs);
      T.col(j).head(j + 1) = coeffs;
      T.row(j).head(j + 1) = coeffs.transpose();
      double norm = w.norm();
      if (norm < 1e-12 * std::max(1.0, std::abs(coeffs[j]))) {
        // Invariant subspace found; continue with a fresh orthogonal direction.
        w = random_unit(n, options.seed, fresh++);
        orthogonalize(V, j + 1, w, coeffs);
        norm = w.norm();
        if (norm > 0.0) w /= norm;
        norm = 0.0;
      } else {
        w /= norm;
      }
      V.col(j + 1) = w;
      if (j + 1 < ncv) {
        T(j + 1, j) = norm;
        T(j, j + 1) = norm;
      } else {
        beta = norm;
      }
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(T);
    // eigenvalues ascending; take the tail
    const VectorXd theta = eig.eigenvalues().reverse();
    const MatrixXd Z = eig.eigenvectors().rowwise().reverse();

    VectorXd res(nev);
    bool done = true;
    for (int t = 0; t < nev; ++t) {
      res[t] = std::abs(beta * Z(ncv - 1, t));
      if (res[t] > options.tol * std::max(1.0, std::abs(theta[t]))) done = false;
    }
    if (ncv == n) done = true;  // Krylov space is the whole space

    if (done || restart == options.max_restarts) {
      result.values = theta.head(nev);
      result.vectors = V.leftCols(ncv) * Z.leftCols(nev);
      result.residuals = res;
      result.restarts = restart;
      result.converged = done;
      return result;
    }

    // Thick restart: keep the leading Ritz vectors plus the residual direction.
    const int nconv = static_cast<int>(
        std::count_if(res.data(), res.data() + nev, [&](double r) { return r <= options.tol; }));
    Index keep = std::min<Index>(nev + std::max(nconv, (ncv - nev) / 2), ncv - 1);
    keep = std::max<Index>(keep, nev);
    const MatrixXd Vk = V.leftCols(ncv) * Z.leftCols(keep);
    const VectorXd f = V.col(ncv);
    V.leftCols(keep) = Vk;
    V.col(keep) = f;
    T.setZero();
    for (Index t = 0; t < keep; ++t) {
      T(t, t) = theta[t];
      T(keep, t) = T(t, keep) = beta * Z(ncv - 1, t);
    }
    // Column `keep` is expanded next; its diagonal and coupling entries are
    // recomputed by the orthogonalization coefficients.
    k = keep;
    result.restarts = restart + 1;
  }
  return result;
}

}  // namespace ies
