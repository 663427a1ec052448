#include "ies/rmetric.hpp"

#include "ies/errors.hpp"
#include "ies/parallel.hpp"

#include <algorithm>

namespace ies {

MetricField::MetricField(Index n, Index m, Index d)
    : n_(n), m_(m), d_(d), U_(Eigen::MatrixXd::Zero(m, n * d)), Sigma_(Eigen::MatrixXd::Zero(d, n)) {}

Eigen::MatrixXd MetricField::H(Index i) const {
  return U(i) * Sigma(i).asDiagonal() * U(i).transpose();
}

Eigen::MatrixXd MetricField::G(Index i) const {
  return U(i) * Sigma(i).cwiseInverse().asDiagonal() * U(i).transpose();
}

Eigen::MatrixXd raw_cometric(const Eigen::MatrixXd& Y, const Laplacian& lap, Index i) {
  const Index m = Y.cols();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd diff(m);
  for (SparseMatrix::InnerIterator it(lap.L, i); it; ++it) {
    const Index j = it.col();
    if (j == i) continue;
    diff = Y.row(j).transpose() - Y.row(i).transpose();
    H.selfadjointView<Eigen::Lower>().rankUpdate(diff, -it.value());
  }
  return H.selfadjointView<Eigen::Lower>();
}

MetricField rmetric(const SpectralEmbedding& embedding, const Laplacian& lap, Index d) {
  const Eigen::MatrixXd& Y = embedding.Y;
  const Index n = Y.rows(), m = Y.cols();
  if (d < 1 || d > m) fail(ErrorKind::Parameter, "d must satisfy 1 <= d <= m");
  if (lap.n != n) fail(ErrorKind::Dimension, "Laplacian size does not match the embedding");

  MetricField field(n, m, d);
  std::vector<unsigned char> deficient(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    for (std::size_t s = begin; s < end; ++s) {
      const Index i = static_cast<Index>(s);
      eig.compute(raw_cometric(Y, lap, i));
      const Eigen::VectorXd& ev = eig.eigenvalues();  // ascending
      const double top = std::max(ev[m - 1], 0.0);
      const double floor = top > 0.0 ? 1e-12 * top : 1e-300;
      for (Index k = 0; k < d; ++k) {
        double sigma = ev[m - 1 - k];
        if (sigma < floor) {
          sigma = floor;
          deficient[s] = 1;
        }
        field.Sigma(i)[k] = sigma;
        field.U(i).col(k) = eig.eigenvectors().col(m - 1 - k);
      }
    }
  }, 64);
  for (Index i = 0; i < n; ++i)
    if (deficient[static_cast<std::size_t>(i)]) field.rank_warnings().push_back(i);
  return field;
}

MetricField rmetric(const SpectralEmbedding& embedding, Index d) {
  if (!embedding.laplacian) fail(ErrorKind::Parameter, "embedding carries no Laplacian");
  return rmetric(embedding, *embedding.laplacian, d);
}

std::vector<Eigen::MatrixXd> submatrix_basis(const MetricField& field,
                                             const std::vector<int>& S) {
  if (static_cast<Index>(S.size()) < field.d())
    fail(ErrorKind::Dimension, "subset smaller than d");
  for (int k : S)
    if (k < 1 || k > field.m())
      fail(ErrorKind::Parameter, "coordinate " + std::to_string(k) + " outside 1..m");
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(field.n()));
  for (Index i = 0; i < field.n(); ++i) {
    Eigen::MatrixXd block(static_cast<Index>(S.size()), field.d());
    for (std::size_t r = 0; r < S.size(); ++r) block.row(static_cast<Index>(r)) = field.U(i).row(S[r] - 1);
    out[static_cast<std::size_t>(i)] = std::move(block);
  }
  return out;
}

}  // namespace ies
