#include "ies/baseline.hpp"

#include "ies/errors.hpp"
#include "ies/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ies {
namespace {

// Local linear fit centered at x_i; returns the intercept.
double local_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Index i,
                 const Eigen::VectorXd& w) {
  const Index n = X.rows(), p = X.cols();
  Eigen::MatrixXd Z(n, p + 1);
  Z.col(0).setOnes();
  Z.rightCols(p) = X.rowwise() - X.row(i);
  const Eigen::MatrixXd ZW = Z.array().colwise() * w.array();
  Eigen::MatrixXd A = ZW.transpose() * Z;
  const Eigen::VectorXd b = ZW.transpose() * y;
  const double ridge = 1e-10 * A.trace();
  A.diagonal().array() += ridge > 0.0 ? ridge : std::numeric_limits<double>::min();
  return A.ldlt().solve(b)[0];
}

}  // namespace

std::vector<int> LlrReport::top(std::size_t k) const {
  std::vector<int> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size())));
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd llr_weights(const Eigen::MatrixXd& X, Index i, double h) {
  Eigen::VectorXd w = (-(X.rowwise() - X.row(i)).rowwise().squaredNorm() / (h * h)).array().exp();
  w[i] = 0.0;
  return w;
}

double llr_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Index i, double h) {
  return local_fit(X, y, i, llr_weights(X, i, h));
}

double median_pairwise_distance(const Eigen::MatrixXd& X, Index max_points) {
  const Index n = X.rows();
  if (n < 2) fail(ErrorKind::Parameter, "need at least 2 points");
  const Index stride = std::max<Index>(1, (n + max_points - 1) / max_points);
  std::vector<Index> idx;
  for (Index i = 0; i < n; i += stride) idx.push_back(i);
  std::vector<double> dist;
  dist.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      dist.push_back((X.row(idx[a]) - X.row(idx[b])).norm());
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  if (dist.size() % 2 == 1) return dist[mid];
  const double upper = dist[mid];
  const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

LlrReport llr_coord_search(const Eigen::MatrixXd& Y, const LlrOptions& options) {
  const Index n = Y.rows();
  const Index m = options.max_coords > 0 ? std::min(options.max_coords, Y.cols()) : Y.cols();
  if (m < 2) fail(ErrorKind::Parameter, "LLR search needs m >= 2");
  if (n < 3) fail(ErrorKind::Parameter, "LLR search needs at least 3 points");

  LlrReport report;
  report.r = Eigen::VectorXd::Ones(m);
  report.bandwidth = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
  for (Index s = 1; s < m; ++s) {
    const Eigen::MatrixXd X = Y.leftCols(s);
    const Eigen::VectorXd y = Y.col(s);
    const double h = median_pairwise_distance(X, options.median_sample) / 3.0;
    if (!(h > 0.0)) fail(ErrorKind::Numeric, "zero LLR bandwidth at coordinate " + std::to_string(s + 1));
    report.bandwidth[s] = h;
    Eigen::VectorXd pred(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const Index i = static_cast<Index>(t);
        pred[i] = local_fit(X, y, i, llr_weights(X, i, h));
      }
    }, 16);
    const double denom = y.squaredNorm();
    report.r[s] = denom > 0.0 ? std::sqrt((pred - y).squaredNorm() / denom) : 0.0;
  }
  report.order.resize(static_cast<std::size_t>(m));
  std::iota(report.order.begin(), report.order.end(), 1);
  std::stable_sort(report.order.begin(), report.order.end(),
                   [&](int a, int b) { return report.r[a - 1] > report.r[b - 1]; });
  return report;
}

LlrReport llr_coord_search(const SpectralEmbedding& embedding, const LlrOptions& options) {
  return llr_coord_search(embedding.Y, options);
}

}  // namespace ies
