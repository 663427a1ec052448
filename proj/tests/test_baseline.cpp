#include "doctest.h"

#include "ies/baseline.hpp"
#include "ies/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ies;

namespace {

// Naive leave-one-out local linear regression, written from scratch.
double naive_r(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double h) {
  const Index n = X.rows(), p = X.cols();
  double num = 0.0;
  for (Index i = 0; i < n; ++i) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p + 1, p + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      Eigen::VectorXd z(p + 1);
      z[0] = 1.0;
      for (Index c = 0; c < p; ++c) z[c + 1] = X(j, c) - X(i, c);
      const double w = std::exp(-(X.row(j) - X.row(i)).squaredNorm() / (h * h));
      A += w * z * z.transpose();
      b += w * y[j] * z;
    }
    A.diagonal().array() += 1e-10 * A.trace();
    const double pred = A.ldlt().solve(b)[0];
    num += (pred - y[i]) * (pred - y[i]);
  }
  return std::sqrt(num / y.squaredNorm());
}

}  // namespace

TEST_CASE("affine coordinate is predictable") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd Y(300, 2);
  for (Index i = 0; i < 300; ++i) {
    Y(i, 0) = u(rng);
    Y(i, 1) = 0.7 * Y(i, 0) - 0.2;
  }
  const LlrReport r = llr_coord_search(Y);
  CHECK(r.r[0] == 1.0);
  CHECK(r.r[1] <= 0.05);
  CHECK(r.order == std::vector<int>{1, 2});
}

TEST_CASE("high-frequency strip mode is unpredictable from the long mode") {
  const Dataset ds = generate(Manifold::D1, 500, 0.0, 2);
  Eigen::MatrixXd Y(500, 2);
  for (Index i = 0; i < 500; ++i) {
    Y(i, 0) = std::cos(std::numbers::pi * (ds.points(i, 1) + 4.0 * std::numbers::pi) / (8.0 * std::numbers::pi));
    Y(i, 1) = std::cos(std::numbers::pi * (ds.points(i, 0) + 2.0) / 4.0);
  }
  const LlrReport r = llr_coord_search(Y);
  const double h = median_pairwise_distance(Y.leftCols(1), 2000) / 3.0;
  CHECK(r.bandwidth[1] == doctest::Approx(h));
  CHECK(r.r[1] == doctest::Approx(naive_r(Y.leftCols(1), Y.col(1), h)).epsilon(1e-9));
  CHECK(r.r[1] > 0.8);
}

TEST_CASE("naive oracle on three coordinates") {
  const Dataset ds = generate(Manifold::D3, 200, 0.05, 6);
  Eigen::MatrixXd Y = ds.points;
  const LlrReport r = llr_coord_search(Y);
  for (Index s = 1; s < 3; ++s) {
    const double h = median_pairwise_distance(Y.leftCols(s), 2000) / 3.0;
    CHECK(r.r[s] == doctest::Approx(naive_r(Y.leftCols(s), Y.col(s), h)).epsilon(1e-9));
  }
}

TEST_CASE("leave-one-out weights exclude the point itself") {
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd X(20, 2);
  for (Index i = 0; i < 20; ++i) X.row(i) << nd(rng), nd(rng);
  for (Index i = 0; i < 20; ++i) {
    const Eigen::VectorXd w = llr_weights(X, i, 0.5);
    CHECK(w[i] == 0.0);
    CHECK(w.sum() > 0.0);
  }
}

TEST_CASE("errors are invariant to rescaling a coordinate") {
  const Dataset ds = generate(Manifold::D3, 200, 0.05, 7);
  Eigen::MatrixXd Y = ds.points;
  const LlrReport a = llr_coord_search(Y);
  Y.col(2) *= 5.0;
  const LlrReport b = llr_coord_search(Y);
  CHECK(b.r[2] == doctest::Approx(a.r[2]).epsilon(1e-9));
}

TEST_CASE("order is a permutation and top sets are sorted") {
  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd Y(100, 4);
  for (Index i = 0; i < 100; ++i)
    for (Index c = 0; c < 4; ++c) Y(i, c) = nd(rng);
  const LlrReport r = llr_coord_search(Y);
  std::vector<int> sorted = r.order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 3, 4});
  for (std::size_t k = 1; k < r.order.size(); ++k) CHECK(r.r[r.order[k - 1] - 1] >= r.r[r.order[k] - 1]);
  const auto top = r.top(3);
  CHECK(std::is_sorted(top.begin(), top.end()));
  CHECK_THROWS_AS(llr_coord_search(Eigen::MatrixXd(Y.leftCols(1))), Error);
}

TEST_CASE("max_coords limits the ranking") {
  const Dataset ds = generate(Manifold::D3, 150, 0.05, 7);
  LlrOptions opt;
  opt.max_coords = 2;
  const LlrReport r = llr_coord_search(ds.points, opt);
  CHECK(r.r.size() == 2);
  CHECK(r.order.size() == 2);
}
