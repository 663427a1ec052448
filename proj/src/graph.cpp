#include "ies/graph.hpp"

#include "ies/errors.hpp"
#include "ies/kdtree.hpp"
#include "ies/parallel.hpp"
#include "ies/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace ies {
namespace {

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

SparseKernel build_kernel(const Dataset& ds, double eps, double c) {
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::Parameter, "eps must be > 0");
  if (!(c >= 1.0) || !std::isfinite(c)) fail(ErrorKind::Parameter, "c must be >= 1");
  const Index n = ds.size();
  if (n < 1) fail(ErrorKind::Parameter, "dataset is empty");

  SparseKernel out;
  out.n = n;
  out.eps = eps;
  out.c = c;
  out.radius = c * eps;

  const double inv_eps2 = 1.0 / (eps * eps);
  std::vector<std::vector<KdTree::Neighbor>> rows(static_cast<std::size_t>(n));
  auto fill_rows = [&](auto&& query) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) rows[i] = query(static_cast<Index>(i));
    }, 64);
  };

  if (ds.dim() <= 16) {
    const KdTree tree(ds.points);
    fill_rows([&](Index i) { return tree.radius_query(tree.point(i), out.radius); });
  } else {
    const Eigen::MatrixXd pts = ds.points;
    const double r2 = out.radius * out.radius;
    fill_rows([&](Index i) {
      std::vector<KdTree::Neighbor> nb;
      for (Index j = 0; j < n; ++j) {
        const double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
        if (d2 <= r2) nb.push_back({j, d2});
      }
      return nb;
    });
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  triplets.reserve(total);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (const auto& nb : r)
      triplets.emplace_back(i, nb.index,
                            nb.index == i ? 1.0 : std::exp(-nb.squared_distance * inv_eps2));
    if (r.size() <= 1) out.isolated.push_back(i);
  }
  out.K.resize(n, n);
  out.K.setFromTriplets(triplets.begin(), triplets.end());
  out.K.makeCompressed();

  if (!out.isolated.empty()) {
    out.warnings.push_back(std::to_string(out.isolated.size()) +
                           " point(s) have no neighbor within radius " +
                           std::to_string(out.radius) + " (first: point " +
                           std::to_string(out.isolated.front()) + "); graph is disconnected");
  }
  return out;
}

Laplacian build_laplacian(const SparseKernel& kernel) {
  const SparseMatrix& K = kernel.K;
  const Index n = K.rows();
  if (K.cols() != n) fail(ErrorKind::Dimension, "kernel matrix is not square");

  Laplacian out;
  out.n = n;
  out.eps = kernel.eps;

  out.w.resize(n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(K, i); it; ++it) sum += it.value();
    if (!(sum > 0.0))
      fail(ErrorKind::Topology, "point " + std::to_string(i) + " has zero degree");
    out.w[i] = sum;
  }

  out.L_tilde = K;
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(out.L_tilde, i); it; ++it)
      it.valueRef() = it.value() / out.w[i] / out.w[it.col()];

  out.w_tilde.resize(n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(out.L_tilde, i); it; ++it) sum += it.value();
    if (!(sum > 0.0))
      fail(ErrorKind::Topology, "point " + std::to_string(i) + " has zero renormalized degree");
    out.w_tilde[i] = sum;
  }

  // L = I - W~^-1 L~, keeping the sparsity pattern of K (which contains the diagonal).
  out.L = out.L_tilde;
  for (Index i = 0; i < n; ++i) {
    bool has_diag = false;
    for (SparseMatrix::InnerIterator it(out.L, i); it; ++it) {
      const double p = it.value() / out.w_tilde[i];
      if (it.col() == i) {
        it.valueRef() = 1.0 - p;
        has_diag = true;
      } else {
        it.valueRef() = -p;
      }
    }
    if (!has_diag) fail(ErrorKind::Parameter, "kernel diagonal entry missing at point " +
                                                  std::to_string(i));
  }
  return out;
}

std::vector<Index> subsample_indices(Index n, Index limit, std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (n <= limit) return idx;
  // Partial Fisher-Yates: the first `limit` slots become a uniform sample.
  CounterRng rng(seed, 0x5EEDULL);
  for (Index i = 0; i < limit; ++i) {
    const Index j = i + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(limit));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double bandwidth_heuristic(const Dataset& ds, Index k, std::uint64_t seed) {
  const Index n = ds.size();
  if (n < 2) fail(ErrorKind::Parameter, "bandwidth heuristic needs at least 2 points");
  if (k < 1 || k >= n) fail(ErrorKind::Parameter, "k must satisfy 1 <= k < n");
  const std::vector<Index> sample = subsample_indices(n, 2000, seed);
  std::vector<double> kth(sample.size());

  if (ds.dim() <= 16) {
    const KdTree tree(ds.points);
    parallel_for(sample.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t s = begin; s < end; ++s) {
        // k+1 because the query point is its own nearest neighbor
        const auto nb = tree.knn_query(tree.point(sample[s]), static_cast<int>(k + 1));
        kth[s] = std::sqrt(nb.back().squared_distance);
      }
    }, 16);
  } else {
    parallel_for(sample.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> d2(static_cast<std::size_t>(n));
      for (std::size_t s = begin; s < end; ++s) {
        for (Index j = 0; j < n; ++j)
          d2[static_cast<std::size_t>(j)] =
              (ds.points.row(sample[s]) - ds.points.row(j)).squaredNorm();
        std::nth_element(d2.begin(), d2.begin() + k, d2.end());
        kth[s] = std::sqrt(d2[static_cast<std::size_t>(k)]);
      }
    }, 16);
  }
  return median_of(std::move(kth));
}

Index connected_components(const SparseMatrix& adjacency) {
  const Index n = adjacency.rows();
  std::vector<Index> label(static_cast<std::size_t>(n), -1);
  std::vector<Index> stack;
  Index components = 0;
  for (Index start = 0; start < n; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    label[static_cast<std::size_t>(start)] = components;
    stack.push_back(start);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (SparseMatrix::InnerIterator it(adjacency, v); it; ++it) {
        const Index u = it.col();
        if (it.value() != 0.0 && label[static_cast<std::size_t>(u)] < 0) {
          label[static_cast<std::size_t>(u)] = components;
          stack.push_back(u);
        }
      }
    }
    ++components;
  }
  return components;
}

void write_coo_csv(const SparseMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << "i,j,value\n" << std::setprecision(17);
  for (Index i = 0; i < matrix.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(matrix, i); it; ++it)
      out << i << ',' << it.col() << ',' << it.value() << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace ies
