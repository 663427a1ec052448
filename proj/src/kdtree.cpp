#include "ies/kdtree.hpp"

#include "ies/errors.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace ies {

KdTree::KdTree(const Eigen::MatrixXd& points, int leaf_size)
    : n_(points.rows()), dim_(points.cols()), leaf_size_(std::max(1, leaf_size)) {
  if (n_ > std::numeric_limits<std::int32_t>::max())
    fail(ErrorKind::Parameter, "too many points for the k-d tree");
  coords_.resize(static_cast<std::size_t>(n_ * dim_));
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = 0; j < dim_; ++j)
      coords_[static_cast<std::size_t>(i * dim_ + j)] = points(i, j);
  order_.resize(static_cast<std::size_t>(n_));
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(n_); ++i) order_[i] = i;
  if (n_ > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * n_ / leaf_size_ + 2));
    build(0, static_cast<std::int32_t>(n_));
  }
}

std::int32_t KdTree::build(std::int32_t begin, std::int32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.left = node.right = -1;
  node.split_dim = 0;
  node.split_value = 0.0;
  node.lo.assign(static_cast<std::size_t>(dim_), std::numeric_limits<double>::infinity());
  node.hi.assign(static_cast<std::size_t>(dim_), -std::numeric_limits<double>::infinity());
  for (std::int32_t k = begin; k < end; ++k) {
    const double* p = coords_.data() + static_cast<std::size_t>(order_[k]) * dim_;
    for (Eigen::Index j = 0; j < dim_; ++j) {
      node.lo[j] = std::min(node.lo[j], p[j]);
      node.hi[j] = std::max(node.hi[j], p[j]);
    }
  }
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size_) return id;

  std::int32_t best_dim = 0;
  double best_spread = -1.0;
  for (Eigen::Index j = 0; j < dim_; ++j) {
    const double spread = node.hi[j] - node.lo[j];
    if (spread > best_spread) {
      best_spread = spread;
      best_dim = static_cast<std::int32_t>(j);
    }
  }
  if (best_spread <= 0.0) return id;  // all points coincide

  const std::int32_t mid = begin + (end - begin) / 2;
  auto key = [&](std::int32_t idx) {
    return coords_[static_cast<std::size_t>(idx) * dim_ + best_dim];
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::int32_t a, std::int32_t b) {
                     const double ka = key(a), kb = key(b);
                     return ka < kb || (ka == kb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].split_dim = best_dim;
  nodes_[id].split_value = key(order_[mid]);
  return id;
}

double KdTree::box_distance2(const Node& node, std::span<const double> q) const {
  double d2 = 0.0;
  for (Eigen::Index j = 0; j < dim_; ++j) {
    double diff = 0.0;
    if (q[j] < node.lo[j])
      diff = node.lo[j] - q[j];
    else if (q[j] > node.hi[j])
      diff = q[j] - node.hi[j];
    d2 += diff * diff;
  }
  return d2;
}

double KdTree::distance2(Eigen::Index i, std::span<const double> q) const {
  const double* p = coords_.data() + i * dim_;
  double d2 = 0.0;
  for (Eigen::Index j = 0; j < dim_; ++j) {
    const double diff = p[j] - q[j];
    d2 += diff * diff;
  }
  return d2;
}

std::vector<KdTree::Neighbor> KdTree::radius_query(std::span<const double> query,
                                                   double radius) const {
  if (static_cast<Eigen::Index>(query.size()) != dim_)
    fail(ErrorKind::Dimension, "query dimension does not match the tree");
  std::vector<Neighbor> out;
  if (n_ == 0) return out;
  const double r2 = radius * radius;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance2(node, query) > r2) continue;
    if (node.left < 0) {
      for (std::int32_t k = node.begin; k < node.end; ++k) {
        const double d2 = distance2(order_[k], query);
        if (d2 <= r2) out.push_back({order_[k], d2});
      }
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  return out;
}

std::vector<KdTree::Neighbor> KdTree::knn_query(std::span<const double> query, int k) const {
  if (static_cast<Eigen::Index>(query.size()) != dim_)
    fail(ErrorKind::Dimension, "query dimension does not match the tree");
  if (k < 1) fail(ErrorKind::Parameter, "k must be >= 1");
  auto worse = [](const Neighbor& a, const Neighbor& b) {
    return a.squared_distance < b.squared_distance ||
           (a.squared_distance == b.squared_distance && a.index < b.index);
  };
  // max-heap on (distance, index): top is the current k-th best
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> heap(worse);
  std::vector<std::int32_t> stack{0};
  auto bound = [&] {
    return static_cast<int>(heap.size()) < k ? std::numeric_limits<double>::infinity()
                                             : heap.top().squared_distance;
  };
  while (!stack.empty() && n_ > 0) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_distance2(node, query) > bound()) continue;
    if (node.left < 0) {
      for (std::int32_t t = node.begin; t < node.end; ++t) {
        Neighbor cand{order_[t], distance2(order_[t], query)};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(cand);
        } else if (worse(cand, heap.top())) {
          heap.pop();
          heap.push(cand);
        }
      }
    } else {
      // visit the nearer child first
      const bool go_left = query[node.split_dim] < node.split_value;
      stack.push_back(go_left ? node.right : node.left);
      stack.push_back(go_left ? node.left : node.right);
    }
  }
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace ies
