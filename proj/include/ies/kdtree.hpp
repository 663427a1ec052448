#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ies {

/// Exact static k-d tree over the rows of a point matrix.
class KdTree {
 public:
  struct Neighbor {
    Eigen::Index index;
    double squared_distance;
  };

  explicit KdTree(const Eigen::MatrixXd& points, int leaf_size = 16);

  Eigen::Index size() const { return n_; }
  Eigen::Index dim() const { return dim_; }

  /// All points with distance <= radius from query, sorted by index.
  std::vector<Neighbor> radius_query(std::span<const double> query, double radius) const;

  /// The k nearest points (query itself included if it is a data point),
  /// sorted by distance then index.
  std::vector<Neighbor> knn_query(std::span<const double> query, int k) const;

  std::span<const double> point(Eigen::Index i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }

 private:
  struct Node {
    std::int32_t begin, end;      // range in order_
    std::int32_t left, right;     // children, -1 for leaves
    std::int32_t split_dim;
    double split_value;
    std::vector<double> lo, hi;   // bounding box
  };

  std::int32_t build(std::int32_t begin, std::int32_t end);
  double box_distance2(const Node& node, std::span<const double> q) const;
  double distance2(Eigen::Index i, std::span<const double> q) const;

  Eigen::Index n_;
  Eigen::Index dim_;
  int leaf_size_;
  std::vector<double> coords_;          // row-major copy
  std::vector<std::int32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace ies
