#pragma once

#include "ies/selection.hpp"

#include <optional>
#include <vector>

namespace ies {

/// One piece of the upper envelope l(zeta) = max_S R(S) - zeta lambda_sum(S).
struct PathSegment {
  double zeta_lo = 0.0;
  double zeta_hi = 0.0;
  std::size_t candidate = 0;  // index into the candidate list
  CoordSet S;
  double intercept = 0.0;     // R(S)
  double slope = 0.0;         // -lambda_sum(S)
};

struct RegularizationPath {
  std::vector<PathSegment> segments;  // decreasing zeta, partitioning [0, zeta_max)
  double zeta_max = 0.0;

  /// Index of the segment whose interval holds zeta.
  std::size_t segment_at(double zeta) const;
};

struct PathLine {
  CoordSet S;
  double intercept;
  double lambda_sum;
};

std::vector<PathLine> path_lines(const CandidatePool& pool);

/// Smallest power of two (from 2^-40) at which the minimum-lambda_sum line is the strict maximizer.
double auto_zeta_max(const std::vector<PathLine>& lines);

/// Exact upper envelope over [0, zeta_max). zeta_max <= 0 selects it automatically;
/// a zeta_max too small for [s] to be the top set is doubled until it is.
RegularizationPath build_path(const std::vector<PathLine>& lines, double zeta_max = 0.0);

struct RegretDistribution {
  CoordSet S;
  Eigen::VectorXd regrets;
  double percentile_alpha = 0.75;
  double percentile_value = 0.0;
  double nonnegative_fraction = 0.0;
};

/// Nearest-rank percentile: the ceil(alpha n)-th smallest value.
double nearest_rank_percentile(const Eigen::VectorXd& values, double alpha);

/// Leave-one-out regret of the pool's set `candidate` against each point's best set.
RegretDistribution regret(const MetricField& field, const CandidatePool& pool,
                          std::size_t candidate, double alpha = 0.75);

struct Selection {
  CoordSet S;
  double zeta_star = 0.0;
  double zeta_hi = 0.0;   // zeta'
  double zeta_lo = 0.0;   // zeta''
  std::size_t segment = 0;
  std::vector<RegretDistribution> examined;  // in walk order, last one accepted
};

/// Walks the path from high to low zeta and accepts the first set whose
/// alpha-percentile regret is <= 0.
Selection select(const RegularizationPath& path, const MetricField& field,
                 const CandidatePool& pool, double alpha = 0.75);

}  // namespace ies
