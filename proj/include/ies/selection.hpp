#pragma once

#include "ies/rmetric.hpp"

#include <cstdint>
#include <vector>

namespace ies {

/// Coordinate sets are sorted, 1-based (coordinate k is column k-1 of Y and
/// has eigenvalue lambdas[k]).
using CoordSet = std::vector<int>;

struct PointScore {
  double r1;  // 1/2 log det(U_S^T U_S)
  double r2;  // sum of log column norms of U_S
  double rank() const { return r1 - r2; }  // log Vol_norm, <= 0
};

/// Scores the set S at point i.
PointScore point_score(const MetricField& field, Index i, const CoordSet& S);

struct ScoredSubset {
  CoordSet S;
  double R1 = 0.0;
  double R2 = 0.0;
  double lambda_sum = 0.0;
  double score = 0.0;           // R1 - R2 - zeta * lambda_sum
  Eigen::VectorXd per_point_R;  // R1(S;i) - R2(S;i); empty unless requested
  double rank_quality() const { return R1 - R2; }
};

ScoredSubset score(const MetricField& field, const Eigen::VectorXd& lambdas, const CoordSet& S,
                   double zeta, bool keep_per_point = true);

enum class SearchMethod { Exhaustive, Greedy };

struct SearchReport {
  std::vector<ScoredSubset> ranked;  // exhaustive: by score; greedy: nested prefixes
  std::vector<int> order;            // greedy addition order, empty for exhaustive
  double zeta = 0.0;
  int s = 0;
  SearchMethod method = SearchMethod::Exhaustive;
  std::uint64_t candidates = 0;
};

struct SearchOptions {
  std::uint64_t cap = 1'000'000;
  std::size_t keep = 0;  // truncate ranked to this many entries, 0 keeps all
};

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// All s-subsets of 1..m containing 1, lexicographic.
std::vector<CoordSet> candidate_sets(int m, int s, std::uint64_t cap = 1'000'000);

/// Per-set averages and per-point maxima over every candidate set of size s.
struct CandidatePool {
  int s = 0;
  std::vector<CoordSet> sets;
  Eigen::VectorXd R1, R2;        // means per set
  Eigen::VectorXd lambda_sum;    // per set
  std::vector<Index> best_set;   // argmax_S R(S;i), first set on ties
  Eigen::VectorXd best_value;    // max_S R(S;i)

  double rank_quality(std::size_t k) const { return R1[static_cast<Index>(k)] - R2[static_cast<Index>(k)]; }
  Index n() const { return best_value.size(); }
};

CandidatePool build_pool(const MetricField& field, const Eigen::VectorXd& lambdas, int s,
                         std::uint64_t cap = 1'000'000);

/// Ranks a pool at regularization zeta.
SearchReport rank_pool(const CandidatePool& pool, double zeta, std::size_t keep = 0);

SearchReport search_exhaustive(const MetricField& field, const Eigen::VectorXd& lambdas, int s,
                               double zeta, const SearchOptions& options = {});

SearchReport search_greedy(const MetricField& field, const Eigen::VectorXd& lambdas, double zeta);

/// Strict weak order: higher score first, lexicographically smaller set on ties.
bool ranks_before(const ScoredSubset& a, const ScoredSubset& b);

}  // namespace ies
