#include "ies/selection.hpp"

#include "ies/errors.hpp"
#include "ies/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ies {
namespace {

constexpr double kDetFloor = 1e-300;
constexpr double kNormFloor = 1e-150;

void check_set(const MetricField& field, const CoordSet& S) {
  if (static_cast<Index>(S.size()) < field.d())
    fail(ErrorKind::Dimension, "|S| = " + std::to_string(S.size()) + " is below d = " +
                                   std::to_string(field.d()));
  if (S.empty() || S.front() != 1) fail(ErrorKind::Constraint, "coordinate 1 must be in S");
  for (std::size_t k = 0; k < S.size(); ++k) {
    if (S[k] < 1 || S[k] > field.m())
      fail(ErrorKind::Parameter, "coordinate " + std::to_string(S[k]) + " outside 1..m");
    if (k > 0 && S[k] <= S[k - 1]) fail(ErrorKind::Parameter, "S must be strictly increasing");
  }
}

void check_lambdas(const MetricField& field, const Eigen::VectorXd& lambdas) {
  if (lambdas.size() != field.m() + 1)
    fail(ErrorKind::Dimension, "expected m + 1 eigenvalues");
}

double lambda_sum(const Eigen::VectorXd& lambdas, const CoordSet& S) {
  double sum = 0.0;
  for (int k : S) sum += lambdas[k];
  return sum;
}

CoordSet sorted_union(CoordSet S, int k) {
  S.insert(std::upper_bound(S.begin(), S.end(), k), k);
  return S;
}

}  // namespace

bool ranks_before(const ScoredSubset& a, const ScoredSubset& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.S < b.S;
}

PointScore point_score(const MetricField& field, Index i, const CoordSet& S) {
  const Index d = field.d();
  const auto U = field.U(i);
  const int s = static_cast<int>(S.size());

  // Correlation matrix of the columns of U_S, factored in place.
  double small[16 * 16];
  std::vector<double> large;
  double* C = small;
  if (d > 16) {
    large.resize(static_cast<std::size_t>(d * d));
    C = large.data();
  }
  double norms_small[16];
  std::vector<double> norms_large;
  double* norms = norms_small;
  if (d > 16) {
    norms_large.resize(static_cast<std::size_t>(d));
    norms = norms_large.data();
  }

  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b <= a; ++b) {
      double g = 0.0;
      for (int r = 0; r < s; ++r) g += U(S[r] - 1, a) * U(S[r] - 1, b);
      C[a * d + b] = g;
    }
  }
  PointScore out{0.0, 0.0};
  bool degenerate = false;
  for (Index a = 0; a < d; ++a) {
    norms[a] = std::sqrt(C[a * d + a]);
    out.r2 += std::log(std::max(norms[a], kNormFloor));
    if (!(norms[a] > 0.0)) degenerate = true;
  }

  double det = 0.0;
  if (!degenerate) {
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b <= a; ++b) C[a * d + b] /= norms[a] * norms[b];
    // Cholesky pivots of the lower triangle give the determinant.
    det = 1.0;
    for (Index j = 0; j < d && det > 0.0; ++j) {
      double pivot = C[j * d + j];
      for (Index k = 0; k < j; ++k) pivot -= C[j * d + k] * C[j * d + k];
      if (!(pivot > 0.0)) {
        det = 0.0;
        break;
      }
      det *= pivot;
      const double root = std::sqrt(pivot);
      C[j * d + j] = root;
      for (Index a = j + 1; a < d; ++a) {
        double v = C[a * d + j];
        for (Index k = 0; k < j; ++k) v -= C[a * d + k] * C[j * d + k];
        C[a * d + j] = v / root;
      }
    }
  }
  const double log_vol = 0.5 * std::log(std::clamp(det, kDetFloor, 1.0));
  out.r1 = out.r2 + log_vol;
  return out;
}

ScoredSubset score(const MetricField& field, const Eigen::VectorXd& lambdas, const CoordSet& S,
                   double zeta, bool keep_per_point) {
  check_set(field, S);
  check_lambdas(field, lambdas);
  if (!(zeta >= 0.0)) fail(ErrorKind::Parameter, "zeta must be >= 0");
  const Index n = field.n();
  Eigen::VectorXd r1(n), r2(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const PointScore p = point_score(field, static_cast<Index>(i), S);
      r1[static_cast<Index>(i)] = p.r1;
      r2[static_cast<Index>(i)] = p.r2;
    }
  });
  ScoredSubset out;
  out.S = S;
  double s1 = 0.0, s2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    s1 += r1[i];
    s2 += r2[i];
  }
  out.R1 = s1 / static_cast<double>(n);
  out.R2 = s2 / static_cast<double>(n);
  out.lambda_sum = lambda_sum(lambdas, S);
  out.score = out.R1 - out.R2 - zeta * out.lambda_sum;
  if (keep_per_point) out.per_point_R = r1 - r2;
  return out;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    result = result * (n - k + j) / j;
    if (result > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(result);
}

std::vector<CoordSet> candidate_sets(int m, int s, std::uint64_t cap) {
  if (s < 1 || s > m) fail(ErrorKind::Parameter, "s must satisfy 1 <= s <= m");
  const std::uint64_t count = binomial(static_cast<std::uint64_t>(m - 1),
                                       static_cast<std::uint64_t>(s - 1));
  if (count > cap)
    fail(ErrorKind::Refusal, std::to_string(count) + " candidate sets exceed the cap of " +
                                 std::to_string(cap) + "; use the greedy search instead");
  std::vector<CoordSet> out;
  out.reserve(static_cast<std::size_t>(count));
  CoordSet S(static_cast<std::size_t>(s));
  S[0] = 1;
  for (int k = 1; k < s; ++k) S[static_cast<std::size_t>(k)] = k + 1;
  while (true) {
    out.push_back(S);
    int pos = s - 1;
    while (pos >= 1 && S[static_cast<std::size_t>(pos)] == m - (s - 1 - pos)) --pos;
    if (pos < 1) break;
    ++S[static_cast<std::size_t>(pos)];
    for (int k = pos + 1; k < s; ++k)
      S[static_cast<std::size_t>(k)] = S[static_cast<std::size_t>(k - 1)] + 1;
  }
  return out;
}

CandidatePool build_pool(const MetricField& field, const Eigen::VectorXd& lambdas, int s,
                         std::uint64_t cap) {
  check_lambdas(field, lambdas);
  if (s < field.d()) fail(ErrorKind::Dimension, "s must be >= d");
  if (s > field.m()) fail(ErrorKind::Parameter, "s must be <= m");
  const Index n = field.n();

  CandidatePool pool;
  pool.s = s;
  pool.sets = candidate_sets(static_cast<int>(field.m()), s, cap);
  const std::size_t count = pool.sets.size();
  pool.R1.resize(static_cast<Index>(count));
  pool.R2.resize(static_cast<Index>(count));
  pool.lambda_sum.resize(static_cast<Index>(count));
  pool.best_set.assign(static_cast<std::size_t>(n), 0);
  pool.best_value = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());

  // Sets are scored in blocks; each block is merged into the per-point maxima in set order.
  const std::size_t block = 32;
  Eigen::MatrixXd r1(n, static_cast<Index>(block)), r2(n, static_cast<Index>(block));
  for (std::size_t first = 0; first < count; first += block) {
    const std::size_t width = std::min(block, count - first);
    parallel_for(width * static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const std::size_t k = t / static_cast<std::size_t>(n);
        const Index i = static_cast<Index>(t % static_cast<std::size_t>(n));
        const PointScore p = point_score(field, i, pool.sets[first + k]);
        r1(i, static_cast<Index>(k)) = p.r1;
        r2(i, static_cast<Index>(k)) = p.r2;
      }
    }, 4096);
    for (std::size_t k = 0; k < width; ++k) {
      const Index col = static_cast<Index>(k);
      const Index set = static_cast<Index>(first + k);
      double s1 = 0.0, s2 = 0.0;
      for (Index i = 0; i < n; ++i) {
        s1 += r1(i, col);
        s2 += r2(i, col);
        const double value = r1(i, col) - r2(i, col);
        if (value > pool.best_value[i]) {
          pool.best_value[i] = value;
          pool.best_set[static_cast<std::size_t>(i)] = set;
        }
      }
      pool.R1[set] = s1 / static_cast<double>(n);
      pool.R2[set] = s2 / static_cast<double>(n);
      pool.lambda_sum[set] = lambda_sum(lambdas, pool.sets[first + k]);
    }
  }
  return pool;
}

SearchReport rank_pool(const CandidatePool& pool, double zeta, std::size_t keep) {
  if (!(zeta >= 0.0)) fail(ErrorKind::Parameter, "zeta must be >= 0");
  SearchReport report;
  report.zeta = zeta;
  report.s = pool.s;
  report.method = SearchMethod::Exhaustive;
  report.candidates = pool.sets.size();
  report.ranked.resize(pool.sets.size());
  for (std::size_t k = 0; k < pool.sets.size(); ++k) {
    ScoredSubset& out = report.ranked[k];
    const Index idx = static_cast<Index>(k);
    out.S = pool.sets[k];
    out.R1 = pool.R1[idx];
    out.R2 = pool.R2[idx];
    out.lambda_sum = pool.lambda_sum[idx];
    out.score = out.R1 - out.R2 - zeta * out.lambda_sum;
  }
  std::sort(report.ranked.begin(), report.ranked.end(), ranks_before);
  if (keep > 0 && report.ranked.size() > keep) report.ranked.resize(keep);
  return report;
}

SearchReport search_exhaustive(const MetricField& field, const Eigen::VectorXd& lambdas, int s,
                               double zeta, const SearchOptions& options) {
  if (!(zeta >= 0.0)) fail(ErrorKind::Parameter, "zeta must be >= 0");
  return rank_pool(build_pool(field, lambdas, s, options.cap), zeta, options.keep);
}

SearchReport search_greedy(const MetricField& field, const Eigen::VectorXd& lambdas,
                           double zeta) {
  const int m = static_cast<int>(field.m());
  const int d = static_cast<int>(field.d());
  SearchReport seed = search_exhaustive(field, lambdas, d, zeta);

  SearchReport report;
  report.zeta = zeta;
  report.s = m;
  report.method = SearchMethod::Greedy;
  report.candidates = seed.candidates;
  ScoredSubset current = score(field, lambdas, seed.ranked.front().S, zeta, false);
  report.order = current.S;
  report.ranked.push_back(current);

  while (static_cast<int>(current.S.size()) < m) {
    ScoredSubset best;
    bool found = false;
    for (int k = 2; k <= m; ++k) {
      if (std::binary_search(current.S.begin(), current.S.end(), k)) continue;
      ScoredSubset cand = score(field, lambdas, sorted_union(current.S, k), zeta, false);
      ++report.candidates;
      if (!found || cand.score > best.score) {
        best = std::move(cand);
        found = true;
        report.order.resize(current.S.size());
        report.order.push_back(k);
      }
    }
    current = best;
    report.ranked.push_back(current);
  }
  return report;
}

}  // namespace ies
