#include "ies/regpath.hpp"

#include "ies/errors.hpp"
#include "ies/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ies {
namespace {

double value_at(const PathLine& l, double zeta) { return l.intercept - zeta * l.lambda_sum; }

// Index of the maximizer at zeta; ties go to the smaller lambda_sum, then the smaller set.
std::size_t argmax_at(const std::vector<PathLine>& lines, double zeta) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const double a = value_at(lines[k], zeta), b = value_at(lines[best], zeta);
    if (a > b || (a == b && (lines[k].lambda_sum < lines[best].lambda_sum ||
                             (lines[k].lambda_sum == lines[best].lambda_sum &&
                              lines[k].S < lines[best].S))))
      best = k;
  }
  return best;
}

std::size_t min_slope_line(const std::vector<PathLine>& lines) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < lines.size(); ++k)
    if (lines[k].lambda_sum < lines[best].lambda_sum ||
        (lines[k].lambda_sum == lines[best].lambda_sum && lines[k].S < lines[best].S))
      best = k;
  return best;
}

// True when the target beats every steeper line strictly at zeta, so no crossing lies at or above it.
bool strictly_top(const std::vector<PathLine>& lines, std::size_t target, double zeta) {
  if (argmax_at(lines, zeta) != target) return false;
  const double v = value_at(lines[target], zeta);
  for (const PathLine& l : lines)
    if (l.lambda_sum != lines[target].lambda_sum && !(v > value_at(l, zeta))) return false;
  return true;
}

}  // namespace

std::size_t RegularizationPath::segment_at(double zeta) const {
  for (std::size_t k = 0; k < segments.size(); ++k)
    if (zeta >= segments[k].zeta_lo) return k;
  return segments.empty() ? 0 : segments.size() - 1;
}

std::vector<PathLine> path_lines(const CandidatePool& pool) {
  std::vector<PathLine> lines(pool.sets.size());
  for (std::size_t k = 0; k < lines.size(); ++k)
    lines[k] = {pool.sets[k], pool.rank_quality(k), pool.lambda_sum[static_cast<Index>(k)]};
  return lines;
}

double auto_zeta_max(const std::vector<PathLine>& lines) {
  if (lines.empty()) fail(ErrorKind::Parameter, "no candidate sets");
  const std::size_t target = min_slope_line(lines);
  double zeta = std::ldexp(1.0, -40);
  for (int step = 0; step < 2100; ++step) {
    if (strictly_top(lines, target, zeta)) return zeta;
    zeta *= 2.0;
  }
  fail(ErrorKind::Numeric, "no finite zeta makes the smallest-eigenvalue set optimal");
}

RegularizationPath build_path(const std::vector<PathLine>& lines, double zeta_max) {
  if (lines.empty()) fail(ErrorKind::Parameter, "no candidate sets");
  RegularizationPath path;
  if (zeta_max > 0.0) {
    const std::size_t target = min_slope_line(lines);
    path.zeta_max = zeta_max;
    while (!strictly_top(lines, target, path.zeta_max)) {
      path.zeta_max *= 2.0;
      if (!std::isfinite(path.zeta_max))
        fail(ErrorKind::Numeric, "no finite zeta makes the smallest-eigenvalue set optimal");
    }
  } else {
    path.zeta_max = auto_zeta_max(lines);
  }

  // Walk down from zeta_max. Lowering zeta favors steeper lines (larger lambda_sum);
  // the next breakpoint is the largest crossing below the current zeta.
  double zeta = path.zeta_max;
  std::size_t current = argmax_at(lines, zeta);
  while (true) {
    double next = -std::numeric_limits<double>::infinity();
    std::size_t next_line = current;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const double db = lines[k].lambda_sum - lines[current].lambda_sum;
      if (!(db > 0.0)) continue;
      const double cross = (lines[k].intercept - lines[current].intercept) / db;
      if (cross >= zeta) continue;
      if (cross > next ||
          (cross == next && (lines[k].lambda_sum > lines[next_line].lambda_sum ||
                             (lines[k].lambda_sum == lines[next_line].lambda_sum &&
                              lines[k].S < lines[next_line].S)))) {
        next = cross;
        next_line = k;
      }
    }
    PathSegment seg;
    seg.candidate = current;
    seg.S = lines[current].S;
    seg.intercept = lines[current].intercept;
    seg.slope = -lines[current].lambda_sum;
    seg.zeta_hi = zeta;
    if (next_line == current || next <= 0.0) {
      seg.zeta_lo = 0.0;
      path.segments.push_back(std::move(seg));
      break;
    }
    seg.zeta_lo = next;
    path.segments.push_back(std::move(seg));
    zeta = next;
    current = next_line;
  }
  return path;
}

double nearest_rank_percentile(const Eigen::VectorXd& values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Parameter, "alpha must lie in (0, 1)");
  if (values.size() == 0) fail(ErrorKind::Parameter, "empty sample");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  const auto rank = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(sorted.size())));
  const std::size_t idx = std::max<std::size_t>(rank, 1) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
  return sorted[idx];
}

RegretDistribution regret(const MetricField& field, const CandidatePool& pool,
                          std::size_t candidate, double alpha) {
  const Index n = field.n();
  if (n < 2) fail(ErrorKind::Parameter, "regret needs at least 2 points");
  if (pool.n() != n) fail(ErrorKind::Dimension, "pool and field disagree on n");
  if (candidate >= pool.sets.size()) fail(ErrorKind::Parameter, "candidate out of range");

  RegretDistribution out;
  out.S = pool.sets[candidate];
  out.percentile_alpha = alpha;
  out.regrets.resize(n);
  const double dn = static_cast<double>(n);
  const double mean_S = pool.rank_quality(candidate);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Index i = static_cast<Index>(s);
      const std::size_t best = static_cast<std::size_t>(pool.best_set[s]);
      const double own = point_score(field, i, out.S).rank();
      const double loo_best = (dn * pool.rank_quality(best) - pool.best_value[i]) / (dn - 1.0);
      const double loo_S = (dn * mean_S - own) / (dn - 1.0);
      out.regrets[i] = loo_best - loo_S;
    }
  });
  out.percentile_value = nearest_rank_percentile(out.regrets, alpha);
  Index nonneg = 0;
  for (Index i = 0; i < n; ++i) nonneg += out.regrets[i] >= 0.0;
  out.nonnegative_fraction = static_cast<double>(nonneg) / dn;
  return out;
}

Selection select(const RegularizationPath& path, const MetricField& field,
                 const CandidatePool& pool, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::Parameter, "alpha must lie in (0, 1)");
  Selection out;
  for (std::size_t k = 0; k < path.segments.size(); ++k) {
    const PathSegment& seg = path.segments[k];
    RegretDistribution dist = regret(field, pool, seg.candidate, alpha);
    const bool accepted = dist.percentile_value <= 0.0;
    out.examined.push_back(std::move(dist));
    if (!accepted) continue;
    out.S = seg.S;
    out.segment = k;
    out.zeta_hi = seg.zeta_hi;
    out.zeta_lo = seg.zeta_lo;
    out.zeta_star = 0.5 * (out.zeta_hi + out.zeta_lo);
    return out;
  }
  std::ostringstream msg;
  msg << "no set on the regularization path passes the regret test at alpha = " << alpha << ":";
  for (const auto& d : out.examined) {
    msg << " {";
    for (std::size_t j = 0; j < d.S.size(); ++j) msg << (j ? "," : "") << d.S[j];
    msg << "} percentile " << d.percentile_value << ";";
  }
  fail(ErrorKind::Exhaustion, msg.str());
}

}  // namespace ies
