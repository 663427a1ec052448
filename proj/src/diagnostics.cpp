#include "ies/diagnostics.hpp"

#include "ies/baseline.hpp"
#include "ies/errors.hpp"
#include "ies/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ies {

VolHistogram vol_histogram(const MetricField& field, const CoordSet& S, double low_threshold) {
  const Index n = field.n();
  if (static_cast<Index>(S.size()) < field.d()) fail(ErrorKind::Dimension, "|S| must be >= d");
  VolHistogram h;
  h.S = S;
  h.low_threshold = low_threshold;
  constexpr int bins = 50;
  h.bin_edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.bin_edges[b] = static_cast<double>(b) / bins;
  h.counts.assign(bins, 0);
  Index low = 0;
  for (Index i = 0; i < n; ++i) {
    const double vol = std::exp(point_score(field, i, S).rank());
    const int bin = std::clamp(static_cast<int>(vol * bins), 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
    if (vol < low_threshold) ++low;
  }
  h.low_mass = n > 0 ? static_cast<double>(low) / static_cast<double>(n) : 0.0;
  return h;
}

CardinalityReport cardinality_check(const MetricField& field, const std::vector<CoordSet>& top,
                                    double theta, double low_threshold) {
  if (top.size() < 2) fail(ErrorKind::Parameter, "cardinality check needs at least 2 sets");
  CardinalityReport out;
  out.theta = theta;
  out.low_threshold = low_threshold;
  CoordSet joint;
  bool all_spiky = true;
  for (const CoordSet& S : top) {
    out.sets.push_back(vol_histogram(field, S, low_threshold));
    all_spiky = all_spiky && out.sets.back().low_mass > theta;
    joint.insert(joint.end(), S.begin(), S.end());
  }
  std::sort(joint.begin(), joint.end());
  joint.erase(std::unique(joint.begin(), joint.end()), joint.end());
  out.union_set = vol_histogram(field, joint, low_threshold);
  out.recommendation = all_spiky && out.union_set.low_mass < theta / 2.0 ? Cardinality::IncreaseS
                                                                         : Cardinality::KeepS;
  return out;
}

const char* to_string(Cardinality c) {
  return c == Cardinality::IncreaseS ? "increase_s" : "keep_s";
}

DisparityScore procrustes_m2(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& test) {
  if (truth.rows() != test.rows() || truth.cols() != test.cols())
    fail(ErrorKind::Dimension, "truth and test must have equal shape");
  if (truth.rows() < 1) fail(ErrorKind::Parameter, "empty point sets");
  const Eigen::RowVectorXd mu_true = truth.colwise().mean();
  const Eigen::RowVectorXd mu_test = test.colwise().mean();
  Eigen::MatrixXd X = truth.rowwise() - mu_true;
  const Eigen::MatrixXd Z = test.rowwise() - mu_test;
  const double true_norm = X.norm();
  const double test_norm2 = Z.squaredNorm();
  if (!(true_norm > 0.0)) fail(ErrorKind::Numeric, "truth has zero variance");
  if (!(test_norm2 > 0.0)) fail(ErrorKind::Numeric, "test has zero variance");
  X /= true_norm;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z.transpose() * X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sv = svd.singularValues();
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(sv.size());
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) sign[sign.size() - 1] = -1.0;
  const double trace = sv.dot(sign);

  DisparityScore out;
  out.Gamma = svd.matrixU() * sign.asDiagonal() * svd.matrixV().transpose();
  out.beta = trace / test_norm2;
  out.m2 = std::max(0.0, 1.0 - trace * trace / test_norm2);
  out.gamma = mu_true / true_norm - out.beta * mu_test * out.Gamma;
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::Parameter, "need >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

BenchResult runtime_bench(const PipelineConfig& config, const std::vector<std::int64_t>& sizes,
                          Index llr_coords) {
  if (sizes.size() < 2) fail(ErrorKind::Parameter, "bench needs at least 2 sizes");
  for (std::size_t k = 1; k < sizes.size(); ++k)
    if (sizes[k] <= sizes[k - 1]) fail(ErrorKind::Parameter, "bench sizes must be ascending");

  using Clock = std::chrono::steady_clock;
  auto best_of_two = [](auto&& work) {
    double best = 0.0;
    for (int rep = 0; rep < 2; ++rep) {
      const auto t0 = Clock::now();
      work();
      const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      best = rep == 0 ? secs : std::min(best, secs);
    }
    return best;
  };

  BenchResult out;
  const Manifold manifold = parse_manifold(config.manifold);
  const double dim = manifold_dimension(manifold);
  {
    PipelineConfig ref = config;
    ref.input.clear();
    out.eps_reference = resolve_eps(ref, generate(manifold, config.n, config.sigma, config.seed));
  }
  const std::vector<std::string> stages{"embed", "ies_search", "llr"};
  std::vector<std::vector<double>> times(stages.size());
  std::vector<double> ns;
  for (std::int64_t n : sizes) {
    const Dataset ds = generate(manifold, n, config.sigma, config.seed);
    const double eps = out.eps_reference *
                       std::pow(static_cast<double>(config.n) / static_cast<double>(n), 1.0 / dim);
    EmbedResult embedded;
    const double t_embed = best_of_two([&] { embedded = run_embed(ds, eps, config.c, config.m); });
    const SpectralEmbedding& emb = embedded.embedding;
    const Eigen::VectorXd lambdas = emb.lambdas * emb.lambda_scale();
    const double t_search = best_of_two([&] {
      const MetricField field = rmetric(emb, config.d);
      const SearchReport report = rank_pool(
          build_pool(field, lambdas, static_cast<int>(config.s), config.cap), 0.0);
      (void)report;
    });
    LlrOptions lo;
    lo.max_coords = llr_coords;
    const double t_llr = best_of_two([&] { (void)llr_coord_search(emb, lo); });
    const double t[] = {t_embed, t_search, t_llr};
    for (std::size_t k = 0; k < stages.size(); ++k) {
      times[k].push_back(t[k]);
      out.rows.push_back({static_cast<Index>(n), stages[k], t[k]});
    }
    ns.push_back(static_cast<double>(n));
  }
  for (std::size_t k = 0; k < stages.size(); ++k)
    out.slopes.emplace_back(stages[k], loglog_slope(ns, times[k]));
  return out;
}

}  // namespace ies
