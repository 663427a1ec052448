#include "ies/baseline.hpp"
#include "ies/config.hpp"
#include "ies/diagnostics.hpp"
#include "ies/errors.hpp"
#include "ies/graph.hpp"
#include "ies/pipeline.hpp"
#include "ies/regpath.hpp"
#include "ies/rmetric.hpp"
#include "ies/selection.hpp"
#include "ies/spectral.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ies;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = IES_FIXTURE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string label(const CoordSet& S) {
  std::string out = "{";
  for (std::size_t k = 0; k < S.size(); ++k) out += (k ? "," : "") + std::to_string(S[k]);
  return out + "}";
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

PipelineConfig fixture(const std::string& name) { return PipelineConfig::load(kFixtures / (name + ".cfg")); }

struct Run {
  PipelineConfig config;
  Dataset ds;
  EmbedResult embed;
  SearchResult search;
  double seconds = 0.0;
};

Run run_pipeline(const PipelineConfig& config) {
  Timer t;
  Run r;
  r.config = config;
  r.ds = make_dataset(config);
  r.embed = run_embed(r.ds, config);
  r.search = run_search(r.embed.embedding, config);
  r.seconds = t.seconds();
  return r;
}

std::vector<CoordSet> top_sets(const SearchReport& report, std::size_t k) {
  std::vector<CoordSet> out;
  for (std::size_t j = 0; j < std::min(k, report.ranked.size()); ++j) out.push_back(report.ranked[j].S);
  return out;
}

bool contains(const std::vector<CoordSet>& sets, const CoordSet& S) {
  return std::find(sets.begin(), sets.end(), S) != sets.end();
}

// Rows of U(i) at S.
Eigen::MatrixXd rows_of(const MetricField& field, Index i, const CoordSet& S) {
  Eigen::MatrixXd out(static_cast<Index>(S.size()), field.d());
  for (std::size_t r = 0; r < S.size(); ++r) out.row(static_cast<Index>(r)) = field.U(i).row(S[r] - 1);
  return out;
}

// Log of sqrt(det Gram) over the product of column norms.
double naive_point_rank(const MetricField& field, Index i, const CoordSet& S) {
  const Eigen::MatrixXd u = rows_of(field, i, S);
  double log_norms = 0.0;
  for (Index c = 0; c < u.cols(); ++c) log_norms += std::log(u.col(c).norm());
  return 0.5 * std::log((u.transpose() * u).determinant()) - log_norms;
}

std::vector<CoordSet> all_sets(int m, int s) {
  std::vector<CoordSet> out;
  std::function<void(CoordSet, int)> rec = [&](CoordSet cur, int next) {
    if (static_cast<int>(cur.size()) == s) {
      out.push_back(cur);
      return;
    }
    for (int k = next; k <= m; ++k) {
      cur.push_back(k);
      rec(cur, k + 1);
      cur.pop_back();
    }
  };
  rec({1}, 2);
  return out;
}

// Largest gap between the path value and the best line over a 10^4-point zeta grid.
double envelope_gap(const std::vector<PathLine>& lines, const RegularizationPath& path) {
  double worst = 0.0;
  for (int g = 0; g < 10000; ++g) {
    const double zeta = path.zeta_max * (g + 0.5) / 10000.0;
    double best = -1e300;
    for (const PathLine& l : lines) best = std::max(best, l.intercept - zeta * l.lambda_sum);
    const PathSegment& seg = path.segments[path.segment_at(zeta)];
    const double got = seg.intercept + seg.slope * zeta;
    worst = std::max(worst, (best - got) / std::max(1.0, std::abs(best)));
  }
  return worst;
}

// Shared fixtures, built on first use.
struct Cache {
  std::optional<Run> d1;
  std::optional<Run> d7;
  std::optional<Run> d4;

  const Run& strip() {
    if (!d1) d1 = run_pipeline(fixture("d1"));
    return *d1;
  }
  const Run& torus() {
    if (!d7) d7 = run_pipeline(fixture("d7"));
    return *d7;
  }
  const Run& roll() {
    if (!d4) d4 = run_pipeline(fixture("d4"));
    return *d4;
  }
};

Outcome strip_selection(Cache& cache) {
  int hits = 0;
  double slowest = 0.0;
  std::string picks;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PipelineConfig c = fixture("d1");
    c.seed = seed;
    const Run r = seed == 1 ? cache.strip() : run_pipeline(c);
    const CoordSet S = r.search.selection->S;
    if (S == CoordSet{1, 7}) ++hits;
    slowest = std::max(slowest, r.seconds);
    picks += (seed > 1 ? " " : "") + label(S);
  }
  return {hits >= 4 && slowest < 60.0,
          "S* = {1,7} in " + std::to_string(hits) + "/5 seeds [" + picks + "], slowest run " + fmt(slowest, 3) +
              " s"};
}

Outcome strip_spectrum() {
  Timer t;
  PipelineConfig c = fixture("d1");
  c.sigma = 0.0;
  const Dataset ds = make_dataset(c);
  const EmbedResult e = run_embed(ds, c);
  const double ratio = e.embedding.lambdas[7] / e.embedding.lambdas[1];
  const double analytic = 4.0 * std::numbers::pi * std::numbers::pi;
  const double rel = std::abs(ratio / analytic - 1.0);
  return {rel <= 0.15 && t.seconds() < 60.0,
          "lambda7/lambda1 = " + fmt(ratio) + " vs " + fmt(analytic) + " (" + fmt(100.0 * rel, 3) + "% off), " +
              fmt(t.seconds(), 3) + " s"};
}

Outcome torus_selection(Cache& cache) {
  const Run& r = cache.torus();
  const auto top2 = top_sets(r.search.report, 2);
  const double zeta = r.search.selection->zeta_star;
  const bool ok = contains(top2, {1, 4, 5}) && zeta >= 3.5 && zeta <= 14.0 && r.seconds < 90.0;
  std::string ranked;
  for (const auto& S : top_sets(r.search.report, 3)) ranked += label(S) + " ";
  return {ok, "S* = " + label(r.search.selection->S) + ", zeta* = " + fmt(zeta) + ", top ranked " + ranked +
                  "at zeta*, " + fmt(r.seconds, 3) + " s"};
}

Outcome three_torus(std::optional<Run>& keep) {
  keep = run_pipeline(fixture("d13"));
  const Run& r = *keep;
  const auto top3 = top_sets(r.search.report, 3);
  std::string ranked;
  for (const auto& S : top3) ranked += label(S) + " ";
  return {contains(top3, {1, 2, 5, 10}) && r.seconds < 600.0,
          "top 3 at zeta* = " + fmt(r.search.zeta) + ": " + ranked + "(" + fmt(r.seconds, 3) + " s)"};
}

Outcome regret_elimination(Cache& cache) {
  const Run& r = cache.strip();
  const CandidatePool& pool = *r.search.pool;
  const auto it = std::find(pool.sets.begin(), pool.sets.end(), CoordSet{1, 2});
  const RegretDistribution d =
      regret(r.search.field, pool, static_cast<std::size_t>(it - pool.sets.begin()), r.config.alpha);
  return {d.nonnegative_fraction >= 0.95,
          "D({1,2}, i) >= 0 for " + fmt(100.0 * d.nonnegative_fraction) + "% of points"};
}

Outcome baseline_failure(Cache& cache) {
  const Run& r = cache.torus();
  Timer t;
  LlrOptions opt;
  opt.max_coords = r.config.llr_coords;
  const LlrReport llr = llr_coord_search(r.embed.embedding, opt);
  const std::vector<int> top = llr.top(3);
  const bool has2 = std::find(top.begin(), top.end(), 2) != top.end();
  std::string rs;
  for (Index k = 1; k < std::min<Index>(6, llr.r.size()); ++k) rs += " r" + std::to_string(k + 1) + "=" + fmt(llr.r[k], 3);
  return {has2 && top != std::vector<int>{1, 4, 5},
          "LLR top 3 = " + label(top) + " (" + rs.substr(1) + "), " + fmt(t.seconds(), 3) + " s"};
}

Outcome submatrix_identity(Cache& cache) {
  const Run& r = cache.strip();
  const MetricField& field = r.search.field;
  const SpectralEmbedding& emb = r.embed.embedding;
  const Index m = field.m(), d = field.d();
  const Eigen::MatrixXd Y = emb.Y.leftCols(m);
  std::mt19937 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    CoordSet S;
    for (int k = 1; k <= m; ++k)
      if (rng() % 3 == 0) S.push_back(k);
    if (S.size() < 2) S = {1, 2 + static_cast<int>(rng() % static_cast<unsigned>(m - 1))};
    for (Index i = static_cast<Index>(trial); i < field.n(); i += 97) {
      // independent rank-d truncation of the co-metric
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(raw_cometric(Y, *emb.laplacian, i));
      const Eigen::MatrixXd V = es.eigenvectors().rightCols(d);
      const Eigen::MatrixXd H = V * es.eigenvalues().tail(d).asDiagonal() * V.transpose();
      Eigen::MatrixXd HS(S.size(), S.size());
      for (std::size_t a = 0; a < S.size(); ++a)
        for (std::size_t b = 0; b < S.size(); ++b) HS(a, b) = H(S[a] - 1, S[b] - 1);
      const Eigen::MatrixXd u = rows_of(field, i, S);
      worst = std::max(worst, (HS - u * field.Sigma(i).asDiagonal() * u.transpose()).norm());
    }
  }
  return {worst <= 1e-10, "max ||H[S,S] - U_S Sigma U_S^T||_F = " + fmt(worst, 3) + " over 100 subsets"};
}

Outcome submodularity() {
  std::mt19937 rng(31);
  std::normal_distribution<double> normal;
  double worst1 = -1e300, worst2 = -1e300;
  int checked = 0;
  while (checked < 200) {
    const Index m = 5 + static_cast<Index>(rng() % 6);
    const Index d = 1 + static_cast<Index>(rng() % 3);
    Eigen::MatrixXd A(m, d);
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < d; ++c) A(r, c) = normal(rng);
    const Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() * Eigen::MatrixXd::Identity(m, d);
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) perm[static_cast<std::size_t>(k)] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t a_size = static_cast<std::size_t>(d);
    const std::size_t b_size = a_size + 1 + rng() % static_cast<std::size_t>(m - d - 1);
    const std::vector<int> Aset(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(a_size));
    const std::vector<int> Bset(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(b_size));
    const int extra = perm[b_size];
    auto rows = [&](std::vector<int> S, bool add) {
      if (add) S.push_back(extra);
      Eigen::MatrixXd out(static_cast<Index>(S.size()), d);
      for (std::size_t r = 0; r < S.size(); ++r) out.row(static_cast<Index>(r)) = U.row(S[r]);
      return out;
    };
    auto r1 = [&](const Eigen::MatrixXd& u) { return 0.5 * std::log((u.transpose() * u).determinant()); };
    auto r2 = [&](const Eigen::MatrixXd& u) {
      double s = 0.0;
      for (Index c = 0; c < d; ++c) s += std::log(u.col(c).norm());
      return s;
    };
    const Eigen::MatrixXd a0 = rows(Aset, false), a1 = rows(Aset, true);
    const Eigen::MatrixXd b0 = rows(Bset, false), b1 = rows(Bset, true);
    const double gA1 = r1(a1) - r1(a0), gB1 = r1(b1) - r1(b0);
    const double gA2 = r2(a1) - r2(a0), gB2 = r2(b1) - r2(b0);
    if (!std::isfinite(gA1) || !std::isfinite(gB1) || !std::isfinite(gA2) || !std::isfinite(gB2)) continue;
    worst1 = std::max(worst1, gB1 - gA1);
    worst2 = std::max(worst2, gB2 - gA2);
    ++checked;
  }
  return {worst1 <= 1e-9 && worst2 <= 1e-9,
          "200 instances, max gain excess R1 " + fmt(worst1, 3) + ", R2 " + fmt(worst2, 3)};
}

Outcome envelope(Cache& cache) {
  std::vector<std::pair<std::string, const CandidatePool*>> pools{
      {"D1", &*cache.strip().search.pool}, {"D7", &*cache.torus().search.pool}, {"D4", &*cache.roll().search.pool}};
  // the strip again at s = 3 (171 candidates)
  const Run& strip = cache.strip();
  const CandidatePool strip3 = build_pool(strip.search.field, strip.search.lambdas, 3);
  pools.emplace_back("D1 s=3", &strip3);
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, pool] : pools) {
    const auto lines = path_lines(*pool);
    const RegularizationPath path = build_path(lines);
    const double gap = envelope_gap(lines, path);
    worst = std::max(worst, gap);
    detail += name + ": " + std::to_string(path.segments.size()) + " segments over " + std::to_string(lines.size()) +
              " sets; ";
  }
  return {worst <= 1e-12, detail + "max grid gap " + fmt(worst, 3)};
}

Outcome small_equivalence() {
  PipelineConfig c = fixture("d1");
  c.n = 300;
  c.eps = 1.2;
  c.m = 10;
  const Dataset ds = make_dataset(c);
  auto lap = std::make_shared<const Laplacian>(build_laplacian(build_kernel(ds, c.eps, c.c)));

  // sparse solver against a dense nonsymmetric eigensolve of L
  EmbedOptions sparse;
  sparse.method = EigenMethod::Lanczos;
  const SpectralEmbedding emb = embed(lap, c.m, sparse);
  Eigen::EigenSolver<Eigen::MatrixXd> dense(Eigen::MatrixXd(lap->L), false);
  std::vector<double> ev;
  for (Index k = 0; k < dense.eigenvalues().size(); ++k) ev.push_back(dense.eigenvalues()[k].real());
  std::sort(ev.begin(), ev.end());
  double dl = 0.0;
  for (Index k = 1; k <= c.m; ++k) dl = std::max(dl, std::abs(emb.lambdas[k] - std::max(0.0, ev[static_cast<std::size_t>(k)])));

  const MetricField field = rmetric(emb, c.d);
  const Eigen::VectorXd lambdas = emb.lambdas * emb.lambda_scale();
  bool argmax_ok = true;
  for (int s : {2, 3}) {
    const auto sets = all_sets(static_cast<int>(c.m), s);
    std::vector<double> rank(sets.size(), 0.0);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      for (Index i = 0; i < field.n(); ++i) rank[k] += naive_point_rank(field, i, sets[k]);
      rank[k] /= static_cast<double>(field.n());
    }
    for (double zeta : {0.0, 0.5, 2.0, 10.0}) {
      std::size_t best = 0;
      double best_value = -1e300;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        double lsum = 0.0;
        for (int j : sets[k]) lsum += lambdas[j];
        const double v = rank[k] - zeta * lsum;
        if (v > best_value) {
          best_value = v;
          best = k;
        }
      }
      if (search_exhaustive(field, lambdas, s, zeta).ranked.front().S != sets[best]) argmax_ok = false;
    }
  }

  // leave-one-out regrets against means recomputed without each point
  const CandidatePool pool = build_pool(field, lambdas, 2);
  const Index n = field.n();
  Eigen::MatrixXd R(static_cast<Index>(pool.sets.size()), n);
  for (std::size_t k = 0; k < pool.sets.size(); ++k)
    for (Index i = 0; i < n; ++i) R(static_cast<Index>(k), i) = point_score(field, i, pool.sets[k]).rank();
  double dr = 0.0;
  for (std::size_t cand = 0; cand < pool.sets.size(); ++cand) {
    const RegretDistribution dist = regret(field, pool, cand);
    for (Index i = 0; i < n; ++i) {
      Index best;
      R.col(i).maxCoeff(&best);
      double with_best = 0.0, with_cand = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        with_best += R(best, j);
        with_cand += R(static_cast<Index>(cand), j);
      }
      const double oracle = (with_best - with_cand) / static_cast<double>(n - 1);
      dr = std::max(dr, std::abs(dist.regrets[i] - oracle));
    }
  }
  return {dl <= 1e-8 && argmax_ok && dr <= 1e-10,
          "n = 300: max |dlambda| = " + fmt(dl, 3) + ", exhaustive argmax " + (argmax_ok ? "identical" : "DIFFERS") +
              ", max |dregret| = " + fmt(dr, 3)};
}

Outcome scaling() {
  const PipelineConfig c = fixture("d1");
  const BenchResult bench = runtime_bench(c, c.bench_sizes);
  double ies = 0.0, llr = 0.0;
  std::string detail;
  for (const auto& [stage, slope] : bench.slopes) {
    if (stage == "ies_search") ies = slope;
    if (stage == "llr") llr = slope;
    detail += stage + " " + fmt(slope, 3) + ", ";
  }
  return {ies <= 1.3 && llr >= 1.6, "log-log slopes: " + detail.substr(0, detail.size() - 2)};
}

Outcome procrustes(Cache& cache) {
  std::mt19937 rng(12);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(200, 2);
  for (Index i = 0; i < 200; ++i) X.row(i) << normal(rng), normal(rng);
  Eigen::Matrix2d Q;
  Q << std::cos(1.1), -std::sin(1.1), std::sin(1.1), std::cos(1.1);
  Eigen::MatrixXd Z = -4.2 * X * Q;
  Z.rowwise() += Eigen::RowVector2d(3.0, 8.0);
  const double exact = procrustes_m2(X, Z).m2;

  const Run& r = cache.strip();
  auto m2_of = [&](int a, int b) {
    Eigen::MatrixXd test(r.ds.size(), 2);
    test.col(0) = r.embed.embedding.Y.col(a - 1);
    test.col(1) = r.embed.embedding.Y.col(b - 1);
    return procrustes_m2(*r.ds.truth, test).m2;
  };
  const double good = m2_of(1, 7), bad = m2_of(1, 2);
  return {exact <= 1e-10 && good < bad,
          "similarity m2 = " + fmt(exact, 3) + "; D1 m2{1,7} = " + fmt(good) + " < m2{1,2} = " + fmt(bad)};
}

Outcome cardinality(Cache& cache) {
  auto check = [](const Run& r) {
    return cardinality_check(r.search.field, top_sets(r.search.report, static_cast<std::size_t>(r.config.top_k)),
                             r.config.theta, r.config.low_volume);
  };
  const CardinalityReport roll = check(cache.roll());
  const CardinalityReport strip = check(cache.strip());
  auto describe = [](const CardinalityReport& c) {
    std::string s = to_string(c.recommendation) + std::string(" (");
    for (const auto& h : c.sets) s += label(h.S) + " " + fmt(h.low_mass, 3) + ", ";
    return s + "union " + label(c.union_set.S) + " " + fmt(c.union_set.low_mass, 3) + ")";
  };
  return {roll.recommendation == Cardinality::IncreaseS && strip.recommendation == Cardinality::KeepS,
          "D4 " + describe(roll) + "; D1 " + describe(strip)};
}

struct Criterion {
  int id;
  std::string name;
  bool slow;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string suite = "fast";
  app.add_option("--suite", suite, "fast, slow or all")->check(CLI::IsMember({"fast", "slow", "all"}));
  CLI11_PARSE(app, argc, argv);

  Cache cache;
  std::optional<Run> d13;
  const std::vector<Criterion> criteria{
      {1, "strip selection", false, [&] { return strip_selection(cache); }},
      {2, "strip spectrum", false, [&] { return strip_spectrum(); }},
      {3, "high-torus selection", false, [&] { return torus_selection(cache); }},
      {4, "three-torus ranking", true, [&] { return three_torus(d13); }},
      {5, "regret elimination", false, [&] { return regret_elimination(cache); }},
      {6, "baseline failure mode", false, [&] { return baseline_failure(cache); }},
      {7, "submatrix identity", false, [&] { return submatrix_identity(cache); }},
      {8, "submodularity", false, [&] { return submodularity(); }},
      {9, "envelope correctness", false, [&] { return envelope(cache); }},
      {10, "small-instance equivalence", false, [&] { return small_equivalence(); }},
      {11, "scaling slopes", true, [&] { return scaling(); }},
      {12, "procrustes sanity", false, [&] { return procrustes(cache); }},
      {13, "cardinality heuristic", false, [&] { return cardinality(cache); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    if ((suite == "fast" && c.slow) || (suite == "slow" && !c.slow)) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    if (!out.pass) ++failed;
    std::printf("%s [%d] %s: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), out.detail.c_str());
    std::fflush(stdout);
  }
  if (suite != "fast" && d13) {
    const auto lines = path_lines(*d13->search.pool);
    const double gap = envelope_gap(lines, build_path(lines));
    const bool ok = gap <= 1e-12;
    if (!ok) ++failed;
    std::printf("%s [9] envelope correctness (D13): %zu sets, max grid gap %s\n", ok ? "PASS" : "FAIL",
                lines.size(), fmt(gap, 3).c_str());
  }
  return failed == 0 ? 0 : 1;
}
