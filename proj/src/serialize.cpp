#include "ies/serialize.hpp"

#include "ies/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace ies {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

std::string set_label(const CoordSet& S) {
  std::string out;
  for (std::size_t k = 0; k < S.size(); ++k) out += (k ? "-" : "") + std::to_string(S[k]);
  return out;
}

Json to_json(const Eigen::MatrixXd& matrix) {
  Json rows = Json::array();
  for (Index i = 0; i < matrix.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < matrix.cols(); ++j) row.push_back(matrix(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Eigen::VectorXd& vector) {
  Json out = Json::array();
  for (Index i = 0; i < vector.size(); ++i) out.push_back(vector[i]);
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(ErrorKind::Parse, what + " must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : 0;
  Eigen::MatrixXd out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      fail(ErrorKind::Parse, what + ": row " + std::to_string(i + 1) + " has the wrong length");
    for (Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number())
        fail(ErrorKind::Parse, what + ": non-numeric entry at row " + std::to_string(i + 1) +
                                   ", column " + std::to_string(c + 1));
      out(i, c) = v.get<double>();
    }
  }
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) fail(ErrorKind::Parse, what + " must be an array");
  Eigen::VectorXd out(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) fail(ErrorKind::Parse, what + ": non-numeric entry");
    out[static_cast<Index>(k)] = j[k].get<double>();
  }
  return out;
}

Json embedding_to_json(const EmbedResult& result) {
  const SpectralEmbedding& e = result.embedding;
  return Json{{"eps", result.eps},
              {"c", result.c},
              {"m", e.m},
              {"lambda_scale", e.lambda_scale()},
              {"lambdas", to_json(e.lambdas)},
              {"residuals", to_json(e.residuals)},
              {"warnings", result.warnings},
              {"Y", to_json(e.Y)}};
}

StoredEmbedding embedding_from_json(const Json& j) {
  try {
    StoredEmbedding out;
    out.eps = j.at("eps").get<double>();
    out.c = j.at("c").get<double>();
    out.lambdas = vector_from_json(j.at("lambdas"), "lambdas");
    out.Y = matrix_from_json(j.at("Y"), "Y");
    if (out.lambdas.size() != out.Y.cols() + 1)
      fail(ErrorKind::Parse, "embedding needs m + 1 eigenvalues for m columns");
    return out;
  } catch (const Json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed embedding: ") + e.what());
  }
}

void write_embedding_csv(const SpectralEmbedding& embedding, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (Index k = 1; k <= embedding.Y.cols(); ++k) out << (k > 1 ? "," : "") << "phi" << k;
  out << '\n';
  for (Index i = 0; i < embedding.Y.rows(); ++i) {
    for (Index k = 0; k < embedding.Y.cols(); ++k) out << (k ? "," : "") << embedding.Y(i, k);
    out << '\n';
  }
  finish(out, path);
}

Json to_json(const ScoredSubset& subset) {
  return Json{{"S", subset.S},
              {"R1", subset.R1},
              {"R2", subset.R2},
              {"lambda_sum", subset.lambda_sum},
              {"score", subset.score}};
}

Json to_json(const SearchReport& report) {
  Json ranked = Json::array();
  for (const auto& r : report.ranked) ranked.push_back(to_json(r));
  Json out{{"zeta", report.zeta},
           {"s", report.s},
           {"method", report.method == SearchMethod::Greedy ? "greedy" : "exhaustive"},
           {"candidates", report.candidates},
           {"ranked", ranked}};
  if (report.method == SearchMethod::Greedy) out["order"] = report.order;
  return out;
}

Json to_json(const RegularizationPath& path, const std::optional<Selection>& selection) {
  Json segments = Json::array();
  for (const auto& s : path.segments)
    segments.push_back(Json{{"zeta_lo", s.zeta_lo},
                            {"zeta_hi", s.zeta_hi},
                            {"S", s.S},
                            {"intercept", s.intercept},
                            {"slope", s.slope}});
  Json out{{"zeta_max", path.zeta_max}, {"segments", segments}};
  if (selection) {
    out["selected"] = Json{{"S", selection->S}, {"zeta_star", selection->zeta_star}};
    Json pct = Json::object();
    for (const auto& d : selection->examined) pct[set_label(d.S)] = d.percentile_value;
    out["regret_percentiles"] = pct;
  } else {
    out["selected"] = nullptr;
    out["regret_percentiles"] = Json::object();
  }
  return out;
}

Json selection_to_json(const SearchResult& result, double alpha) {
  Json out{{"S", result.report.ranked.empty() ? CoordSet{} : result.report.ranked.front().S},
           {"zeta", result.zeta},
           {"zeta_mode", result.selection ? "auto" : "fixed"},
           {"zeta_units", "laplace_beltrami"},
           {"alpha", alpha}};
  if (result.selection) {
    out["S"] = result.selection->S;
    out["zeta_star"] = result.selection->zeta_star;
    out["zeta_hi"] = result.selection->zeta_hi;
    out["zeta_lo"] = result.selection->zeta_lo;
    Json rejected = Json::array();
    for (std::size_t k = 0; k + 1 < result.selection->examined.size(); ++k) {
      const auto& d = result.selection->examined[k];
      rejected.push_back(Json{{"S", d.S}, {"percentile", d.percentile_value}});
    }
    out["rejected"] = rejected;
  }
  return out;
}

void write_regret_csv(const Selection& selection, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "point";
  for (const auto& d : selection.examined) out << ",S=" << set_label(d.S);
  out << '\n';
  const Index n = selection.examined.empty() ? 0 : selection.examined.front().regrets.size();
  for (Index i = 0; i < n; ++i) {
    out << i;
    for (const auto& d : selection.examined) out << ',' << d.regrets[i];
    out << '\n';
  }
  finish(out, path);
}

Json to_json(const LlrReport& report) {
  Json bandwidth = Json::array();
  for (Index k = 0; k < report.bandwidth.size(); ++k) {
    if (std::isnan(report.bandwidth[k])) bandwidth.push_back(nullptr);
    else bandwidth.push_back(report.bandwidth[k]);
  }
  return Json{{"r", to_json(report.r)}, {"order", report.order}, {"bandwidth", bandwidth}};
}

Json to_json(const CardinalityReport& report) {
  Json sets = Json::array();
  for (const auto& h : report.sets) sets.push_back(Json{{"S", h.S}, {"low_mass", h.low_mass}});
  return Json{{"recommendation", to_string(report.recommendation)},
              {"theta", report.theta},
              {"low_volume", report.low_threshold},
              {"sets", sets},
              {"union", Json{{"S", report.union_set.S}, {"low_mass", report.union_set.low_mass}}}};
}

Json to_json(const DisparityScore& score) {
  return Json{{"m2", score.m2},
              {"beta", score.beta},
              {"gamma", to_json(Eigen::VectorXd(score.gamma.transpose()))},
              {"Gamma", to_json(score.Gamma)}};
}

void write_histograms_csv(const std::vector<VolHistogram>& histograms,
                          const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "S,bin_lo,bin_hi,count\n";
  for (const auto& h : histograms)
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      out << set_label(h.S) << ',' << h.bin_edges[b] << ',' << h.bin_edges[b + 1] << ','
          << h.counts[b] << '\n';
  finish(out, path);
}

void write_bench_csv(const BenchResult& bench, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "n,stage,seconds\n";
  for (const auto& r : bench.rows) out << r.n << ',' << r.stage << ',' << r.seconds << '\n';
  for (const auto& [stage, slope] : bench.slopes) out << "slope," << stage << ',' << slope << '\n';
  finish(out, path);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace ies
