#pragma once

#include "ies/config.hpp"
#include "ies/selection.hpp"

#include <string>
#include <vector>

namespace ies {

struct VolHistogram {
  CoordSet S;
  std::vector<double> bin_edges;  // 51 edges over [0, 1]
  std::vector<Index> counts;      // 50 bins, the last one closed at 1
  double low_mass = 0.0;          // fraction with volume below the threshold
  double low_threshold = 0.1;
};

/// Histogram of the normalized projected volume exp(R(S, i)).
VolHistogram vol_histogram(const MetricField& field, const CoordSet& S,
                           double low_threshold = 0.1);

enum class Cardinality { KeepS, IncreaseS };

struct CardinalityReport {
  Cardinality recommendation = Cardinality::KeepS;
  double theta = 0.1;
  double low_threshold = 0.1;
  std::vector<VolHistogram> sets;  // one per top set
  VolHistogram union_set;
};

/// Recommends a larger s when every top set concentrates more than theta of
/// its mass below the threshold while their union carries less than theta / 2.
CardinalityReport cardinality_check(const MetricField& field, const std::vector<CoordSet>& top,
                                    double theta = 0.1, double low_threshold = 0.1);

const char* to_string(Cardinality c);

struct DisparityScore {
  double m2 = 0.0;
  double beta = 0.0;
  Eigen::RowVectorXd gamma;  // translation, in units of the normalized truth
  Eigen::MatrixXd Gamma;     // k x k rotation applied as test * Gamma
};

/// Procrustes disparity between centered, unit-norm truth and the best
/// scaled, rotated and translated copy of test.
DisparityScore procrustes_m2(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& test);

struct BenchRow {
  Index n;
  std::string stage;
  double seconds;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<std::pair<std::string, double>> slopes;  // log-log slope per stage
  double eps_reference = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Times graph+embedding, the IES search (metric plus exhaustive scoring) and
/// the LLR baseline at each size. Each stage runs twice and the minimum is kept.
/// The kernel bandwidth shrinks as n^(-1/d) from its value at config.n so the
/// average neighborhood size stays fixed across sizes.
BenchResult runtime_bench(const PipelineConfig& config, const std::vector<std::int64_t>& sizes,
                          Index llr_coords = 3);

}  // namespace ies
