#pragma once

#include "ies/config.hpp"
#include "ies/dataset.hpp"
#include "ies/regpath.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ies {

Dataset make_dataset(const PipelineConfig& config);

/// config.eps when positive, otherwise the k-nearest-neighbor heuristic.
double resolve_eps(const PipelineConfig& config, const Dataset& ds);

struct EmbedResult {
  double eps = 0.0;
  double c = 3.0;
  SpectralEmbedding embedding;
  std::vector<std::string> warnings;
};

EmbedResult run_embed(const Dataset& ds, double eps, double c, Index m);
EmbedResult run_embed(const Dataset& ds, const PipelineConfig& config);

struct SearchResult {
  MetricField field;
  Eigen::VectorXd lambdas;  // rescaled to Laplace-Beltrami units
  std::optional<CandidatePool> pool;
  std::optional<RegularizationPath> path;
  std::optional<Selection> selection;  // present when zeta was automatic
  SearchReport report;                 // ranked at the zeta actually used
  double zeta = 0.0;
};

SearchResult run_search(const SpectralEmbedding& embedding, const PipelineConfig& config);

}  // namespace ies
