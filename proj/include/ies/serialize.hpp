#pragma once

#include "ies/baseline.hpp"
#include "ies/diagnostics.hpp"
#include "ies/pipeline.hpp"

#include "json.hpp"

#include <filesystem>

namespace ies {

using Json = nlohmann::json;

Json to_json(const Eigen::MatrixXd& matrix);
Json to_json(const Eigen::VectorXd& vector);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what);
Eigen::VectorXd vector_from_json(const Json& j, const std::string& what);

/// {"eps", "c", "m", "lambda_scale", "lambdas", "Y"}
Json embedding_to_json(const EmbedResult& result);

struct StoredEmbedding {
  double eps = 0.0;
  double c = 3.0;
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd Y;
};
StoredEmbedding embedding_from_json(const Json& j);

void write_embedding_csv(const SpectralEmbedding& embedding, const std::filesystem::path& path);

Json to_json(const ScoredSubset& subset);
Json to_json(const SearchReport& report);
Json to_json(const RegularizationPath& path, const std::optional<Selection>& selection);
Json selection_to_json(const SearchResult& result, double alpha);
void write_regret_csv(const Selection& selection, const std::filesystem::path& path);

Json to_json(const LlrReport& report);
Json to_json(const CardinalityReport& report);
Json to_json(const DisparityScore& score);
void write_histograms_csv(const std::vector<VolHistogram>& histograms,
                          const std::filesystem::path& path);
void write_bench_csv(const BenchResult& bench, const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);

std::string set_label(const CoordSet& S);

}  // namespace ies
