#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ies {

/// Every knob of the end-to-end pipeline. Serialized as flat `key = value` lines.
struct PipelineConfig {
  // dataset
  std::string manifold = "D1";
  std::int64_t n = 5000;
  double sigma = 0.05;
  std::uint64_t seed = 1;
  std::string input;  // load this file instead of generating when non-empty

  // graph and embedding
  double eps = 0.0;   // 0 selects the bandwidth heuristic
  std::int64_t heuristic_k = 10;
  double c = 3.0;
  std::int64_t m = 20;

  // selection
  std::int64_t d = 2;
  std::int64_t s = 2;
  std::optional<double> zeta;  // nullopt means automatic
  double alpha = 0.75;
  std::uint64_t cap = 1'000'000;
  std::string method = "exhaustive";  // or greedy

  // diagnostics
  std::int64_t top_k = 2;
  double low_volume = 0.1;
  double theta = 0.1;
  std::int64_t llr_coords = 0;
  std::vector<std::int64_t> bench_sizes{2000, 4000, 8000, 16000};

  std::string output_dir = "out";
  unsigned threads = 0;

  /// Throws Parameter when a field is outside its documented range.
  void validate() const;

  std::string to_text() const;
  static PipelineConfig from_text(const std::string& text, const std::string& source = "config");

  static PipelineConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// FNV-1a hash of to_text(), as 16 hex digits.
  std::string hash() const;
};

/// Sets one field from its textual value; unknown keys raise Parameter.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace ies
