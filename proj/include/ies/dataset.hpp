#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ies {

using Index = Eigen::Index;

/// A point cloud, optionally paired with its intrinsic parameterization.
struct Dataset {
  std::string name;
  double noise_sigma = 0.0;
  Eigen::MatrixXd points;                // n x D ambient coordinates
  std::optional<Eigen::MatrixXd> truth;  // n x k intrinsic parameters

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  /// Throws Parameter if any coordinate is non-finite or truth has the wrong row count.
  void validate() const;
};

/// The synthetic benchmark catalog.
enum class Manifold {
  D1,   // strip [-2,2] x [-4pi,4pi]
  D2,   // strip with a central cavity
  D3,   // swiss roll
  D4,   // swiss roll with cavity
  D5,   // Gaussian bump over a filled ellipse
  D6,   // cube [-1,1] x [-2,2] x [-4,4]
  D7,   // high torus (a,b,h) = (3,2,8)
  D8,   // wide torus (10,2,2)
  D9,   // z-asymmetrized high torus
  D10,  // x-asymmetrized high torus
  D11,  // z-asymmetrized wide torus
  D12,  // x-asymmetrized wide torus
  D13,  // three-torus in R^4
};

inline constexpr int kManifoldCount = 13;

Manifold parse_manifold(std::string_view id);
std::string manifold_id(Manifold m);
std::string manifold_description(Manifold m);
/// Intrinsic dimension of a catalog manifold.
int manifold_dimension(Manifold m);

/// Samples n points of a catalog manifold plus isotropic Gaussian noise.
/// Output is a pure function of (m, n, noise_sigma, seed).
Dataset generate(Manifold m, Index n, double noise_sigma, std::uint64_t seed);

enum class FileFormat { Csv, Json };

/// csv for *.csv, json otherwise.
FileFormat format_for(const std::filesystem::path& path);

Dataset load(const std::filesystem::path& path, FileFormat format);
Dataset load(const std::filesystem::path& path);

/// Writes 17 significant digits so load(save(ds)) reproduces points exactly.
void save(const Dataset& ds, const std::filesystem::path& path, FileFormat format);
void save(const Dataset& ds, const std::filesystem::path& path);

/// Parses an n x D numeric table; `source` labels error messages.
Eigen::MatrixXd parse_csv_matrix(std::string_view text, std::string_view source);

}  // namespace ies
