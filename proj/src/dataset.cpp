#include "ies/dataset.hpp"

#include "ies/errors.hpp"
#include "ies/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace ies {
namespace {

constexpr double kPi = std::numbers::pi;

struct CatalogEntry {
  Manifold id;
  const char* key;
  const char* description;
  int dimension;
};

constexpr std::array<CatalogEntry, kManifoldCount> kCatalog{{
    {Manifold::D1, "D1", "two dimensional strip (aspect ratio 2pi)", 2},
    {Manifold::D2, "D2", "two dimensional strip with cavity", 2},
    {Manifold::D3, "D3", "swiss roll", 2},
    {Manifold::D4, "D4", "swiss roll with cavity", 2},
    {Manifold::D5, "D5", "Gaussian manifold", 2},
    {Manifold::D6, "D6", "three dimensional cube", 3},
    {Manifold::D7, "D7", "high torus", 2},
    {Manifold::D8, "D8", "wide torus", 2},
    {Manifold::D9, "D9", "z-asymmetrized high torus", 2},
    {Manifold::D10, "D10", "x-asymmetrized high torus", 2},
    {Manifold::D11, "D11", "z-asymmetrized wide torus", 2},
    {Manifold::D12, "D12", "x-asymmetrized wide torus", 2},
    {Manifold::D13, "D13", "three-torus", 3},
}};

const CatalogEntry& entry(Manifold m) {
  return kCatalog[static_cast<std::size_t>(m)];
}

// Strip sample: column 0 is the short side [-2,2], column 1 the long side [-4pi,4pi].
void draw_strip(CounterRng& rng, double& short_side, double& long_side) {
  short_side = rng.uniform(-2.0, 2.0);
  long_side = rng.uniform(-4.0 * kPi, 4.0 * kPi);
}

bool in_cavity(double short_side, double long_side) {
  return std::abs(long_side) < 4.0 * kPi / 3.0 && std::abs(short_side) < 2.0 / 3.0;
}

struct TorusShape {
  double a, b, h;
};

void torus_point(const TorusShape& t, double alpha, double beta, double* out) {
  const double ring = t.a + t.b * std::cos(alpha);
  out[0] = ring * std::cos(beta);
  out[1] = ring * std::sin(beta);
  out[2] = t.h * std::sin(alpha);
}

// column <- (column - min(column))^power / divisor
void asymmetrize(Eigen::MatrixXd& points, Index column, double power, double divisor) {
  const double lo = points.col(column).minCoeff();
  for (Index i = 0; i < points.rows(); ++i)
    points(i, column) = std::pow(points(i, column) - lo, power) / divisor;
}

// Strip-based generators (optionally with cavity) fill `strip` with n accepted
// samples. Candidate k draws from stream (seed, k); the same stream then
// supplies that point's noise so rejection does not perturb later points.
struct StripSample {
  Eigen::MatrixXd strip;                  // n x 2 (short, long)
  std::vector<std::uint64_t> candidate;   // stream counter of each accepted point
};

StripSample sample_strip(Index n, std::uint64_t seed, bool cavity) {
  StripSample out;
  out.strip.resize(n, 2);
  out.candidate.reserve(static_cast<std::size_t>(n));
  std::uint64_t counter = 0;
  Index filled = 0;
  while (filled < n) {
    CounterRng rng(seed, counter);
    double s = 0, l = 0;
    draw_strip(rng, s, l);
    if (!cavity || !in_cavity(s, l)) {
      out.strip(filled, 0) = s;
      out.strip(filled, 1) = l;
      out.candidate.push_back(counter);
      ++filled;
    }
    ++counter;
  }
  return out;
}

void add_noise(Eigen::MatrixXd& points, double sigma, std::uint64_t seed,
               const std::vector<std::uint64_t>& counters) {
  if (sigma == 0.0) return;
  // A separate key keeps noise independent of the shape draws.
  const std::uint64_t noise_seed = CounterRng::mix(seed ^ 0xD1B54A32D192ED03ULL);
  for (Index i = 0; i < points.rows(); ++i) {
    CounterRng rng(noise_seed, counters[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < points.cols(); ++j) points(i, j) += sigma * rng.normal();
  }
}

std::vector<std::uint64_t> identity_counters(Index n) {
  std::vector<std::uint64_t> c(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  return c;
}

void swiss_roll(const Eigen::MatrixXd& strip, Eigen::MatrixXd& points) {
  points.resize(strip.rows(), 3);
  for (Index i = 0; i < strip.rows(); ++i) {
    const double x0 = strip(i, 1);  // rolled along the long side
    const double y0 = strip(i, 0);
    points(i, 0) = x0 * std::cos(x0) / 2.0;
    points(i, 1) = y0;
    points(i, 2) = x0 * std::sin(x0) / 2.0;
  }
}

Dataset generate_torus(Index n, std::uint64_t seed, const TorusShape& shape) {
  Dataset ds;
  ds.points.resize(n, 3);
  Eigen::MatrixXd truth(n, 2);
  for (Index i = 0; i < n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const double alpha = rng.uniform(0.0, 2.0 * kPi);
    const double beta = rng.uniform(0.0, 2.0 * kPi);
    truth(i, 0) = alpha;
    truth(i, 1) = beta;
    double p[3];
    torus_point(shape, alpha, beta, p);
    for (int j = 0; j < 3; ++j) ds.points(i, j) = p[j];
  }
  ds.truth = std::move(truth);
  return ds;
}

}  // namespace

void Dataset::validate() const {
  for (Index i = 0; i < points.rows(); ++i)
    for (Index j = 0; j < points.cols(); ++j)
      if (!std::isfinite(points(i, j)))
        fail(ErrorKind::Parameter, "non-finite coordinate at row " + std::to_string(i + 1) +
                                       ", column " + std::to_string(j + 1));
  if (truth && truth->rows() != points.rows())
    fail(ErrorKind::Parameter, "truth has " + std::to_string(truth->rows()) +
                                   " rows but points has " + std::to_string(points.rows()));
}

Manifold parse_manifold(std::string_view id) {
  for (const auto& e : kCatalog)
    if (id == e.key) return e.id;
  fail(ErrorKind::Catalog, "unknown manifold '" + std::string(id) + "' (expected D1..D13)");
}

std::string manifold_id(Manifold m) { return entry(m).key; }
std::string manifold_description(Manifold m) { return entry(m).description; }
int manifold_dimension(Manifold m) { return entry(m).dimension; }

Dataset generate(Manifold m, Index n, double noise_sigma, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::Parameter, "n must be >= 1");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    fail(ErrorKind::Parameter, "noise_sigma must be a finite value >= 0");

  Dataset ds;
  std::vector<std::uint64_t> counters = identity_counters(n);

  switch (m) {
    case Manifold::D1:
    case Manifold::D2:
    case Manifold::D3:
    case Manifold::D4: {
      const bool cavity = (m == Manifold::D2 || m == Manifold::D4);
      StripSample sample = sample_strip(n, seed, cavity);
      if (m == Manifold::D1 || m == Manifold::D2)
        ds.points = sample.strip;
      else
        swiss_roll(sample.strip, ds.points);
      ds.truth = std::move(sample.strip);
      counters = std::move(sample.candidate);
      break;
    }
    case Manifold::D5: {
      ds.points.resize(n, 3);
      Eigen::MatrixXd truth(n, 2);
      for (Index i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        // Uniform over the filled ellipse (x/6)^2 + (y/2)^2 <= 1.
        const double radius = std::sqrt(rng.uniform());
        const double angle = rng.uniform(0.0, 2.0 * kPi);
        const double x = 6.0 * radius * std::cos(angle);
        const double y = 2.0 * radius * std::sin(angle);
        truth(i, 0) = x;
        truth(i, 1) = y;
        ds.points(i, 0) = x;
        ds.points(i, 1) = y;
        ds.points(i, 2) = std::exp(-((x / 3.0) * (x / 3.0) + y * y) / 2.0);
      }
      ds.truth = std::move(truth);
      break;
    }
    case Manifold::D6: {
      ds.points.resize(n, 3);
      for (Index i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        ds.points(i, 0) = rng.uniform(-1.0, 1.0);
        ds.points(i, 1) = rng.uniform(-2.0, 2.0);
        ds.points(i, 2) = rng.uniform(-4.0, 4.0);
      }
      ds.truth = ds.points;
      break;
    }
    case Manifold::D7: ds = generate_torus(n, seed, {3, 2, 8}); break;
    case Manifold::D8: ds = generate_torus(n, seed, {10, 2, 2}); break;
    case Manifold::D9:
      ds = generate_torus(n, seed, {3, 2, 8});
      asymmetrize(ds.points, 2, 3.0, 1500.0);
      break;
    case Manifold::D10:
      ds = generate_torus(n, seed, {3, 2, 8});
      asymmetrize(ds.points, 0, 2.0, 10.0);
      break;
    case Manifold::D11:
      ds = generate_torus(n, seed, {10, 2, 2});
      asymmetrize(ds.points, 2, 3.0, 50.0);
      break;
    case Manifold::D12:
      ds = generate_torus(n, seed, {10, 2, 2});
      asymmetrize(ds.points, 0, 3.0, 1000.0);
      break;
    case Manifold::D13: {
      constexpr double a1 = 8, a2 = 2, a3 = 1;
      ds.points.resize(n, 4);
      Eigen::MatrixXd truth(n, 3);
      for (Index i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const double t1 = rng.uniform(0.0, 2.0 * kPi);
        const double t2 = rng.uniform(0.0, 2.0 * kPi);
        const double t3 = rng.uniform(0.0, 2.0 * kPi);
        truth(i, 0) = t1;
        truth(i, 1) = t2;
        truth(i, 2) = t3;
        const double r2 = a2 + a1 * std::cos(t1);
        const double r3 = a3 + r2 * std::cos(t2);
        ds.points(i, 0) = a1 * std::sin(t1);
        ds.points(i, 1) = r2 * std::sin(t2);
        ds.points(i, 2) = r3 * std::sin(t3);
        ds.points(i, 3) = r3 * std::cos(t3);
      }
      ds.truth = std::move(truth);
      break;
    }
  }

  add_noise(ds.points, noise_sigma, seed, counters);
  ds.name = manifold_id(m);
  ds.noise_sigma = noise_sigma;
  return ds;
}

FileFormat format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? FileFormat::Csv : FileFormat::Json;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// "# name=D1, sigma=0.05"
void parse_csv_header(std::string_view line, Dataset& ds) {
  line.remove_prefix(1);
  while (!line.empty()) {
    const auto comma = line.find(',');
    auto field = trim(line.substr(0, comma));
    line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = trim(field.substr(0, eq));
    const auto value = trim(field.substr(eq + 1));
    if (key == "name") {
      ds.name = std::string(value);
    } else if (key == "sigma") {
      double v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec == std::errc() && ptr == value.data() + value.size()) ds.noise_sigma = v;
    }
  }
}

}  // namespace

Eigen::MatrixXd parse_csv_matrix(std::string_view text, std::string_view source) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    Index col = 0;
    while (true) {
      const auto comma = line.find(',');
      const auto cell = trim(line.substr(0, comma));
      double v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      const std::string where = std::string(source) + ":" + std::to_string(line_no) +
                                " row " + std::to_string(rows + 1) + ", column " +
                                std::to_string(col + 1);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        fail(ErrorKind::Parse, "non-numeric cell '" + std::string(cell) + "' at " + where);
      if (!std::isfinite(v))
        fail(ErrorKind::Parse, "non-finite cell '" + std::string(cell) + "' at " + where);
      values.push_back(v);
      ++col;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (cols < 0) {
      cols = col;
    } else if (col != cols) {
      fail(ErrorKind::Parse, std::string(source) + ":" + std::to_string(line_no) + " row " +
                                 std::to_string(rows + 1) + " has " + std::to_string(col) +
                                 " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::Parse, std::string(source) + ": no data rows");
  Eigen::MatrixXd out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  return out;
}

namespace {

Eigen::MatrixXd json_matrix(const nlohmann::json& j, const std::string& what,
                            const std::string& source) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::Parse, source + ": '" + what + "' must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const auto& first = j.front();
  if (!first.is_array() || first.empty())
    fail(ErrorKind::Parse, source + ": '" + what + "' row 1 is not a non-empty array");
  const Index cols = static_cast<Index>(first.size());
  Eigen::MatrixXd out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      fail(ErrorKind::Parse, source + ": '" + what + "' row " + std::to_string(i + 1) +
                                 " has wrong length, expected " + std::to_string(cols));
    for (Index c = 0; c < cols; ++c) {
      const auto& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number())
        fail(ErrorKind::Parse, source + ": '" + what + "' row " + std::to_string(i + 1) +
                                   ", column " + std::to_string(c + 1) + " is not a number");
      out(i, c) = cell.get<double>();
    }
  }
  return out;
}

}  // namespace

Dataset load(const std::filesystem::path& path, FileFormat format) {
  const std::string text = read_file(path);
  const std::string source = path.string();
  Dataset ds;
  if (format == FileFormat::Csv) {
    std::string_view rest = text;
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      auto line = trim(rest.substr(0, nl));
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      if (line.empty()) continue;
      if (line.front() != '#') break;
      parse_csv_header(line, ds);
    }
    ds.points = parse_csv_matrix(text, source);
    if (ds.name.empty()) ds.name = path.stem().string();
  } else {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Parse, source + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("points"))
      fail(ErrorKind::Parse, source + ": expected an object with a 'points' array");
    ds.name = j.value("name", path.stem().string());
    ds.noise_sigma = j.value("noise_sigma", 0.0);
    ds.points = json_matrix(j["points"], "points", source);
    if (j.contains("truth") && !j["truth"].is_null())
      ds.truth = json_matrix(j["truth"], "truth", source);
  }
  try {
    ds.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Parse, source + ": " + e.what());
  }
  return ds;
}

Dataset load(const std::filesystem::path& path) { return load(path, format_for(path)); }

void save(const Dataset& ds, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  if (format == FileFormat::Csv) {
    out << std::setprecision(17);
    out << "# name=" << ds.name << ", sigma=" << ds.noise_sigma << '\n';
    for (Index i = 0; i < ds.size(); ++i) {
      for (Index j = 0; j < ds.dim(); ++j) {
        if (j) out << ',';
        out << ds.points(i, j);
      }
      out << '\n';
    }
  } else {
    auto rows = [](const Eigen::MatrixXd& m) {
      nlohmann::json arr = nlohmann::json::array();
      for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        arr.push_back(std::move(row));
      }
      return arr;
    };
    nlohmann::json j;
    j["name"] = ds.name;
    j["noise_sigma"] = ds.noise_sigma;
    j["points"] = rows(ds.points);
    j["truth"] = ds.truth ? rows(*ds.truth) : nlohmann::json(nullptr);
    out << j.dump();
  }
  out.flush();
  if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

void save(const Dataset& ds, const std::filesystem::path& path) {
  save(ds, path, format_for(path));
}

}  // namespace ies
