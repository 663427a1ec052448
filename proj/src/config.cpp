#include "ies/config.hpp"

#include "ies/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ies {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    fail(ErrorKind::Parse, "bad value '" + value + "' for key '" + key + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) fail(ErrorKind::Parse, "non-finite value for key '" + key + "'");
  }
  return out;
}

std::vector<std::int64_t> parse_sizes(const std::string& key, const std::string& value) {
  std::vector<std::int64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<std::int64_t>(key, trim(item)));
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void set_config_value(PipelineConfig& c, const std::string& key, const std::string& value) {
  if (key == "manifold") c.manifold = value;
  else if (key == "n") c.n = parse_number<std::int64_t>(key, value);
  else if (key == "sigma") c.sigma = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "input") c.input = value;
  else if (key == "eps") c.eps = parse_number<double>(key, value);
  else if (key == "heuristic_k") c.heuristic_k = parse_number<std::int64_t>(key, value);
  else if (key == "c") c.c = parse_number<double>(key, value);
  else if (key == "m") c.m = parse_number<std::int64_t>(key, value);
  else if (key == "d") c.d = parse_number<std::int64_t>(key, value);
  else if (key == "s") c.s = parse_number<std::int64_t>(key, value);
  else if (key == "zeta") {
    if (value == "auto") c.zeta.reset();
    else c.zeta = parse_number<double>(key, value);
  }
  else if (key == "alpha") c.alpha = parse_number<double>(key, value);
  else if (key == "cap") c.cap = parse_number<std::uint64_t>(key, value);
  else if (key == "method") c.method = value;
  else if (key == "top_k") c.top_k = parse_number<std::int64_t>(key, value);
  else if (key == "low_volume") c.low_volume = parse_number<double>(key, value);
  else if (key == "theta") c.theta = parse_number<double>(key, value);
  else if (key == "llr_coords") c.llr_coords = parse_number<std::int64_t>(key, value);
  else if (key == "bench_sizes") c.bench_sizes = parse_sizes(key, value);
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "threads") c.threads = parse_number<unsigned>(key, value);
  else fail(ErrorKind::Parameter, "unknown config key '" + key + "'");
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::Parameter, what);
  };
  require(n >= 1, "n must be >= 1");
  require(sigma >= 0.0, "sigma must be >= 0");
  require(eps >= 0.0, "eps must be >= 0 (0 selects the heuristic)");
  require(heuristic_k >= 1, "heuristic_k must be >= 1");
  require(c >= 1.0, "c must be >= 1");
  require(m >= 1, "m must be >= 1");
  require(d >= 1 && d <= m, "d must satisfy 1 <= d <= m");
  require(s >= d && s <= m, "s must satisfy d <= s <= m");
  require(!zeta || *zeta >= 0.0, "zeta must be >= 0 or auto");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(cap >= 1, "cap must be >= 1");
  require(method == "exhaustive" || method == "greedy", "method must be exhaustive or greedy");
  require(top_k >= 2, "top_k must be >= 2");
  require(low_volume > 0.0 && low_volume < 1.0, "low_volume must lie in (0, 1)");
  require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
  require(llr_coords >= 0, "llr_coords must be >= 0");
  for (std::size_t k = 0; k < bench_sizes.size(); ++k) {
    require(bench_sizes[k] >= 2, "bench sizes must be >= 2");
    require(k == 0 || bench_sizes[k] > bench_sizes[k - 1], "bench sizes must be ascending");
  }
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  out << "manifold = " << manifold << '\n'
      << "n = " << n << '\n'
      << "sigma = " << format_double(sigma) << '\n'
      << "seed = " << seed << '\n'
      << "input = " << input << '\n'
      << "eps = " << format_double(eps) << '\n'
      << "heuristic_k = " << heuristic_k << '\n'
      << "c = " << format_double(c) << '\n'
      << "m = " << m << '\n'
      << "d = " << d << '\n'
      << "s = " << s << '\n'
      << "zeta = " << (zeta ? format_double(*zeta) : std::string("auto")) << '\n'
      << "alpha = " << format_double(alpha) << '\n'
      << "cap = " << cap << '\n'
      << "method = " << method << '\n'
      << "top_k = " << top_k << '\n'
      << "low_volume = " << format_double(low_volume) << '\n'
      << "theta = " << format_double(theta) << '\n'
      << "llr_coords = " << llr_coords << '\n'
      << "bench_sizes = ";
  for (std::size_t k = 0; k < bench_sizes.size(); ++k) out << (k ? "," : "") << bench_sizes[k];
  out << '\n'
      << "output_dir = " << output_dir << '\n'
      << "threads = " << threads << '\n';
  return out.str();
}

PipelineConfig PipelineConfig::from_text(const std::string& text, const std::string& source) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Parse, source + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      set_config_value(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.kind(), source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path.string());
}

void PipelineConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << to_text();
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

std::string PipelineConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ies
