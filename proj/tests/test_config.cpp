#include "doctest.h"

#include "ies/config.hpp"
#include "ies/errors.hpp"

#include <cmath>
#include <filesystem>

using namespace ies;

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(1e-12) == "1e-12");
  for (double v : {0.3, 1.0 / 3.0, 2.5e-7, 12345.678, std::nextafter(1.0, 2.0)})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("config text round trip") {
  PipelineConfig c;
  c.manifold = "D7";
  c.n = 1234;
  c.sigma = 0.01;
  c.eps = 0.35;
  c.s = 3;
  c.zeta = 1.25;
  c.method = "greedy";
  c.bench_sizes = {100, 200};
  const PipelineConfig back = PipelineConfig::from_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(back.hash() == c.hash());
  CHECK(back.zeta.has_value());
  CHECK(*back.zeta == 1.25);
  CHECK(back.bench_sizes == std::vector<std::int64_t>{100, 200});
  CHECK(PipelineConfig{}.hash() != c.hash());
  CHECK(c.hash().size() == 16);
}

TEST_CASE("config file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "ies_test_config.txt";
  PipelineConfig c;
  c.alpha = 0.6;
  c.save(path);
  CHECK(PipelineConfig::load(path).to_text() == c.to_text());
  std::filesystem::remove(path);
}

TEST_CASE("comments, blanks and automatic zeta") {
  const PipelineConfig c = PipelineConfig::from_text("# run\n\nmanifold = D3\n  n=800  # small\nzeta = auto\n");
  CHECK(c.manifold == "D3");
  CHECK(c.n == 800);
  CHECK_FALSE(c.zeta.has_value());
}

TEST_CASE("config errors name their line") {
  try {
    PipelineConfig::from_text("n = 10\nbogus = 1\n", "run.cfg");
    FAIL("expected parameter error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parameter);
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(PipelineConfig::from_text("n = ten\n"), Error);
  CHECK_THROWS_AS(PipelineConfig::from_text("no equals sign\n"), Error);
  CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/ies.cfg"), Error);
}

TEST_CASE("validation rejects out of range values") {
  auto invalid = [](auto mutate) {
    PipelineConfig c;
    mutate(c);
    try {
      c.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::Parameter;
    }
    return false;
  };
  CHECK(invalid([](PipelineConfig& c) { c.alpha = 1.0; }));
  CHECK(invalid([](PipelineConfig& c) { c.alpha = 0.0; }));
  CHECK(invalid([](PipelineConfig& c) { c.s = 1; }));
  CHECK(invalid([](PipelineConfig& c) { c.eps = -1.0; }));
  CHECK(invalid([](PipelineConfig& c) { c.zeta = -0.5; }));
  CHECK(invalid([](PipelineConfig& c) { c.method = "random"; }));
  CHECK(invalid([](PipelineConfig& c) { c.d = 0; }));
  PipelineConfig ok;
  CHECK_NOTHROW(ok.validate());
}
