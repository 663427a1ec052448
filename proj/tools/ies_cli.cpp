#include "ies/diagnostics.hpp"
#include "ies/errors.hpp"
#include "ies/parallel.hpp"
#include "ies/serialize.hpp"
#include "ies/version.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace ies;

namespace {

struct Context {
  std::string config_path;
  std::map<std::string, std::string> overrides;  // config key -> raw flag value
  std::string output_dir_flag;
  std::string dataset_path;
  std::string embedding_path;
  bool bench = false;
};

void add_key(CLI::App* app, Context& ctx, const std::string& flag, const std::string& key,
             const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&ctx, key](const std::string& v) { ctx.overrides[key] = v; }, help);
}

PipelineConfig resolve_config(const Context& ctx) {
  PipelineConfig config = ctx.config_path.empty() ? PipelineConfig{}
                                                  : PipelineConfig::load(ctx.config_path);
  for (const auto& [key, value] : ctx.overrides) set_config_value(config, key, value);
  if (const char* env = std::getenv("IES_OUTPUT_DIR"); env && *env) config.output_dir = env;
  if (!ctx.output_dir_flag.empty()) config.output_dir = ctx.output_dir_flag;
  config.validate();
  set_thread_limit(config.threads);
  return config;
}

fs::path output_dir(const PipelineConfig& config) {
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string());
  return dir;
}

fs::path upstream(const std::string& flag_value, const fs::path& dir, const char* name) {
  const fs::path p = flag_value.empty() ? dir / name : fs::path(flag_value);
  if (!fs::exists(p))
    fail(ErrorKind::Dependency, "missing upstream artifact " + p.string() +
                                    " (run the producing command first)");
  return p;
}

void write_manifest(const fs::path& dir, const std::string& command, const PipelineConfig& config,
                    double seconds, const std::vector<fs::path>& outputs) {
  Json files = Json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  write_json(Json{{"command", command},
                  {"version", kVersion},
                  {"config_hash", config.hash()},
                  {"config", config.to_text()},
                  {"wall_seconds", seconds},
                  {"outputs", files}},
             dir / ("manifest_" + command + ".json"));
  config.save(dir / ("config_" + command + ".txt"));
}

// Rebuilds the Laplacian the stored embedding came from and reattaches it.
SpectralEmbedding restore_embedding(const Dataset& ds, const StoredEmbedding& stored) {
  if (stored.Y.rows() != ds.size())
    fail(ErrorKind::Dimension, "embedding has " + std::to_string(stored.Y.rows()) +
                                   " rows but the dataset has " + std::to_string(ds.size()));
  SpectralEmbedding emb;
  emb.laplacian = std::make_shared<const Laplacian>(build_laplacian(build_kernel(ds, stored.eps, stored.c)));
  emb.Y = stored.Y;
  emb.lambdas = stored.lambdas;
  emb.m = stored.Y.cols();
  return emb;
}

// Without an explicit --m, a config asking for more eigenvectors than were stored uses them all.
void adopt_width(PipelineConfig& config, const Context& ctx, const StoredEmbedding& stored) {
  if (!ctx.overrides.count("m") && config.m > stored.Y.cols()) {
    config.m = stored.Y.cols();
    config.validate();
  }
}

std::vector<fs::path> cmd_generate(const PipelineConfig& config) {
  const fs::path dir = output_dir(config);
  const Dataset ds = make_dataset(config);
  const fs::path out = dir / "dataset.json";
  save(ds, out, FileFormat::Json);
  std::cout << "generated " << ds.name << ": n = " << ds.size() << ", D = " << ds.dim() << '\n';
  return {out};
}

std::vector<fs::path> cmd_embed(const PipelineConfig& config, const Context& ctx) {
  const fs::path dir = output_dir(config);
  const Dataset ds = load(upstream(ctx.dataset_path, dir, "dataset.json"));
  ds.validate();
  const EmbedResult result = run_embed(ds, config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  const fs::path json = dir / "embedding.json", csv = dir / "embedding.csv";
  write_json(embedding_to_json(result), json);
  write_embedding_csv(result.embedding, csv);
  std::cout << "embedded n = " << ds.size() << " with eps = " << result.eps << ", m = "
            << result.embedding.m << '\n';
  return {json, csv};
}

std::vector<fs::path> cmd_search(PipelineConfig& config, const Context& ctx) {
  const fs::path dir = output_dir(config);
  const Dataset ds = load(upstream(ctx.dataset_path, dir, "dataset.json"));
  const StoredEmbedding stored =
      embedding_from_json(read_json(upstream(ctx.embedding_path, dir, "embedding.json")));
  adopt_width(config, ctx, stored);
  const SpectralEmbedding emb = restore_embedding(ds, stored);
  const SearchResult result = run_search(emb, config);

  std::vector<fs::path> outputs{dir / "search.json", dir / "selection.json"};
  write_json(to_json(result.report), outputs[0]);
  write_json(selection_to_json(result, config.alpha), outputs[1]);
  if (result.path) {
    outputs.push_back(dir / "path.json");
    write_json(to_json(*result.path, result.selection), outputs.back());
  }
  if (result.selection) {
    outputs.push_back(dir / "regret.csv");
    write_regret_csv(*result.selection, outputs.back());
  }
  const CoordSet& best = result.selection ? result.selection->S : result.report.ranked.front().S;
  std::cout << "selected S = {" << set_label(best) << "} at zeta = " << result.zeta << '\n';
  return outputs;
}

std::vector<fs::path> cmd_baseline(const PipelineConfig& config, const Context& ctx) {
  const fs::path dir = output_dir(config);
  const StoredEmbedding stored =
      embedding_from_json(read_json(upstream(ctx.embedding_path, dir, "embedding.json")));
  LlrOptions options;
  options.max_coords = config.llr_coords;
  const LlrReport report = llr_coord_search(stored.Y, options);
  const fs::path out = dir / "llr.json";
  write_json(to_json(report), out);
  std::cout << "LLR order:";
  for (int k : report.order) std::cout << ' ' << k;
  std::cout << '\n';
  return {out};
}

std::vector<fs::path> cmd_diagnose(PipelineConfig& config, const Context& ctx) {
  const fs::path dir = output_dir(config);
  const Dataset ds = load(upstream(ctx.dataset_path, dir, "dataset.json"));
  const StoredEmbedding stored =
      embedding_from_json(read_json(upstream(ctx.embedding_path, dir, "embedding.json")));
  const Json search = read_json(upstream("", dir, "search.json"));
  adopt_width(config, ctx, stored);
  const SpectralEmbedding emb = restore_embedding(ds, stored);
  const MetricField field = rmetric(emb, config.d);

  std::vector<CoordSet> top;
  try {
    for (const auto& r : search.at("ranked")) {
      if (static_cast<std::int64_t>(top.size()) >= config.top_k) break;
      top.push_back(r.at("S").get<CoordSet>());
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed search.json: ") + e.what());
  }
  if (top.size() < 2) fail(ErrorKind::Parameter, "search.json lists fewer than 2 sets");

  std::vector<fs::path> outputs{dir / "cardinality.json", dir / "histograms.csv"};
  const CardinalityReport card = cardinality_check(field, top, config.theta, config.low_volume);
  write_json(to_json(card), outputs[0]);
  std::vector<VolHistogram> hists = card.sets;
  hists.push_back(card.union_set);
  write_histograms_csv(hists, outputs[1]);
  std::cout << "cardinality: " << to_string(card.recommendation) << '\n';

  Json disparity = Json::array();
  if (ds.truth) {
    for (const CoordSet& S : top) {
      if (static_cast<Index>(S.size()) != ds.truth->cols()) continue;
      Eigen::MatrixXd test(ds.size(), static_cast<Index>(S.size()));
      for (std::size_t k = 0; k < S.size(); ++k) test.col(static_cast<Index>(k)) = stored.Y.col(S[k] - 1);
      Json entry = to_json(procrustes_m2(*ds.truth, test));
      entry["S"] = S;
      disparity.push_back(entry);
    }
  }
  outputs.push_back(dir / "disparity.json");
  write_json(Json{{"scores", disparity}}, outputs.back());

  if (ctx.bench) {
    const BenchResult bench = runtime_bench(config, config.bench_sizes);
    outputs.push_back(dir / "bench.csv");
    write_bench_csv(bench, outputs.back());
    for (const auto& [stage, slope] : bench.slopes)
      std::cout << "slope " << stage << ": " << slope << '\n';
  }
  return outputs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Independent eigencoordinate selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Context ctx;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", ctx.config_path, "key = value config file");
    sub->add_option("--output-dir", ctx.output_dir_flag, "artifact directory");
    add_key(sub, ctx, "--threads", "threads", "worker thread cap (0 = all cores)");
    add_key(sub, ctx, "--seed", "seed", "random seed");
  };

  CLI::App* gen = app.add_subcommand("generate", "sample a benchmark manifold");
  common(gen);
  add_key(gen, ctx, "--manifold", "manifold", "D1..D13");
  add_key(gen, ctx, "--n", "n", "number of points");
  add_key(gen, ctx, "--sigma", "sigma", "ambient noise scale");
  add_key(gen, ctx, "--input", "input", "import a CSV/JSON point cloud instead");

  CLI::App* emb = app.add_subcommand("embed", "graph Laplacian and spectral embedding");
  common(emb);
  emb->add_option("--dataset", ctx.dataset_path, "dataset file");
  add_key(emb, ctx, "--eps", "eps", "kernel bandwidth (0 = heuristic)");
  add_key(emb, ctx, "--k", "heuristic_k", "neighbor rank for the bandwidth heuristic");
  add_key(emb, ctx, "--c", "c", "radius multiplier");
  add_key(emb, ctx, "--m", "m", "number of eigenvectors");

  CLI::App* sea = app.add_subcommand("search", "metric estimation and coordinate search");
  common(sea);
  sea->add_option("--dataset", ctx.dataset_path, "dataset file");
  sea->add_option("--embedding", ctx.embedding_path, "embedding file");
  add_key(sea, ctx, "--m", "m", "number of eigenvectors used");
  add_key(sea, ctx, "--d", "d", "intrinsic dimension");
  add_key(sea, ctx, "--s", "s", "number of coordinates to select");
  add_key(sea, ctx, "--zeta", "zeta", "regularization weight or auto");
  add_key(sea, ctx, "--alpha", "alpha", "regret percentile");
  add_key(sea, ctx, "--method", "method", "exhaustive or greedy");
  add_key(sea, ctx, "--cap", "cap", "maximum number of candidate sets");

  CLI::App* base = app.add_subcommand("baseline", "local linear regression coordinate ranking");
  common(base);
  base->add_option("--embedding", ctx.embedding_path, "embedding file");
  add_key(base, ctx, "--coords", "llr_coords", "rank only the first coordinates (0 = all)");

  CLI::App* diag = app.add_subcommand("diagnose", "histograms, cardinality, disparity, benchmarks");
  common(diag);
  diag->add_option("--dataset", ctx.dataset_path, "dataset file");
  diag->add_option("--embedding", ctx.embedding_path, "embedding file");
  add_key(diag, ctx, "--m", "m", "number of eigenvectors");
  add_key(diag, ctx, "--d", "d", "intrinsic dimension");
  add_key(diag, ctx, "--s", "s", "subset size for the benchmark search");
  add_key(diag, ctx, "--top-k", "top_k", "number of top sets compared");
  add_key(diag, ctx, "--theta", "theta", "mass threshold");
  add_key(diag, ctx, "--low-volume", "low_volume", "volume counted as low");
  add_key(diag, ctx, "--eps", "eps", "benchmark bandwidth at the reference n");
  add_key(diag, ctx, "--n", "n", "benchmark reference n");
  add_key(diag, ctx, "--manifold", "manifold", "benchmark manifold");
  add_key(diag, ctx, "--bench-sizes", "bench_sizes", "comma separated sizes");
  diag->add_flag("--bench", ctx.bench, "also run the runtime benchmark");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineConfig config = resolve_config(ctx);
    std::vector<fs::path> outputs;
    std::string name;
    if (gen->parsed()) {
      name = "generate";
      outputs = cmd_generate(config);
    } else if (emb->parsed()) {
      name = "embed";
      outputs = cmd_embed(config, ctx);
    } else if (sea->parsed()) {
      name = "search";
      outputs = cmd_search(config, ctx);
    } else if (base->parsed()) {
      name = "baseline";
      outputs = cmd_baseline(config, ctx);
    } else {
      name = "diagnose";
      outputs = cmd_diagnose(config, ctx);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(config.output_dir, name, config, seconds, outputs);
    return 0;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
