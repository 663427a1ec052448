#include "ies/pipeline.hpp"

#include "ies/errors.hpp"

namespace ies {

Dataset make_dataset(const PipelineConfig& config) {
  if (!config.input.empty()) {
    Dataset ds = load(config.input);
    ds.validate();
    return ds;
  }
  Dataset ds = generate(parse_manifold(config.manifold), config.n, config.sigma, config.seed);
  ds.validate();
  return ds;
}

double resolve_eps(const PipelineConfig& config, const Dataset& ds) {
  if (config.eps > 0.0) return config.eps;
  return bandwidth_heuristic(ds, config.heuristic_k, config.seed);
}

EmbedResult run_embed(const Dataset& ds, double eps, double c, Index m) {
  EmbedResult out;
  out.eps = eps;
  out.c = c;
  const SparseKernel kernel = build_kernel(ds, eps, c);
  out.warnings = kernel.warnings;
  auto laplacian = std::make_shared<const Laplacian>(build_laplacian(kernel));
  out.embedding = embed(laplacian, m);
  return out;
}

EmbedResult run_embed(const Dataset& ds, const PipelineConfig& config) {
  return run_embed(ds, resolve_eps(config, ds), config.c, config.m);
}

SearchResult run_search(const SpectralEmbedding& embedding, const PipelineConfig& config) {
  if (embedding.m < config.m)
    fail(ErrorKind::Dimension, "embedding has m = " + std::to_string(embedding.m) +
                                   " but config asks for m = " + std::to_string(config.m));
  SpectralEmbedding emb = embedding;
  if (emb.m > config.m) {
    emb.Y.conservativeResize(Eigen::NoChange, config.m);
    emb.lambdas.conservativeResize(config.m + 1);
    emb.m = config.m;
  }
  SearchResult out;
  out.field = rmetric(emb, config.d);
  out.lambdas = emb.lambdas * emb.lambda_scale();

  const bool greedy = config.method == "greedy";
  const bool need_pool = !greedy || !config.zeta;
  if (need_pool) {
    out.pool = build_pool(out.field, out.lambdas, static_cast<int>(config.s), config.cap);
    out.path = build_path(path_lines(*out.pool));
  }
  if (config.zeta) {
    out.zeta = *config.zeta;
  } else {
    out.selection = select(*out.path, out.field, *out.pool, config.alpha);
    out.zeta = out.selection->zeta_star;
  }
  out.report = greedy ? search_greedy(out.field, out.lambdas, out.zeta)
                      : rank_pool(*out.pool, out.zeta);
  return out;
}

}  // namespace ies
