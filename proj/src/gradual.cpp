#include <algorithm>
#include <optional>

#include "gml/inference.hpp"

namespace gml {
namespace {

struct Scored {
  VariableId id;
  double p;
  double h;
};

bool more_certain(const Scored& x, const Scored& y) {
  return x.h != y.h ? x.h < y.h : x.id < y.id;
}

int decide(double p) { return p > 0.5 ? 1 : 0; }

}  // namespace

FactorGraph gradual_inference(FactorGraph graph, WeightTable weights, const InferenceConfig& config,
                              GradualStats* stats) {
  config.validate();
  GradualStats local;
  RelationWeights resolved(graph, weights);
  std::size_t since_refit = 0;

  std::vector<Scored> approx;
  for (;;) {
    // (1) evidential support ranking
    const auto candidates = rank_by_support(graph, config.top_m);
    if (candidates.empty()) break;

    // (2) cheap entropy estimate from labeled neighbors only
    approx.clear();
    for (VariableId v : candidates) {
      const double p = conditional_marginal(graph, v, resolved);
      approx.push_back({v, p, entropy(p)});
    }
    const auto k = std::min(config.top_k, approx.size());
    std::partial_sort(approx.begin(), approx.begin() + static_cast<std::ptrdiff_t>(k), approx.end(),
                      more_certain);

    // (3) exact subgraph marginals for the k most promising
    std::optional<Scored> best;
    for (std::size_t i = 0; i < k; ++i) {
      const VariableId v = approx[i].id;
      const auto free_vars = inference_subgraph(graph, v, config.enum_cap);
      const double p = exact_marginal(graph, v, free_vars, resolved, config.enum_cap);
      const Scored s{v, p, entropy(p)};
      if (!best || more_certain(s, *best)) best = s;
    }

    // (4) commit exactly one
    graph.commit(best->id, decide(best->p), best->p, CommitMethod::Inferred);
    ++local.inferred;

    // (5) periodic refit with inferred labels as observations
    if (config.relearn_interval > 0 && ++since_refit >= config.relearn_interval) {
      weights = learn_weights(graph, config);
      resolved = RelationWeights(graph, weights);
      since_refit = 0;
      ++local.refits;
    }
  }

  const auto rates = evidence_positive_rates(graph);
  for (const auto& var : graph.variables()) {
    if (!var.is_unlabeled()) continue;
    graph.commit(var.id, 0, rates[var.category], CommitMethod::Fallback);
    ++local.fallback;
  }

  if (stats) {
    local.final_weights = std::move(weights);
    *stats = std::move(local);
  }
  return graph;
}

FactorGraph one_shot_baseline(FactorGraph graph, const WeightTable& weights) {
  const RelationWeights resolved(graph, weights);
  std::vector<std::pair<VariableId, double>> decisions;
  for (const auto& var : graph.variables()) {
    if (var.is_unlabeled()) decisions.emplace_back(var.id, conditional_marginal(graph, var.id, resolved));
  }
  for (const auto& [v, p] : decisions) graph.commit(v, decide(p), p, CommitMethod::Inferred);
  return graph;
}

}  // namespace gml
