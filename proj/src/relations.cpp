#include "gml/relations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gml/error.hpp"
#include "gml/io.hpp"
#include "gml/rng.hpp"

namespace gml {

void KnnConfig::validate() const {
  if (k < 1) throw InputError("knn: k must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw InputError("knn: tau must be in (0, 1]");
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  return dot / (std::sqrt(xx) * std::sqrt(yy));
}

std::vector<RelationRecord> knn_extract(std::span<const EmbeddingRecord> embeddings,
                                        const FactorGraph& graph, const KnnConfig& config) {
  config.validate();
  const std::size_t m = graph.categories().size();

  // Vectors indexed by variable id; null when absent.
  std::vector<const std::vector<double>*> by_variable(graph.variables().size(), nullptr);
  std::vector<std::size_t> dims(m, 0);
  for (const auto& e : embeddings) {
    auto v = graph.find(e.instance, e.category);
    if (!v) {
      throw InputError("embedding for unknown (instance, category) (" + e.instance + ", " +
                       e.category + ")");
    }
    const std::size_t c = graph.variable(*v).category;
    if (e.vector.size() < 2) {
      throw InputError("embedding (" + e.instance + ", " + e.category + ") has dimension < 2");
    }
    if (dims[c] == 0) {
      dims[c] = e.vector.size();
    } else if (dims[c] != e.vector.size()) {
      throw InputError("embedding dimension mismatch in category '" + e.category + "': (" +
                       e.instance + ") has " + std::to_string(e.vector.size()) + ", expected " +
                       std::to_string(dims[c]));
    }
    if (std::all_of(e.vector.begin(), e.vector.end(), [](double x) { return x == 0.0; })) {
      throw InputError("embedding (" + e.instance + ", " + e.category + ") is the zero vector");
    }
    if (by_variable[*v]) {
      throw InputError("duplicate embedding for (" + e.instance + ", " + e.category + ")");
    }
    by_variable[*v] = &e.vector;
  }

  std::vector<std::vector<VariableId>> train_by_category(m);
  for (const auto& var : graph.variables()) {
    if (graph.splits()[var.instance] == Split::Train && by_variable[var.id]) {
      train_by_category[var.category].push_back(var.id);
    }
  }

  std::vector<RelationRecord> out;
  struct Candidate {
    double similarity;
    const std::string* instance;
  };
  std::vector<Candidate> candidates;
  for (const auto& var : graph.variables()) {
    if (!var.is_unlabeled()) continue;
    const auto* query = by_variable[var.id];
    if (!query) {
      throw InputError("missing embedding for test instance '" + graph.instance_of(var.id) +
                       "' in category '" + graph.category_of(var.id) + "'");
    }
    const auto& pool = train_by_category[var.category];
    if (pool.empty()) {
      throw InputError("no train embeddings for category '" + graph.category_of(var.id) + "'");
    }
    candidates.clear();
    for (VariableId t : pool) {
      const double sim = cosine_similarity(*query, *by_variable[t]);
      if (sim >= config.tau) candidates.push_back({sim, &graph.instance_of(t)});
    }
    const auto keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(config.k));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const Candidate& x, const Candidate& y) {
                        if (x.similarity != y.similarity) return x.similarity > y.similarity;
                        return *x.instance < *y.instance;
                      });
    for (std::size_t i = 0; i < keep; ++i) {
      out.push_back({graph.instance_of(var.id), *candidates[i].instance, graph.category_of(var.id),
                     Polarity::Similar, kKnnGroup, std::min(candidates[i].similarity, 1.0)});
    }
  }
  return out;
}

std::vector<RelationRecord> load_relations(const fs::path& path, const FactorGraph& graph) {
  std::vector<RelationRecord> out;
  std::map<std::tuple<VariableId, VariableId, std::string, Polarity>, std::size_t> first_line;
  for_each_jsonl(path, [&](std::size_t line, const json& j) {
    RelationRecord r = relation_from_json(j);
    const std::string what = "relation (" + r.a + ", " + r.b + ", " + r.category + ")";
    if (!graph.category_index(r.category)) {
      throw InputError(what + ": unknown category '" + r.category + "'");
    }
    auto va = graph.find(r.a, r.category);
    if (!va) throw InputError(what + ": unknown instance '" + r.a + "'");
    auto vb = graph.find(r.b, r.category);
    if (!vb) throw InputError(what + ": unknown instance '" + r.b + "'");
    if (*va == *vb) throw InputError(what + ": self relation");
    auto key = std::make_tuple(std::min(*va, *vb), std::max(*va, *vb), r.group, r.polarity);
    auto [it, inserted] = first_line.emplace(key, line);
    if (!inserted) {
      throw InputError(what + ": duplicates the relation on line " + std::to_string(it->second));
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<RelationRecord> sample_relation_budget(std::span<const RelationRecord> relations,
                                                   const FactorGraph& graph, int k_b,
                                                   std::uint64_t seed) {
  if (k_b < 1) throw InputError("relation budget k_b must be >= 1");

  std::vector<bool> keep(relations.size(), false);
  // unlabeled variable -> group -> incident relation indices (input order)
  std::map<VariableId, std::map<std::string, std::vector<std::size_t>>> incident;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto& r = relations[i];
    if (r.group == kKnnGroup) {
      keep[i] = true;
      continue;
    }
    auto va = graph.find(r.a, r.category);
    auto vb = graph.find(r.b, r.category);
    if (!va || !vb) {
      throw InputError("relation (" + r.a + ", " + r.b + ", " + r.category +
                       ") references an unknown variable");
    }
    bool any = false;
    for (VariableId v : {*va, *vb}) {
      if (graph.variable(v).is_unlabeled()) {
        incident[v][r.group].push_back(i);
        any = true;
      }
    }
    if (!any) keep[i] = true;
  }

  Rng rng(seed);
  for (const auto& [v, groups] : incident) {
    for (const auto& [group, ids] : groups) {
      for (std::size_t pick : rng.sample_indices(ids.size(), static_cast<std::size_t>(k_b))) {
        keep[ids[pick]] = true;
      }
    }
  }

  std::vector<RelationRecord> out;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    if (keep[i]) out.push_back(relations[i]);
  }
  return out;
}

}  // namespace gml
