#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gml/graph.hpp"

namespace gml {

inline constexpr const char* kKnnGroup = "knn";

// Category-specific latent vector of one instance.
struct EmbeddingRecord {
  std::string instance;
  std::string category;
  std::vector<double> vector;
};

struct KnnConfig {
  int k = 3;
  double tau = 0.9;

  void validate() const;
};

double cosine_similarity(std::span<const double> x, std::span<const double> y);

// For every unlabeled variable, Similar relations (group "knn") to the k most
// cosine-similar train instances of the same category whose similarity is at
// least tau. Ties go to the smaller instance id.
std::vector<RelationRecord> knn_extract(std::span<const EmbeddingRecord> embeddings,
                                        const FactorGraph& graph, const KnnConfig& config);

// Reads a relations JSONL file and validates every record against `graph`.
// Errors carry the 1-based line number.
std::vector<RelationRecord> load_relations(const std::filesystem::path& path,
                                           const FactorGraph& graph);

// Keeps at most k_b relations per (unlabeled variable, group) among each
// unlabeled endpoint's incident relations. A relation survives if any of its
// unlabeled endpoints keeps it; relations without an unlabeled endpoint and
// the "knn" group are never down-sampled. Output preserves input order.
std::vector<RelationRecord> sample_relation_budget(std::span<const RelationRecord> relations,
                                                   const FactorGraph& graph, int k_b,
                                                   std::uint64_t seed);

}  // namespace gml
