#pragma once

// Synthetic workloads with planted labels and relations of known precision.
// Stands in for relation extractors when no trained model is available and
// serves as the oracle bed for the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gml/graph.hpp"
#include "gml/metrics.hpp"
#include "gml/relations.hpp"

namespace gml {

struct GroupSpec {
  std::string name;
  // P(relation polarity agrees with the planted labels), in (0.5, 1].
  double precision = 0.9;
  // Relations drawn per (test variable, group); the fractional part is a coin flip.
  double degree = 6.0;
  // Partners only from the train split (KNN-style).
  bool train_only = false;
  // Emit only Similar relations; precision then picks a same-label or
  // different-label partner.
  bool similar_only = false;
};

struct SynthSpec {
  std::size_t n_train = 200;
  std::size_t n_test = 200;
  std::vector<std::string> categories;
  std::vector<double> positive_rate;  // one per category
  std::vector<GroupSpec> groups;
  // When set, a drawn partner has a different planted label with this
  // probability; otherwise partners are uniform over the candidate pool.
  std::optional<double> opposite_share;
  double embedding_noise = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

// Accepts {"n_train", "n_test", "categories", "positive_rate": number|{cat: rate},
// "degree", "precision", "groups": [{name, precision, degree, train_only,
// similar_only}], "opposite_share", "embedding_noise", "seed"}. Without
// "groups" a single "bert" group uses the top-level precision and degree.
SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& spec);

struct SynthWorkload {
  std::vector<InstanceRecord> instances;  // test records carry no labels
  std::vector<LabeledPair> gold;          // every test (instance, category)
  std::vector<RelationRecord> relations;
  std::vector<EmbeddingRecord> embeddings;
};

SynthWorkload generate(const SynthSpec& spec);

// instances.jsonl, gold.jsonl, relations.jsonl, embeddings.jsonl
void write_workload(const std::filesystem::path& dir, const SynthWorkload& workload);

// Test-split decisions of a labeled graph, for oracle_accuracy/evaluate.
std::vector<LabeledPair> test_decisions(const FactorGraph& graph);

// Same, restricted to variables with at least one relation.
std::vector<LabeledPair> connected_test_decisions(const FactorGraph& graph);

}  // namespace gml
