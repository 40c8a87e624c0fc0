#pragma once

// JSON Lines readers and writers for the on-disk formats:
//   instances   {"id", "split": "train"|"test", "labels": {category: 0|1}}
//   embeddings  {"id", "category", "vector": [...]}
//   relations   {"a", "b", "category", "polarity", "group", "confidence"?}
//   predictions {"id", "category", "label", "probability", "order", "method"}
//   gold        {"id", "category", "label"}

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gml/graph.hpp"
#include "gml/metrics.hpp"
#include "gml/relations.hpp"

namespace gml {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Calls `fn(line_number, object)` for each non-blank line. Parse failures
// and non-object lines raise InputError with the 1-based line number.
void for_each_jsonl(const fs::path& path, const std::function<void(std::size_t, const json&)>& fn);

// Writes one compact JSON document per line.
void write_jsonl(const fs::path& path, const std::vector<json>& rows);
void write_json(const fs::path& path, const json& doc);
json read_json(const fs::path& path);

std::vector<InstanceRecord> read_instances(const fs::path& path);
void write_instances(const fs::path& path, const std::vector<InstanceRecord>& instances);

std::vector<EmbeddingRecord> read_embeddings(const fs::path& path);
void write_embeddings(const fs::path& path, const std::vector<EmbeddingRecord>& embeddings);

json relation_to_json(const RelationRecord& r);
// Throws InputError (without line context) on schema violations.
RelationRecord relation_from_json(const json& j);
void write_relations(const fs::path& path, const std::vector<RelationRecord>& relations);

struct Prediction {
  std::string instance;
  std::string category;
  int label = 0;
  double probability = 0.0;
  std::optional<std::size_t> order;
  std::string method;  // "evidence" | "inferred" | "fallback"
};

std::vector<Prediction> predictions_from_graph(const FactorGraph& graph);
void write_predictions(const fs::path& path, const std::vector<Prediction>& predictions);
std::vector<Prediction> read_predictions(const fs::path& path);

std::vector<LabeledPair> read_gold(const fs::path& path);
void write_gold(const fs::path& path, const std::vector<LabeledPair>& gold);

// Lower-case hex SHA-256 of the file contents.
std::string file_sha256(const fs::path& path);

}  // namespace gml
