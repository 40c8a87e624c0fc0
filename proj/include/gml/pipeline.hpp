#pragma once

// End-to-end orchestration: data (synthetic or files) -> relations ->
// graph -> weights -> gradual inference -> metrics, plus the k_b sweep and
// the with/without-KNN ablation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gml/inference.hpp"
#include "gml/metrics.hpp"
#include "gml/relations.hpp"

namespace gml {

// Unknown keys are rejected. Weight defaults live under "w_max",
// "default_similar" and "default_opposite".
InferenceConfig inference_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InferenceConfig& config);
nlohmann::json to_json(const WeightTable& table);
nlohmann::json to_json(const MetricsReport& report);

struct PipelineOptions {
  std::optional<std::filesystem::path> synth_spec;
  std::optional<std::filesystem::path> instances;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> gold;
  std::vector<std::filesystem::path> relations;
  std::optional<std::filesystem::path> config_file;
  // Used when config_file is absent.
  InferenceConfig config;
  // Overrides the synth spec seed and the config seed.
  std::optional<std::uint64_t> seed;
  bool extract_knn = true;
  KnnConfig knn;
  bool drop_knn = false;
  std::optional<int> kb;
  std::vector<int> kb_sweep;
  std::filesystem::path out_dir = "out";
};

struct ArmResult {
  std::optional<int> kb;
  std::optional<MetricsReport> metrics;
  GradualStats stats;
  std::filesystem::path predictions_path;
  std::filesystem::path metrics_path;
};

struct PipelineResult {
  std::vector<ArmResult> runs;  // one per k_b setting (a single run without a sweep)
  nlohmann::json manifest;
};

// Stage failures are rethrown as InputError whose stage() names the step
// ("config", "synth", "read_instances", "load_relations", "extract_knn",
// "sample_relation_budget", "build_graph", "learn_weights",
// "gradual_inference", "evaluate").
PipelineResult run_pipeline(const PipelineOptions& options);

struct AblationResult {
  PipelineResult with_knn;
  PipelineResult without_knn;
  nlohmann::json report;
};

// Runs the pipeline twice on the same inputs, with and without the "knn"
// relation group, and writes ablation.json with both configs and the delta.
AblationResult run_ablation(const PipelineOptions& options);

}  // namespace gml
