// gml: command-line front end.
//
// Exit codes: 0 success, 2 input error, 3 invariant breach.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gml/error.hpp"
#include "gml/io.hpp"
#include "gml/pipeline.hpp"
#include "gml/synth.hpp"

namespace {

constexpr int kInputError = 2;
constexpr int kInvariantBreach = 3;

std::vector<std::filesystem::path> split_paths(const std::vector<std::string>& args) {
  std::vector<std::filesystem::path> out;
  for (const auto& arg : args) {
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.emplace_back(item);
    }
  }
  return out;
}

struct PipelineArgs {
  std::string synth_spec, instances, embeddings, gold, config, out_dir = "out";
  std::vector<std::string> relations;
  std::uint64_t seed = 0;
  int k = 3;
  double tau = 0.9;
  int kb = 0;
  std::vector<int> kb_sweep;
  bool no_extract_knn = false;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("--synth-spec", a.synth_spec, "Synthetic workload spec (JSON)");
  cmd->add_option("--instances", a.instances, "Instances file (JSONL)");
  cmd->add_option("--embeddings", a.embeddings, "Embeddings file (JSONL)");
  cmd->add_option("--gold", a.gold, "Gold labels for test pairs (JSONL)");
  cmd->add_option("--relations", a.relations, "Relation files, comma separated");
  cmd->add_option("--config", a.config, "Inference config (JSON)");
  cmd->add_option("--out-dir", a.out_dir, "Output directory");
  cmd->add_option("--seed", a.seed, "Seed overriding spec and config seeds");
  cmd->add_option("--k", a.k, "KNN neighbors")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", a.tau, "KNN similarity threshold");
  cmd->add_option("--kb", a.kb, "Relation budget per unlabeled variable and group");
  cmd->add_option("--kb-sweep", a.kb_sweep, "Comma separated k_b values")->delimiter(',');
  cmd->add_flag("--no-extract-knn", a.no_extract_knn, "Skip KNN relation extraction");
}

gml::PipelineOptions to_options(const PipelineArgs& a, bool seed_given) {
  gml::PipelineOptions o;
  if (!a.synth_spec.empty()) o.synth_spec = a.synth_spec;
  if (!a.instances.empty()) o.instances = a.instances;
  if (!a.embeddings.empty()) o.embeddings = a.embeddings;
  if (!a.gold.empty()) o.gold = a.gold;
  if (!a.config.empty()) o.config_file = a.config;
  o.relations = split_paths(a.relations);
  if (seed_given) o.seed = a.seed;
  o.extract_knn = !a.no_extract_knn;
  o.knn = {a.k, a.tau};
  if (a.kb > 0) o.kb = a.kb;
  o.kb_sweep = a.kb_sweep;
  o.out_dir = a.out_dir;
  return o;
}

void print_metrics(const gml::MetricsReport& m, const std::string& label) {
  std::printf("%s macro_f1=%.4f micro_f1=%.4f accuracy=%.4f strict_accuracy=%.4f\n", label.c_str(),
              m.macro_f1, m.micro_f1, m.accuracy, m.strict_accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradual machine learning over relational factor graphs"};
  app.require_subcommand(1);

  // synth
  std::string synth_spec, synth_out;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic workload");
  synth->add_option("--spec", synth_spec, "Spec file (JSON)")->required();
  synth->add_option("--out-dir", synth_out, "Output directory")->required();
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "Seed overriding the spec");

  // extract-knn
  std::string knn_instances, knn_embeddings, knn_out;
  gml::KnnConfig knn;
  std::uint64_t knn_seed = 0;
  auto* extract = app.add_subcommand("extract-knn", "Emit KNN similar relations from embeddings");
  extract->add_option("--instances", knn_instances, "Instances file (JSONL)")->required();
  extract->add_option("--embeddings", knn_embeddings, "Embeddings file (JSONL)")->required();
  extract->add_option("--k", knn.k, "Neighbors per test variable");
  extract->add_option("--tau", knn.tau, "Cosine similarity threshold");
  extract->add_option("--out", knn_out, "Relations output (JSONL)")->required();
  extract->add_option("--seed", knn_seed, "Accepted for uniformity; extraction is deterministic");

  // infer
  std::string infer_instances, infer_config, infer_out;
  std::vector<std::string> infer_relations;
  std::uint64_t infer_seed = 0;
  int infer_kb = 0;
  auto* infer = app.add_subcommand("infer", "Learn weights and run gradual inference");
  infer->add_option("--instances", infer_instances, "Instances file (JSONL)")->required();
  infer->add_option("--relations", infer_relations, "Relation files, comma separated");
  infer->add_option("--config", infer_config, "Inference config (JSON)");
  infer->add_option("--out", infer_out, "Predictions output (JSONL)")->required();
  infer->add_option("--kb", infer_kb, "Relation budget per unlabeled variable and group");
  auto* infer_seed_opt = infer->add_option("--seed", infer_seed, "Seed overriding the config seed");

  // eval
  std::string eval_predictions, eval_gold, eval_out;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
  eval->add_option("--predictions", eval_predictions, "Predictions (JSONL)")->required();
  eval->add_option("--gold", eval_gold, "Gold labels (JSONL)")->required();
  eval->add_option("--out", eval_out, "Metrics output (JSON)");
  eval->add_option("--seed", eval_seed, "Accepted for uniformity; evaluation is deterministic");

  PipelineArgs pipe_args, ablate_args;
  auto* pipeline = app.add_subcommand("pipeline", "Run data -> relations -> inference -> metrics");
  add_pipeline_options(pipeline, pipe_args);
  auto* ablate = app.add_subcommand("ablate", "Compare runs with and without KNN relations");
  add_pipeline_options(ablate, ablate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*synth) {
      auto spec = gml::synth_spec_from_json(gml::read_json(synth_spec));
      if (*synth_seed_opt) spec.seed = synth_seed;
      const auto workload = gml::generate(spec);
      gml::write_workload(synth_out, workload);
      std::printf("wrote %zu instances, %zu relations, %zu embeddings to %s\n",
                  workload.instances.size(), workload.relations.size(), workload.embeddings.size(),
                  synth_out.c_str());
    } else if (*extract) {
      const auto instances = gml::read_instances(knn_instances);
      const auto graph = gml::build_graph(instances, gml::collect_categories(instances), {});
      const auto relations = gml::knn_extract(gml::read_embeddings(knn_embeddings), graph, knn);
      gml::write_relations(knn_out, relations);
      std::printf("wrote %zu knn relations to %s\n", relations.size(), knn_out.c_str());
    } else if (*infer) {
      gml::PipelineOptions o;
      o.instances = infer_instances;
      o.relations = split_paths(infer_relations);
      if (!infer_config.empty()) o.config_file = infer_config;
      if (*infer_seed_opt) o.seed = infer_seed;
      if (infer_kb > 0) o.kb = infer_kb;
      o.extract_knn = false;
      const std::filesystem::path out(infer_out);
      o.out_dir = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
      auto result = gml::run_pipeline(o);
      const auto& written = result.runs.front().predictions_path;
      if (std::filesystem::absolute(written) != std::filesystem::absolute(out)) {
        std::filesystem::rename(written, out);
      }
      const auto& s = result.runs.front().stats;
      std::printf("inferred=%zu fallback=%zu refits=%zu -> %s\n", s.inferred, s.fallback, s.refits,
                  infer_out.c_str());
    } else if (*eval) {
      std::vector<gml::LabeledPair> predicted;
      for (const auto& p : gml::read_predictions(eval_predictions)) {
        if (p.method != "evidence") predicted.push_back({p.instance, p.category, p.label});
      }
      const auto report = gml::evaluate(predicted, gml::read_gold(eval_gold));
      const auto j = gml::to_json(report);
      if (!eval_out.empty()) gml::write_json(eval_out, j);
      else std::cout << j.dump(2) << '\n';
    } else if (*pipeline) {
      auto result = gml::run_pipeline(to_options(pipe_args, pipeline->count("--seed") > 0));
      for (const auto& arm : result.runs) {
        if (!arm.metrics) continue;
        print_metrics(*arm.metrics, arm.kb ? "kb=" + std::to_string(*arm.kb) : std::string("run"));
      }
    } else if (*ablate) {
      auto result = gml::run_ablation(to_options(ablate_args, ablate->count("--seed") > 0));
      for (std::size_t i = 0; i < result.with_knn.runs.size(); ++i) {
        const auto& a = result.with_knn.runs[i];
        const auto& b = result.without_knn.runs[i];
        if (!a.metrics || !b.metrics) continue;
        print_metrics(*a.metrics, "with_knn   ");
        print_metrics(*b.metrics, "without_knn");
        std::printf("delta macro_f1=%+.4f\n", a.metrics->macro_f1 - b.metrics->macro_f1);
      }
    }
  } catch (const gml::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const gml::InvariantError& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return kInvariantBreach;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
