#include "gml/pipeline.hpp"

#include <algorithm>
#include <set>

#include "gml/error.hpp"
#include "gml/io.hpp"
#include "gml/synth.hpp"

namespace gml {
namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const InputError& e) {
    if (!e.stage().empty()) throw;
    throw InputError(name, e.what());
  } catch (const fs::filesystem_error& e) {
    throw InputError(name, e.what());
  } catch (const json::exception& e) {
    throw InputError(name, e.what());
  }
}

struct Inputs {
  fs::path instances;
  std::optional<fs::path> embeddings;
  std::optional<fs::path> gold;
  std::vector<fs::path> relations;
  InferenceConfig config;
  std::optional<json> synth_spec;
};

Inputs resolve_inputs(const PipelineOptions& opt) {
  Inputs in;
  in.config = opt.config;
  if (opt.config_file) {
    in.config = stage("config", [&] { return inference_config_from_json(read_json(*opt.config_file)); });
  }
  if (opt.seed) in.config.seed = *opt.seed;
  stage("config", [&] {
    in.config.validate();
    if (opt.kb && *opt.kb < 1) throw InputError("k_b must be >= 1");
    for (int kb : opt.kb_sweep) {
      if (kb < 1) throw InputError("k_b sweep values must be >= 1");
    }
    if (opt.extract_knn) opt.knn.validate();
  });

  if (opt.synth_spec) {
    stage("synth", [&] {
      SynthSpec spec = synth_spec_from_json(read_json(*opt.synth_spec));
      if (opt.seed) spec.seed = *opt.seed;
      const fs::path data = opt.out_dir / "data";
      write_workload(data, generate(spec));
      in.instances = data / "instances.jsonl";
      in.embeddings = data / "embeddings.jsonl";
      in.gold = data / "gold.jsonl";
      in.relations = {data / "relations.jsonl"};
      in.synth_spec = to_json(spec);
    });
  } else {
    if (!opt.instances) throw InputError("config", "either a synth spec or an instances file is required");
    in.instances = *opt.instances;
    in.embeddings = opt.embeddings;
    in.gold = opt.gold;
  }
  for (const auto& r : opt.relations) in.relations.push_back(r);
  return in;
}

json digests(const Inputs& in) {
  json d = json::object();
  auto add = [&](const fs::path& p) { d[p.filename().string()] = file_sha256(p); };
  add(in.instances);
  if (in.embeddings) add(*in.embeddings);
  if (in.gold) add(*in.gold);
  for (const auto& r : in.relations) add(r);
  return d;
}

json options_json(const PipelineOptions& opt, const Inputs& in) {
  json j = {{"inference", to_json(in.config)},
            {"seed", in.config.seed},
            {"extract_knn", opt.extract_knn},
            {"knn", {{"k", opt.knn.k}, {"tau", opt.knn.tau}}},
            {"drop_knn", opt.drop_knn}};
  j["kb"] = opt.kb ? json(*opt.kb) : json(nullptr);
  j["kb_sweep"] = opt.kb_sweep;
  if (in.synth_spec) j["synth_spec"] = *in.synth_spec;
  return j;
}

PipelineResult run_with_inputs(const PipelineOptions& opt, const Inputs& in) {
  fs::create_directories(opt.out_dir);
  const auto instances = stage("read_instances", [&] { return read_instances(in.instances); });
  const auto categories = collect_categories(instances);
  const FactorGraph base = stage("read_instances", [&] {
    if (categories.empty()) throw InputError("no categories found on train instances");
    return build_graph(instances, categories, {});
  });

  std::vector<RelationRecord> relations;
  for (const auto& path : in.relations) {
    auto loaded = stage("load_relations", [&] { return load_relations(path, base); });
    relations.insert(relations.end(), loaded.begin(), loaded.end());
  }
  if (opt.extract_knn && in.embeddings) {
    auto knn = stage("extract_knn", [&] { return knn_extract(read_embeddings(*in.embeddings), base, opt.knn); });
    relations.insert(relations.end(), knn.begin(), knn.end());
  }
  if (opt.drop_knn) {
    std::erase_if(relations, [](const RelationRecord& r) { return r.group == kKnnGroup; });
  }

  std::optional<std::vector<LabeledPair>> gold;
  if (in.gold) gold = stage("evaluate", [&] { return read_gold(*in.gold); });

  std::vector<std::optional<int>> settings;
  for (int kb : opt.kb_sweep) settings.emplace_back(kb);
  if (settings.empty()) settings.push_back(opt.kb);
  const bool sweep = !opt.kb_sweep.empty();

  PipelineResult result;
  json runs = json::array();
  for (const auto& kb : settings) {
    const std::string suffix = sweep ? "_kb" + std::to_string(*kb) : "";
    ArmResult arm;
    arm.kb = kb;

    const auto used = stage("sample_relation_budget", [&] {
      auto r = kb ? sample_relation_budget(relations, base, *kb, in.config.seed) : relations;
      write_relations(opt.out_dir / ("relations" + suffix + ".jsonl"), r);
      return r;
    });
    FactorGraph graph = stage("build_graph", [&] { return build_graph(instances, categories, used); });
    const WeightTable weights = stage("learn_weights", [&] { return learn_weights(graph, in.config); });
    graph = stage("gradual_inference", [&] {
      return gradual_inference(std::move(graph), weights, in.config, &arm.stats);
    });

    arm.predictions_path = opt.out_dir / ("predictions" + suffix + ".jsonl");
    write_predictions(arm.predictions_path, predictions_from_graph(graph));

    json run = {{"kb", kb ? json(*kb) : json(nullptr)},
                {"relations", used.size()},
                {"inferred", arm.stats.inferred},
                {"fallback", arm.stats.fallback},
                {"refits", arm.stats.refits},
                {"initial_weights", to_json(weights)},
                {"final_weights", to_json(arm.stats.final_weights)},
                {"predictions", arm.predictions_path.filename().string()}};
    if (gold) {
      arm.metrics = stage("evaluate", [&] { return evaluate(test_decisions(graph), *gold); });
      arm.metrics_path = opt.out_dir / ("metrics" + suffix + ".json");
      write_json(arm.metrics_path, to_json(*arm.metrics));
      run["metrics"] = arm.metrics_path.filename().string();
    }
    runs.push_back(std::move(run));
    result.runs.push_back(std::move(arm));
  }

  if (sweep && gold) {
    json per_kb = json::object();
    double lo = 1.0, hi = 0.0;
    for (const auto& arm : result.runs) {
      per_kb[std::to_string(*arm.kb)] = arm.metrics->macro_f1;
      lo = std::min(lo, arm.metrics->macro_f1);
      hi = std::max(hi, arm.metrics->macro_f1);
    }
    write_json(opt.out_dir / "sweep_summary.json",
               {{"macro_f1", per_kb}, {"macro_f1_spread_points", 100.0 * (hi - lo)}});
  }

  result.manifest = {{"options", options_json(opt, in)}, {"inputs", digests(in)}, {"runs", runs}};
  write_json(opt.out_dir / "manifest.json", result.manifest);
  return result;
}

json metric_delta(const MetricsReport& with, const MetricsReport& without) {
  return {{"macro_f1", with.macro_f1 - without.macro_f1},
          {"micro_f1", with.micro_f1 - without.micro_f1},
          {"accuracy", with.accuracy - without.accuracy},
          {"strict_accuracy", with.strict_accuracy - without.strict_accuracy}};
}

}  // namespace

InferenceConfig inference_config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("inference config must be a JSON object");
  static const std::set<std::string> known = {
      "top_m",    "top_k",     "enum_cap", "relearn_interval", "lambda",          "learning_rate",
      "max_iters", "grad_tol", "min_obs",  "seed",             "w_max",           "default_similar",
      "default_opposite"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InputError("inference config: unknown field \"" + key + "\"");
  }
  InferenceConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (auto it = j.find(key); it != j.end()) field = it->get<std::decay_t<decltype(field)>>();
    };
    get("top_m", c.top_m);
    get("top_k", c.top_k);
    get("enum_cap", c.enum_cap);
    get("relearn_interval", c.relearn_interval);
    get("lambda", c.lambda);
    get("learning_rate", c.learning_rate);
    get("max_iters", c.max_iters);
    get("grad_tol", c.grad_tol);
    get("min_obs", c.min_obs);
    get("seed", c.seed);
    get("w_max", c.weights.w_max);
    get("default_similar", c.weights.similar);
    get("default_opposite", c.weights.opposite);
  } catch (const json::exception& e) {
    throw InputError(std::string("inference config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const InferenceConfig& c) {
  return {{"top_m", c.top_m},
          {"top_k", c.top_k},
          {"enum_cap", c.enum_cap},
          {"relearn_interval", c.relearn_interval},
          {"lambda", c.lambda},
          {"learning_rate", c.learning_rate},
          {"max_iters", c.max_iters},
          {"grad_tol", c.grad_tol},
          {"min_obs", c.min_obs},
          {"seed", c.seed},
          {"w_max", c.weights.w_max},
          {"default_similar", c.weights.similar},
          {"default_opposite", c.weights.opposite}};
}

json to_json(const WeightTable& table) {
  json per_category = json::array();
  for (const auto& [key, w] : table.per_category()) {
    per_category.push_back({{"group", std::get<0>(key)},
                            {"polarity", to_string(std::get<1>(key))},
                            {"category", std::get<2>(key)},
                            {"weight", w}});
  }
  json global = json::array();
  for (const auto& [key, w] : table.global()) {
    global.push_back({{"group", key.first}, {"polarity", to_string(key.second)}, {"weight", w}});
  }
  return {{"per_category", per_category}, {"global", global}};
}

json to_json(const MetricsReport& r) {
  json per_category = json::object();
  for (const auto& [cat, s] : r.per_category) {
    per_category[cat] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                         {"accuracy", s.accuracy},   {"tp", s.tp},         {"fp", s.fp},
                         {"fn", s.fn},               {"tn", s.tn}};
  }
  return {{"micro", {{"precision", r.micro_precision}, {"recall", r.micro_recall}, {"f1", r.micro_f1}}},
          {"macro_f1", r.macro_f1},
          {"accuracy", r.accuracy},
          {"strict_accuracy", r.strict_accuracy},
          {"decisions", r.decisions},
          {"instances", r.instances},
          {"per_category", per_category}};
}

PipelineResult run_pipeline(const PipelineOptions& options) {
  return run_with_inputs(options, resolve_inputs(options));
}

AblationResult run_ablation(const PipelineOptions& options) {
  const Inputs in = resolve_inputs(options);

  PipelineOptions with = options;
  with.out_dir = options.out_dir / "with_knn";
  with.drop_knn = false;
  PipelineOptions without = options;
  without.out_dir = options.out_dir / "without_knn";
  without.drop_knn = true;
  without.extract_knn = false;

  AblationResult result;
  result.with_knn = run_with_inputs(with, in);
  result.without_knn = run_with_inputs(without, in);

  json arms = json::array();
  for (std::size_t i = 0; i < result.with_knn.runs.size(); ++i) {
    const auto& a = result.with_knn.runs[i];
    const auto& b = result.without_knn.runs[i];
    json entry = {{"kb", a.kb ? json(*a.kb) : json(nullptr)}};
    if (a.metrics && b.metrics) {
      entry["with_knn"] = to_json(*a.metrics);
      entry["without_knn"] = to_json(*b.metrics);
      entry["delta"] = metric_delta(*a.metrics, *b.metrics);
    }
    arms.push_back(std::move(entry));
  }
  result.report = {{"with_knn", {{"config", options_json(with, in)}}},
                   {"without_knn", {{"config", options_json(without, in)}}},
                   {"runs", arms}};
  write_json(options.out_dir / "ablation.json", result.report);
  return result;
}

}  // namespace gml
