#include "gml/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "gml/error.hpp"
#include "gml/io.hpp"
#include "gml/rng.hpp"

namespace gml {
namespace {

std::string make_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

// Separate streams so adding a relation group never perturbs labels or embeddings.
constexpr std::uint64_t kEmbeddingStream = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kRelationStream = 0xD1B54A32D192ED03ULL;

}  // namespace

void SynthSpec::validate() const {
  if (n_train == 0 || n_test == 0) throw InputError("synth: n_train and n_test must be positive");
  if (categories.empty()) throw InputError("synth: at least one category is required");
  if (positive_rate.size() != categories.size()) {
    throw InputError("synth: positive_rate must have one entry per category");
  }
  for (double r : positive_rate) {
    if (!(r > 0.0 && r < 1.0)) throw InputError("synth: positive_rate must be in (0, 1)");
  }
  std::set<std::string> names;
  for (const auto& g : groups) {
    if (g.name.empty() || !names.insert(g.name).second) {
      throw InputError("synth: group names must be unique and non-empty");
    }
    if (!(g.precision > 0.5 && g.precision <= 1.0)) {
      throw InputError("synth: precision of group '" + g.name + "' must be in (0.5, 1]");
    }
    if (!(g.degree >= 0.0)) throw InputError("synth: degree of group '" + g.name + "' must be >= 0");
  }
  if (opposite_share && !(*opposite_share >= 0.0 && *opposite_share <= 1.0)) {
    throw InputError("synth: opposite_share must be in [0, 1]");
  }
  if (!(embedding_noise >= 0.0)) throw InputError("synth: embedding_noise must be >= 0");
}

SynthSpec synth_spec_from_json(const json& j) {
  if (!j.is_object()) throw InputError("synth spec must be a JSON object");
  static const std::set<std::string> known = {
      "n_train",   "n_test",         "categories",      "positive_rate", "degree", "precision",
      "groups",    "opposite_share", "embedding_noise", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InputError("synth spec: unknown field \"" + key + "\"");
  }
  try {
    SynthSpec s;
    s.n_train = get_or<std::size_t>(j, "n_train", s.n_train);
    s.n_test = get_or<std::size_t>(j, "n_test", s.n_test);
    s.categories = get_or<std::vector<std::string>>(j, "categories", {"c0", "c1", "c2", "c3"});
    const auto rate = j.find("positive_rate");
    if (rate == j.end() || rate->is_number()) {
      s.positive_rate.assign(s.categories.size(), rate == j.end() ? 0.3 : rate->get<double>());
    } else if (rate->is_object()) {
      for (const auto& c : s.categories) {
        if (!rate->contains(c)) throw InputError("synth spec: positive_rate missing '" + c + "'");
        s.positive_rate.push_back(rate->at(c).get<double>());
      }
    } else {
      throw InputError("synth spec: positive_rate must be a number or an object");
    }
    const double degree = get_or<double>(j, "degree", 6.0);
    const double precision = get_or<double>(j, "precision", 0.9);
    if (auto g = j.find("groups"); g != j.end()) {
      for (const auto& gj : *g) {
        GroupSpec gs;
        gs.name = gj.at("name").get<std::string>();
        gs.precision = get_or<double>(gj, "precision", precision);
        gs.degree = get_or<double>(gj, "degree", degree);
        gs.train_only = get_or<bool>(gj, "train_only", false);
        gs.similar_only = get_or<bool>(gj, "similar_only", false);
        s.groups.push_back(gs);
      }
    } else {
      s.groups.push_back({"bert", precision, degree, false, false});
    }
    if (auto o = j.find("opposite_share"); o != j.end() && !o->is_null()) {
      s.opposite_share = o->get<double>();
    }
    s.embedding_noise = get_or<double>(j, "embedding_noise", s.embedding_noise);
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("synth spec: ") + e.what());
  }
}

json to_json(const SynthSpec& spec) {
  json groups = json::array();
  for (const auto& g : spec.groups) {
    groups.push_back({{"name", g.name},
                      {"precision", g.precision},
                      {"degree", g.degree},
                      {"train_only", g.train_only},
                      {"similar_only", g.similar_only}});
  }
  json rates = json::object();
  for (std::size_t c = 0; c < spec.categories.size(); ++c) rates[spec.categories[c]] = spec.positive_rate[c];
  json j = {{"n_train", spec.n_train},
            {"n_test", spec.n_test},
            {"categories", spec.categories},
            {"positive_rate", rates},
            {"groups", groups},
            {"embedding_noise", spec.embedding_noise},
            {"seed", spec.seed}};
  j["opposite_share"] = spec.opposite_share ? json(*spec.opposite_share) : json(nullptr);
  return j;
}

SynthWorkload generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_train + spec.n_test;
  const std::size_t m = spec.categories.size();
  SynthWorkload w;

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = i < spec.n_train ? make_id("tr", i) : make_id("te", i - spec.n_train);
  }

  Rng label_rng(spec.seed);
  std::vector<std::vector<int>> labels(n, std::vector<int>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) labels[i][c] = label_rng.bernoulli(spec.positive_rate[c]) ? 1 : 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    InstanceRecord rec{ids[i], i < spec.n_train ? Split::Train : Split::Test, {}};
    for (std::size_t c = 0; c < m; ++c) {
      if (rec.split == Split::Train) rec.labels[spec.categories[c]] = labels[i][c];
      else w.gold.push_back({ids[i], spec.categories[c], labels[i][c]});
    }
    w.instances.push_back(std::move(rec));
  }

  // 2-D points around (1, 0) for label 0 and (0, 1) for label 1.
  Rng emb_rng(spec.seed ^ kEmbeddingStream);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      const double cx = labels[i][c] == 1 ? 0.0 : 1.0;
      const double cy = labels[i][c] == 1 ? 1.0 : 0.0;
      std::vector<double> v;
      do {
        v = {emb_rng.normal(cx, spec.embedding_noise), emb_rng.normal(cy, spec.embedding_noise)};
      } while (v[0] == 0.0 && v[1] == 0.0);
      w.embeddings.push_back({ids[i], spec.categories[c], std::move(v)});
    }
  }

  // Partner pools per (category, label): [train-only, all].
  std::vector<std::array<std::array<std::vector<std::size_t>, 2>, 2>> pools(m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i < spec.n_train) pools[c][0][labels[i][c]].push_back(i);
      pools[c][1][labels[i][c]].push_back(i);
    }
  }

  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> linked;
  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    const auto& group = spec.groups[gi];
    Rng rng((spec.seed ^ kRelationStream) + 0x100000001B3ULL * (gi + 1));
    const double whole = std::floor(group.degree);
    const double frac = group.degree - whole;
    const int scope = group.train_only ? 0 : 1;

    for (std::size_t i = spec.n_train; i < n; ++i) {
      for (std::size_t c = 0; c < m; ++c) {
        const int y = labels[i][c];
        const auto draws = static_cast<std::size_t>(whole) + (rng.bernoulli(frac) ? 1 : 0);
        for (std::size_t d = 0; d < draws; ++d) {
          const bool consistent = rng.bernoulli(group.precision);
          // Which label the partner should carry, if constrained.
          std::optional<int> want;
          if (group.similar_only) want = consistent ? y : 1 - y;
          else if (spec.opposite_share) want = rng.bernoulli(*spec.opposite_share) ? 1 - y : y;

          std::optional<std::size_t> partner;
          for (int attempt = 0; attempt < 32 && !partner; ++attempt) {
            std::size_t j = 0;
            if (want) {
              const auto& pool = pools[c][scope][*want];
              if (pool.empty()) break;
              j = pool[rng.below(pool.size())];
            } else {
              const auto& p0 = pools[c][scope][0];
              const auto& p1 = pools[c][scope][1];
              const auto k = rng.below(p0.size() + p1.size());
              j = k < p0.size() ? p0[k] : p1[k - p0.size()];
            }
            if (j == i) continue;
            if (linked.count({c, std::min(i, j), std::max(i, j), gi})) continue;
            partner = j;
          }
          if (!partner) continue;
          linked.insert({c, std::min(i, *partner), std::max(i, *partner), gi});

          Polarity polarity = Polarity::Similar;
          if (!group.similar_only) {
            const bool equal = labels[*partner][c] == y;
            polarity = (equal == consistent) ? Polarity::Similar : Polarity::Opposite;
          }
          w.relations.push_back({ids[i], ids[*partner], spec.categories[c], polarity, group.name, 1.0});
        }
      }
    }
  }
  return w;
}

void write_workload(const std::filesystem::path& dir, const SynthWorkload& workload) {
  std::filesystem::create_directories(dir);
  write_instances(dir / "instances.jsonl", workload.instances);
  write_gold(dir / "gold.jsonl", workload.gold);
  write_relations(dir / "relations.jsonl", workload.relations);
  write_embeddings(dir / "embeddings.jsonl", workload.embeddings);
}

std::vector<LabeledPair> test_decisions(const FactorGraph& graph) {
  std::vector<LabeledPair> out;
  for (const auto& var : graph.variables()) {
    if (graph.splits()[var.instance] != Split::Test) continue;
    auto label = var.label();
    if (!label) throw InvariantError("test_decisions: variable " + std::to_string(var.id) + " is unlabeled");
    out.push_back({graph.instance_of(var.id), graph.category_of(var.id), *label});
  }
  return out;
}

std::vector<LabeledPair> connected_test_decisions(const FactorGraph& graph) {
  std::vector<LabeledPair> out;
  for (const auto& var : graph.variables()) {
    if (graph.splits()[var.instance] != Split::Test || graph.adjacency(var.id).empty()) continue;
    auto label = var.label();
    if (!label) throw InvariantError("connected_test_decisions: unlabeled variable");
    out.push_back({graph.instance_of(var.id), graph.category_of(var.id), *label});
  }
  return out;
}

}  // namespace gml
