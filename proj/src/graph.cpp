#include "gml/graph.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "gml/error.hpp"

namespace gml {

const char* to_string(Split s) { return s == Split::Train ? "train" : "test"; }
const char* to_string(Polarity p) { return p == Polarity::Similar ? "similar" : "opposite"; }
const char* to_string(CommitMethod m) { return m == CommitMethod::Inferred ? "inferred" : "fallback"; }

std::optional<int> Variable::label() const {
  if (const auto* e = std::get_if<Evidence>(&state)) return e->label;
  if (const auto* i = std::get_if<Inferred>(&state)) return i->label;
  return std::nullopt;
}

std::optional<std::size_t> FactorGraph::instance_index(const std::string& id) const {
  auto it = instance_lookup_.find(id);
  if (it == instance_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FactorGraph::category_index(const std::string& name) const {
  auto it = category_lookup_.find(name);
  if (it == category_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FactorGraph::group_index(const std::string& name) const {
  auto it = std::find(groups_.begin(), groups_.end(), name);
  if (it == groups_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - groups_.begin());
}

std::optional<VariableId> FactorGraph::find(const std::string& instance,
                                            const std::string& category) const {
  auto i = instance_index(instance);
  auto c = category_index(category);
  if (!i || !c) return std::nullopt;
  return variable_id(*i, *c);
}

void FactorGraph::commit(VariableId v, int label, double probability, CommitMethod method) {
  if (v >= variables_.size()) {
    throw InvariantError("commit: variable " + std::to_string(v) + " does not exist");
  }
  Variable& var = variables_[v];
  if (!var.is_unlabeled()) {
    throw InvariantError("commit: variable " + std::to_string(v) + " (" + instance_of(v) + ", " +
                         category_of(v) + ") is already labeled");
  }
  if (label != 0 && label != 1) throw InvariantError("commit: label must be 0 or 1");
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw InvariantError("commit: probability outside [0, 1]");
  }
  commit_log_.push_back({v, label, probability, method});
  var.state = Inferred{label, probability, commit_log_.size()};
  --unlabeled_;
}

void FactorGraph::replay(std::span<const CommitEntry> log) {
  for (const auto& e : log) commit(e.variable, e.label, e.probability, e.method);
}

std::vector<std::string> collect_categories(std::span<const InstanceRecord> instances) {
  std::set<std::string> names;
  for (const auto& rec : instances) {
    if (rec.split != Split::Train) continue;
    for (const auto& [cat, _] : rec.labels) names.insert(cat);
  }
  return {names.begin(), names.end()};
}

FactorGraph build_graph(std::span<const InstanceRecord> instances,
                        std::span<const std::string> categories,
                        std::span<const RelationRecord> relations) {
  FactorGraph g;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    if (categories[c].empty()) throw InputError("category names must be non-empty");
    if (!g.category_lookup_.emplace(categories[c], c).second) {
      throw InputError("duplicate category '" + categories[c] + "'");
    }
    g.categories_.push_back(categories[c]);
  }

  const std::size_t m = categories.size();
  g.variables_.reserve(instances.size() * m);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& rec = instances[i];
    if (rec.id.empty()) throw InputError("instance id must be non-empty");
    if (!g.instance_lookup_.emplace(rec.id, i).second) {
      throw InputError("duplicate instance '" + rec.id + "'");
    }
    g.instance_ids_.push_back(rec.id);
    g.splits_.push_back(rec.split);
    for (std::size_t c = 0; c < m; ++c) {
      Variable var;
      var.id = g.variables_.size();
      var.instance = i;
      var.category = c;
      if (rec.split == Split::Train) {
        auto it = rec.labels.find(categories[c]);
        if (it == rec.labels.end()) {
          throw InputError("train instance '" + rec.id + "' has no label for category '" +
                           categories[c] + "'");
        }
        if (it->second != 0 && it->second != 1) {
          throw InputError("train instance '" + rec.id + "' has a non-binary label for '" +
                           categories[c] + "'");
        }
        var.state = Evidence{it->second};
      } else {
        var.state = Unlabeled{};
        ++g.unlabeled_;
      }
      g.variables_.push_back(var);
    }
  }

  g.adjacency_.resize(g.variables_.size());
  std::set<std::tuple<VariableId, VariableId, std::size_t, Polarity>> seen;
  for (std::size_t r = 0; r < relations.size(); ++r) {
    const auto& rec = relations[r];
    const std::string where = "relation #" + std::to_string(r + 1) + " (" + rec.a + ", " + rec.b +
                              ", " + rec.category + ")";
    auto ia = g.instance_index(rec.a);
    if (!ia) throw InputError(where + ": unknown instance '" + rec.a + "'");
    auto ib = g.instance_index(rec.b);
    if (!ib) throw InputError(where + ": unknown instance '" + rec.b + "'");
    auto c = g.category_index(rec.category);
    if (!c) throw InputError(where + ": unknown category '" + rec.category + "'");
    if (*ia == *ib) throw InputError(where + ": self relation");
    if (!(rec.confidence > 0.0 && rec.confidence <= 1.0)) {
      throw InputError(where + ": confidence must be in (0, 1]");
    }

    std::size_t group = 0;
    if (auto gi = g.group_index(rec.group)) {
      group = *gi;
    } else {
      group = g.groups_.size();
      g.groups_.push_back(rec.group);
    }

    Relation rel;
    rel.a = g.variable_id(std::min(*ia, *ib), *c);
    rel.b = g.variable_id(std::max(*ia, *ib), *c);
    rel.polarity = rec.polarity;
    rel.group = group;
    rel.confidence = rec.confidence;
    if (!seen.emplace(rel.a, rel.b, rel.group, rel.polarity).second) {
      throw InputError(where + ": duplicate relation");
    }
    const RelationId id = g.relations_.size();
    g.relations_.push_back(rel);
    g.adjacency_[rel.a].push_back({id, rel.b});
    g.adjacency_[rel.b].push_back({id, rel.a});
  }
  return g;
}

void commit_label(FactorGraph& graph, VariableId v, int label, double probability,
                  CommitMethod method) {
  graph.commit(v, label, probability, method);
}

std::vector<LabeledNeighbor> labeled_neighbors(const FactorGraph& graph, VariableId v) {
  std::vector<LabeledNeighbor> out;
  for (const auto& n : graph.adjacency(v)) {
    if (auto label = graph.variable(n.variable).label()) {
      out.push_back({n.relation, n.variable, *label});
    }
  }
  // adjacency is filled in relation order, so this is already ascending
  return out;
}

}  // namespace gml
