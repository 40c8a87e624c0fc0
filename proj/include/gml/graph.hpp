#pragma once

// Factor graph over (instance, category) variables joined by pairwise
// similar/opposite relations. Training instances enter as evidence, test
// instances as unlabeled variables that are committed one at a time.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace gml {

using VariableId = std::size_t;
using RelationId = std::size_t;

enum class Split { Train, Test };
enum class Polarity { Similar, Opposite };
enum class CommitMethod { Inferred, Fallback };

const char* to_string(Split s);
const char* to_string(Polarity p);
const char* to_string(CommitMethod m);

struct InstanceRecord {
  std::string id;
  Split split = Split::Train;
  // category -> 0/1; required for every category on train records.
  std::map<std::string, int> labels;
};

// A relation as it appears in files: endpoints named by instance id.
struct RelationRecord {
  std::string a;
  std::string b;
  std::string category;
  Polarity polarity = Polarity::Similar;
  std::string group;
  double confidence = 1.0;
};

struct Evidence {
  int label;
};
struct Inferred {
  int label;
  double probability;
  std::size_t commit_order;
};
struct Unlabeled {};
using LabelState = std::variant<Unlabeled, Evidence, Inferred>;

struct Variable {
  VariableId id = 0;
  std::size_t instance = 0;
  std::size_t category = 0;
  LabelState state;

  bool is_labeled() const { return !std::holds_alternative<Unlabeled>(state); }
  bool is_evidence() const { return std::holds_alternative<Evidence>(state); }
  bool is_unlabeled() const { return std::holds_alternative<Unlabeled>(state); }
  // Label of an Evidence or Inferred variable.
  std::optional<int> label() const;
};

// Undirected; stored with a < b. `group` indexes FactorGraph::groups().
struct Relation {
  VariableId a = 0;
  VariableId b = 0;
  Polarity polarity = Polarity::Similar;
  std::size_t group = 0;
  double confidence = 1.0;

  VariableId other(VariableId v) const { return v == a ? b : a; }
};

struct Neighbor {
  RelationId relation;
  VariableId variable;
};

struct CommitEntry {
  VariableId variable;
  int label;
  double probability;
  CommitMethod method;

  bool operator==(const CommitEntry&) const = default;
};

class FactorGraph {
 public:
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(VariableId v) const { return variables_.at(v); }
  const std::vector<Relation>& relations() const { return relations_; }
  const Relation& relation(RelationId r) const { return relations_.at(r); }
  std::span<const Neighbor> adjacency(VariableId v) const { return adjacency_.at(v); }
  const std::vector<CommitEntry>& commit_log() const { return commit_log_; }

  const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  const std::vector<Split>& splits() const { return splits_; }
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<std::string>& groups() const { return groups_; }
  const std::string& instance_of(VariableId v) const { return instance_ids_[variables_.at(v).instance]; }
  const std::string& category_of(VariableId v) const { return categories_[variables_.at(v).category]; }

  VariableId variable_id(std::size_t instance, std::size_t category) const {
    return instance * categories_.size() + category;
  }
  std::optional<std::size_t> instance_index(const std::string& id) const;
  std::optional<std::size_t> category_index(const std::string& name) const;
  std::optional<std::size_t> group_index(const std::string& name) const;
  std::optional<VariableId> find(const std::string& instance, const std::string& category) const;

  std::size_t unlabeled_count() const { return unlabeled_; }
  std::size_t inferred_count() const { return commit_log_.size(); }

  // Unlabeled -> Inferred. Throws InvariantError for any other source state.
  void commit(VariableId v, int label, double probability, CommitMethod method);

  // Re-applies a commit log on top of this graph's current state.
  void replay(std::span<const CommitEntry> log);

 private:
  friend FactorGraph build_graph(std::span<const InstanceRecord>, std::span<const std::string>,
                                 std::span<const RelationRecord>);

  std::vector<std::string> instance_ids_;
  std::vector<Split> splits_;
  std::vector<std::string> categories_;
  std::vector<std::string> groups_;
  std::unordered_map<std::string, std::size_t> instance_lookup_;
  std::unordered_map<std::string, std::size_t> category_lookup_;

  std::vector<Variable> variables_;
  std::vector<Relation> relations_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<CommitEntry> commit_log_;
  std::size_t unlabeled_ = 0;
};

// Throws InputError on duplicate instances, missing train labels, and
// relations naming unknown instances/categories or repeating a
// canonical (a, b, group, polarity) tuple.
FactorGraph build_graph(std::span<const InstanceRecord> instances,
                        std::span<const std::string> categories,
                        std::span<const RelationRecord> relations);

// Sorted union of the label keys of all train records.
std::vector<std::string> collect_categories(std::span<const InstanceRecord> instances);

void commit_label(FactorGraph& graph, VariableId v, int label, double probability,
                  CommitMethod method);

struct LabeledNeighbor {
  RelationId relation;
  VariableId neighbor;
  int label;
};

// Relations of `v` whose other endpoint is labeled, ascending relation id.
std::vector<LabeledNeighbor> labeled_neighbors(const FactorGraph& graph, VariableId v);

}  // namespace gml
