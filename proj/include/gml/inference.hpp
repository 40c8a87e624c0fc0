#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "gml/graph.hpp"

namespace gml {

struct WeightDefaults {
  double similar = 1.0;
  double opposite = -1.0;
  double w_max = 5.0;
};

struct InferenceConfig {
  std::size_t top_m = 64;
  std::size_t top_k = 8;
  // Most unlabeled variables enumerated jointly in one subgraph.
  std::size_t enum_cap = 12;
  // Commits between weight refits; 0 disables refitting.
  std::size_t relearn_interval = 100;
  double lambda = 0.01;
  double learning_rate = 0.1;
  int max_iters = 500;
  double grad_tol = 1e-6;
  std::size_t min_obs = 20;
  std::uint64_t seed = 0;
  WeightDefaults weights;

  void validate() const;
};

// Clamp into the sign box: Similar -> [0, w_max], Opposite -> [-w_max, 0].
double project_weight(double w, Polarity polarity, double w_max);

// Factor weights keyed by (group, polarity, category). Lookups fall back from
// the per-category entry to the group-global entry to the polarity default.
// Every stored value is projected into the sign box.
class WeightTable {
 public:
  using Key = std::tuple<std::string, Polarity, std::string>;
  using GlobalKey = std::pair<std::string, Polarity>;

  explicit WeightTable(WeightDefaults defaults = {}) : defaults_(defaults) {}

  double weight(const std::string& group, Polarity polarity, const std::string& category) const;
  double default_weight(Polarity polarity) const;

  void set(const std::string& group, Polarity polarity, const std::string& category, double w);
  void set_global(const std::string& group, Polarity polarity, double w);

  const std::map<Key, double>& per_category() const { return per_category_; }
  const std::map<GlobalKey, double>& global() const { return global_; }
  const WeightDefaults& defaults() const { return defaults_; }

 private:
  WeightDefaults defaults_;
  std::map<Key, double> per_category_;
  std::map<GlobalKey, double> global_;
};

// WeightTable resolved onto the relations of one graph.
class RelationWeights {
 public:
  RelationWeights(const FactorGraph& graph, const WeightTable& table);
  double operator[](RelationId r) const { return w_[r]; }
  std::span<const double> values() const { return w_; }

 private:
  std::vector<double> w_;
};

double logistic(double x);

// Pairwise factor: e^w when the labels agree, 1 otherwise.
double factor_value(int label_a, int label_b, double w);

// P(v = 1) with every labeled neighbor fixed and unlabeled neighbors ignored:
// sigma(sum_r w_r * (+1 if neighbor label is 1 else -1)).
double conditional_marginal(const FactorGraph& graph, VariableId v, const RelationWeights& weights);
double conditional_marginal(const FactorGraph& graph, VariableId v, const WeightTable& weights);

// P(target = 1) by enumerating all 2^|free| assignments of the free set.
// Labeled endpoints are clamped; relations to unlabeled variables outside
// the free set are dropped. Throws InvariantError if the free set exceeds
// enum_cap, does not contain target, or contains a labeled variable.
double exact_marginal(const FactorGraph& graph, VariableId target,
                      std::span<const VariableId> free_variables, const RelationWeights& weights,
                      std::size_t enum_cap);

// Sum of confidences of relations to labeled neighbors.
double evidential_support(const FactorGraph& graph, VariableId v);

// Binary entropy in nats, 0 ln 0 := 0.
double entropy(double p);

// Unlabeled variables with positive support, by support descending then id
// ascending, truncated to top_m.
std::vector<VariableId> rank_by_support(const FactorGraph& graph, std::size_t top_m);

// Candidate plus its unlabeled 1-hop neighbors, strongest relation first,
// capped at enum_cap variables in total.
std::vector<VariableId> inference_subgraph(const FactorGraph& graph, VariableId candidate,
                                           std::size_t enum_cap);

// Regularized conditional pseudo-likelihood over labeled variables:
//   L(theta) = sum_v log P(y_v | labeled neighbors) - lambda * |theta|^2
// Each relation either maps to a free parameter or carries a fixed weight.
class PseudoLikelihood {
 public:
  static constexpr int kFixed = -1;

  PseudoLikelihood(const FactorGraph& graph, std::span<const int> relation_param,
                   std::span<const double> fixed_weight, std::size_t dimension, double lambda);

  std::size_t dimension() const { return dimension_; }
  std::size_t observations() const { return obs_.size(); }
  double value(std::span<const double> theta) const;
  std::vector<double> gradient(std::span<const double> theta) const;

 private:
  struct Observation {
    int label;
    double offset;
    std::vector<std::pair<int, double>> features;
  };
  double activation(const Observation& o, std::span<const double> theta) const;

  std::size_t dimension_;
  double lambda_;
  std::vector<Observation> obs_;
};

struct AscentResult {
  std::vector<double> theta;
  std::vector<double> objective_trace;  // one entry per accepted step, plus the start
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent with step halving on objective decrease, so the
// accepted objective sequence is non-decreasing.
AscentResult projected_gradient_ascent(const PseudoLikelihood& objective, std::vector<double> init,
                                       std::span<const Polarity> signs,
                                       const InferenceConfig& config);

// Fits per-(group, polarity, category) weights from labeled-labeled
// relations. Evidence and Inferred variables both count as labeled.
WeightTable learn_weights(const FactorGraph& graph, const InferenceConfig& config);

struct GradualStats {
  std::size_t inferred = 0;
  std::size_t fallback = 0;
  std::size_t refits = 0;
  WeightTable final_weights;
};

// Labels every unlabeled variable: highest-certainty first while any has
// positive evidential support, then label 0 for the rest.
FactorGraph gradual_inference(FactorGraph graph, WeightTable weights, const InferenceConfig& config,
                              GradualStats* stats = nullptr);

// Propagation-free reference: each unlabeled variable is labeled from its
// initially labeled neighbors alone, with no commits feeding later decisions.
FactorGraph one_shot_baseline(FactorGraph graph, const WeightTable& weights);

// Evidence positive rate per category (0.5 when a category has no evidence).
std::vector<double> evidence_positive_rates(const FactorGraph& graph);

}  // namespace gml
