#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gml/error.hpp"
#include "gml/inference.hpp"

namespace gml {

void InferenceConfig::validate() const {
  if (top_m < 1) throw InputError("config: top_m must be >= 1");
  if (top_k < 1 || top_k > top_m) throw InputError("config: top_k must be in [1, top_m]");
  if (enum_cap < 1 || enum_cap > 24) throw InputError("config: enum_cap must be in [1, 24]");
  if (!(lambda >= 0.0)) throw InputError("config: lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw InputError("config: learning_rate must be > 0");
  if (max_iters < 0) throw InputError("config: max_iters must be >= 0");
  if (!(grad_tol >= 0.0)) throw InputError("config: grad_tol must be >= 0");
  if (!(weights.w_max > 0.0)) throw InputError("config: w_max must be > 0");
  if (weights.similar < 0.0 || weights.similar > weights.w_max) {
    throw InputError("config: default similar weight must be in [0, w_max]");
  }
  if (weights.opposite > 0.0 || weights.opposite < -weights.w_max) {
    throw InputError("config: default opposite weight must be in [-w_max, 0]");
  }
}

double project_weight(double w, Polarity polarity, double w_max) {
  return polarity == Polarity::Similar ? std::clamp(w, 0.0, w_max) : std::clamp(w, -w_max, 0.0);
}

double WeightTable::default_weight(Polarity polarity) const {
  return polarity == Polarity::Similar ? defaults_.similar : defaults_.opposite;
}

double WeightTable::weight(const std::string& group, Polarity polarity,
                           const std::string& category) const {
  if (auto it = per_category_.find({group, polarity, category}); it != per_category_.end()) {
    return it->second;
  }
  if (auto it = global_.find({group, polarity}); it != global_.end()) return it->second;
  return default_weight(polarity);
}

void WeightTable::set(const std::string& group, Polarity polarity, const std::string& category,
                      double w) {
  per_category_[{group, polarity, category}] = project_weight(w, polarity, defaults_.w_max);
}

void WeightTable::set_global(const std::string& group, Polarity polarity, double w) {
  global_[{group, polarity}] = project_weight(w, polarity, defaults_.w_max);
}

RelationWeights::RelationWeights(const FactorGraph& graph, const WeightTable& table) {
  w_.reserve(graph.relations().size());
  for (const auto& r : graph.relations()) {
    w_.push_back(table.weight(graph.groups()[r.group], r.polarity, graph.category_of(r.a)));
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double factor_value(int label_a, int label_b, double w) {
  return label_a == label_b ? std::exp(w) : 1.0;
}

double conditional_marginal(const FactorGraph& graph, VariableId v, const RelationWeights& weights) {
  double z = 0.0;
  bool any = false;
  for (const auto& n : graph.adjacency(v)) {
    if (auto label = graph.variable(n.variable).label()) {
      z += *label == 1 ? weights[n.relation] : -weights[n.relation];
      any = true;
    }
  }
  return any ? logistic(z) : 0.5;
}

double conditional_marginal(const FactorGraph& graph, VariableId v, const WeightTable& weights) {
  return conditional_marginal(graph, v, RelationWeights(graph, weights));
}

double exact_marginal(const FactorGraph& graph, VariableId target,
                      std::span<const VariableId> free_variables, const RelationWeights& weights,
                      std::size_t enum_cap) {
  const std::size_t n = free_variables.size();
  if (n > enum_cap) {
    throw InvariantError("exact_marginal: " + std::to_string(n) + " free variables exceed enum_cap " +
                         std::to_string(enum_cap));
  }
  auto local = [&](VariableId v) -> std::ptrdiff_t {
    auto it = std::find(free_variables.begin(), free_variables.end(), v);
    return it == free_variables.end() ? -1 : it - free_variables.begin();
  };
  const std::ptrdiff_t t = local(target);
  if (t < 0) throw InvariantError("exact_marginal: target is not in the free set");

  // Log-potentials: unary[i][y] collects clamped neighbors, pairs join free variables.
  std::vector<std::array<double, 2>> unary(n, {0.0, 0.0});
  struct Pair {
    std::size_t i, j;
    double w;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const VariableId v = free_variables[i];
    if (!graph.variable(v).is_unlabeled()) {
      throw InvariantError("exact_marginal: free variable " + std::to_string(v) + " is labeled");
    }
    if (local(v) != static_cast<std::ptrdiff_t>(i)) {
      throw InvariantError("exact_marginal: duplicate free variable " + std::to_string(v));
    }
    for (const auto& nb : graph.adjacency(v)) {
      if (auto label = graph.variable(nb.variable).label()) {
        unary[i][*label] += weights[nb.relation];
      } else if (auto j = local(nb.variable); j > static_cast<std::ptrdiff_t>(i)) {
        pairs.push_back({i, static_cast<std::size_t>(j), weights[nb.relation]});
      }
    }
  }

  const std::size_t states = std::size_t{1} << n;
  std::vector<double> score(states);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < states; ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += unary[i][(mask >> i) & 1U];
    for (const auto& p : pairs) {
      if (((mask >> p.i) & 1U) == ((mask >> p.j) & 1U)) s += p.w;
    }
    score[mask] = s;
    peak = std::max(peak, s);
  }
  double total = 0.0, positive = 0.0;
  for (std::size_t mask = 0; mask < states; ++mask) {
    const double e = std::exp(score[mask] - peak);
    total += e;
    if ((mask >> t) & 1U) positive += e;
  }
  return positive / total;
}

double evidential_support(const FactorGraph& graph, VariableId v) {
  double s = 0.0;
  for (const auto& n : graph.adjacency(v)) {
    if (graph.variable(n.variable).is_labeled()) s += graph.relation(n.relation).confidence;
  }
  return s;
}

double entropy(double p) {
  auto term = [](double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); };
  return term(p) + term(1.0 - p);
}

std::vector<VariableId> rank_by_support(const FactorGraph& graph, std::size_t top_m) {
  std::vector<std::pair<double, VariableId>> scored;
  for (const auto& var : graph.variables()) {
    if (!var.is_unlabeled()) continue;
    const double s = evidential_support(graph, var.id);
    if (s > 0.0) scored.emplace_back(s, var.id);
  }
  auto order = [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  };
  const auto keep = std::min(top_m, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    order);
  std::vector<VariableId> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(scored[i].second);
  return out;
}

std::vector<VariableId> inference_subgraph(const FactorGraph& graph, VariableId candidate,
                                           std::size_t enum_cap) {
  std::vector<std::pair<double, VariableId>> neighbors;
  for (const auto& n : graph.adjacency(candidate)) {
    if (!graph.variable(n.variable).is_unlabeled()) continue;
    const double c = graph.relation(n.relation).confidence;
    auto it = std::find_if(neighbors.begin(), neighbors.end(),
                           [&](const auto& e) { return e.second == n.variable; });
    if (it == neighbors.end()) neighbors.emplace_back(c, n.variable);
    else it->first = std::max(it->first, c);
  }
  std::sort(neighbors.begin(), neighbors.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<VariableId> out{candidate};
  for (const auto& [_, v] : neighbors) {
    if (out.size() >= enum_cap) break;
    out.push_back(v);
  }
  return out;
}

std::vector<double> evidence_positive_rates(const FactorGraph& graph) {
  const std::size_t m = graph.categories().size();
  std::vector<std::size_t> positives(m, 0), total(m, 0);
  for (const auto& var : graph.variables()) {
    if (const auto* e = std::get_if<Evidence>(&var.state)) {
      ++total[var.category];
      positives[var.category] += e->label == 1 ? 1 : 0;
    }
  }
  std::vector<double> rates(m, 0.5);
  for (std::size_t c = 0; c < m; ++c) {
    if (total[c] > 0) rates[c] = static_cast<double>(positives[c]) / static_cast<double>(total[c]);
  }
  return rates;
}

}  // namespace gml
