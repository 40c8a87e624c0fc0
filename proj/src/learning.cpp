#include <algorithm>
#include <cmath>
#include <map>

#include "gml/inference.hpp"

namespace gml {
namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct KeyCounts {
  std::size_t observations = 0;
  std::size_t consistent = 0;
  std::size_t inconsistent = 0;
};

// Smoothed log-odds of consistency, signed by polarity and projected.
double initial_weight(const KeyCounts& c, Polarity polarity, double w_max) {
  const double log_odds = std::log((static_cast<double>(c.consistent) + 1.0) /
                                   (static_cast<double>(c.inconsistent) + 1.0));
  return project_weight(polarity == Polarity::Similar ? log_odds : -log_odds, polarity, w_max);
}

std::vector<double> project_all(std::vector<double> theta, std::span<const Polarity> signs,
                                double w_max) {
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = project_weight(theta[i], signs[i], w_max);
  return theta;
}

}  // namespace

PseudoLikelihood::PseudoLikelihood(const FactorGraph& graph, std::span<const int> relation_param,
                                   std::span<const double> fixed_weight, std::size_t dimension,
                                   double lambda)
    : dimension_(dimension), lambda_(lambda) {
  for (const auto& var : graph.variables()) {
    auto y = var.label();
    if (!y) continue;
    Observation o{*y, 0.0, {}};
    bool any = false;
    for (const auto& n : graph.adjacency(var.id)) {
      auto label = graph.variable(n.variable).label();
      if (!label) continue;
      any = true;
      const double sign = *label == 1 ? 1.0 : -1.0;
      const int p = relation_param[n.relation];
      if (p == kFixed) {
        o.offset += sign * fixed_weight[n.relation];
        continue;
      }
      auto it = std::find_if(o.features.begin(), o.features.end(),
                             [p](const auto& f) { return f.first == p; });
      if (it == o.features.end()) o.features.emplace_back(p, sign);
      else it->second += sign;
    }
    if (any) obs_.push_back(std::move(o));
  }
}

double PseudoLikelihood::activation(const Observation& o, std::span<const double> theta) const {
  double z = o.offset;
  for (const auto& [p, x] : o.features) z += theta[static_cast<std::size_t>(p)] * x;
  return z;
}

double PseudoLikelihood::value(std::span<const double> theta) const {
  double total = 0.0;
  for (const auto& o : obs_) {
    const double z = activation(o, theta);
    // log sigma(z) for y = 1, log sigma(-z) for y = 0
    total += (o.label == 1 ? z : 0.0) - softplus(z);
  }
  for (double w : theta) total -= lambda_ * w * w;
  return total;
}

std::vector<double> PseudoLikelihood::gradient(std::span<const double> theta) const {
  std::vector<double> g(dimension_, 0.0);
  for (const auto& o : obs_) {
    const double residual = static_cast<double>(o.label) - logistic(activation(o, theta));
    for (const auto& [p, x] : o.features) g[static_cast<std::size_t>(p)] += residual * x;
  }
  for (std::size_t i = 0; i < dimension_; ++i) g[i] -= 2.0 * lambda_ * theta[i];
  return g;
}

AscentResult projected_gradient_ascent(const PseudoLikelihood& objective, std::vector<double> init,
                                       std::span<const Polarity> signs,
                                       const InferenceConfig& config) {
  const double w_max = config.weights.w_max;
  AscentResult result;
  result.theta = project_all(std::move(init), signs, w_max);
  if (objective.dimension() == 0) {
    result.converged = true;
    return result;
  }

  // Steps and the stopping test use the per-observation mean gradient.
  const double scale = 1.0 / static_cast<double>(std::max<std::size_t>(1, objective.observations()));
  double step = config.learning_rate;
  double current = objective.value(result.theta);
  result.objective_trace.push_back(current);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    const auto g = objective.gradient(result.theta);
    double pg_norm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double w = result.theta[i];
      const double lo = signs[i] == Polarity::Similar ? 0.0 : -w_max;
      const double hi = signs[i] == Polarity::Similar ? w_max : 0.0;
      // components pushing against an active bound do not count
      if ((w <= lo && g[i] < 0.0) || (w >= hi && g[i] > 0.0)) continue;
      pg_norm = std::max(pg_norm, std::abs(g[i]) * scale);
    }
    if (pg_norm < config.grad_tol) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> trial(result.theta.size());
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = project_weight(result.theta[i] + step * scale * g[i], signs[i], w_max);
      }
      const double value = objective.value(trial);
      if (value >= current) {
        const bool moved = trial != result.theta;
        result.theta = std::move(trial);
        current = value;
        accepted = moved;
        break;
      }
      step *= 0.5;
    }
    ++result.iterations;
    if (!accepted) {
      // no ascent direction left at floating-point resolution
      result.converged = true;
      break;
    }
    result.objective_trace.push_back(current);
    step *= 1.5;
  }
  return result;
}

WeightTable learn_weights(const FactorGraph& graph, const InferenceConfig& config) {
  WeightTable table(config.weights);
  const auto& groups = graph.groups();
  const auto& rels = graph.relations();

  using Key = std::tuple<std::size_t, Polarity, std::size_t>;  // group, polarity, category
  using GlobalKey = std::pair<std::size_t, Polarity>;
  std::map<Key, KeyCounts> per_key;
  std::map<GlobalKey, KeyCounts> per_global;
  for (const auto& r : rels) {
    auto la = graph.variable(r.a).label();
    auto lb = graph.variable(r.b).label();
    if (!la || !lb) continue;
    const bool equal = *la == *lb;
    const bool consistent = r.polarity == Polarity::Similar ? equal : !equal;
    for (KeyCounts* c : {&per_key[{r.group, r.polarity, graph.variable(r.a).category}],
                         &per_global[{r.group, r.polarity}]}) {
      ++c->observations;
      ++(consistent ? c->consistent : c->inconsistent);
    }
  }
  if (per_key.empty()) return table;

  // Stage 1: one tied weight per (group, polarity) across categories.
  {
    std::map<GlobalKey, int> index;
    std::vector<Polarity> signs;
    std::vector<double> init;
    for (const auto& [key, counts] : per_global) {
      if (counts.observations < config.min_obs) continue;
      index[key] = static_cast<int>(signs.size());
      signs.push_back(key.second);
      init.push_back(initial_weight(counts, key.second, config.weights.w_max));
    }
    std::vector<int> param(rels.size(), PseudoLikelihood::kFixed);
    std::vector<double> fixed(rels.size(), 0.0);
    for (std::size_t r = 0; r < rels.size(); ++r) {
      auto it = index.find({rels[r].group, rels[r].polarity});
      if (it != index.end()) param[r] = it->second;
      else fixed[r] = table.default_weight(rels[r].polarity);
    }
    if (!signs.empty()) {
      PseudoLikelihood objective(graph, param, fixed, signs.size(), config.lambda);
      auto fit = projected_gradient_ascent(objective, init, signs, config);
      for (const auto& [key, i] : index) {
        table.set_global(groups[key.first], key.second, fit.theta[static_cast<std::size_t>(i)]);
      }
    }
  }

  // Stage 2: per-category weights where observations allow; the rest stay at
  // their stage-1 (or default) value.
  {
    std::map<Key, int> index;
    std::vector<Polarity> signs;
    std::vector<double> init;
    for (const auto& [key, counts] : per_key) {
      if (counts.observations < config.min_obs) continue;
      index[key] = static_cast<int>(signs.size());
      signs.push_back(std::get<1>(key));
      init.push_back(initial_weight(counts, std::get<1>(key), config.weights.w_max));
    }
    if (!signs.empty()) {
      std::vector<int> param(rels.size(), PseudoLikelihood::kFixed);
      std::vector<double> fixed(rels.size(), 0.0);
      for (std::size_t r = 0; r < rels.size(); ++r) {
        const auto& rel = rels[r];
        auto it = index.find({rel.group, rel.polarity, graph.variable(rel.a).category});
        if (it != index.end()) param[r] = it->second;
        else fixed[r] = table.weight(groups[rel.group], rel.polarity, graph.category_of(rel.a));
      }
      PseudoLikelihood objective(graph, param, fixed, signs.size(), config.lambda);
      auto fit = projected_gradient_ascent(objective, init, signs, config);
      for (const auto& [key, i] : index) {
        table.set(groups[std::get<0>(key)], std::get<1>(key),
                  graph.categories()[std::get<2>(key)], fit.theta[static_cast<std::size_t>(i)]);
      }
    }
  }
  return table;
}

}  // namespace gml
