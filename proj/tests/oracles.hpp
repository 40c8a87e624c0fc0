#pragma once

// Independent reference computations. Nothing here calls into the
// inference code it is used to check.

#include <cmath>
#include <vector>

#include "gml/graph.hpp"

namespace gml::testing {

// P(target = 1) by brute force over every assignment of `free_vars`, scoring
// each with the literal product of pairwise factors (e^w on agreement, else
// 1). Relations to unlabeled variables outside the free set are skipped.
inline double brute_force_marginal(const FactorGraph& g, VariableId target,
                                   const std::vector<VariableId>& free_vars,
                                   const std::vector<double>& relation_weight) {
  auto slot = [&](VariableId v) -> int {
    for (std::size_t i = 0; i < free_vars.size(); ++i) {
      if (free_vars[i] == v) return static_cast<int>(i);
    }
    return -1;
  };
  double num = 0.0, den = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << free_vars.size()); ++mask) {
    auto value_of = [&](VariableId v) -> int {
      int s = slot(v);
      if (s >= 0) return static_cast<int>((mask >> s) & 1U);
      auto l = g.variable(v).label();
      return l ? *l : -1;
    };
    double prod = 1.0;
    for (RelationId r = 0; r < g.relations().size(); ++r) {
      const auto& rel = g.relation(r);
      if (slot(rel.a) < 0 && slot(rel.b) < 0) continue;
      const int xa = value_of(rel.a), xb = value_of(rel.b);
      if (xa < 0 || xb < 0) continue;
      if (xa == xb) prod *= std::exp(relation_weight[r]);
    }
    den += prod;
    if ((mask >> slot(target)) & 1U) num += prod;
  }
  return num / den;
}

}  // namespace gml::testing
