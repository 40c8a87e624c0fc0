#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gml/error.hpp"
#include "gml/inference.hpp"
#include "gml/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gml;
using namespace gml::testing;

namespace {

const std::vector<std::string> kOne = {"c"};

// Free variable "v" joined to evidence e0.. with the given labels.
FactorGraph star(const std::vector<int>& labels, Polarity polarity) {
  std::vector<InstanceRecord> inst = {test("v")};
  std::vector<RelationRecord> rels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string id = "e" + std::to_string(i);
    inst.push_back(train(id, {{"c", labels[i]}}));
    rels.push_back({"v", id, "c", polarity, "bert", 1.0});
  }
  return build_graph(inst, kOne, rels);
}

WeightTable uniform_table(double similar, double opposite) {
  WeightTable t;
  t.set_global("bert", Polarity::Similar, similar);
  t.set_global("bert", Polarity::Opposite, opposite);
  return t;
}

}  // namespace

TEST_CASE("factor_value") {
  CHECK(factor_value(1, 1, 0.7) == doctest::Approx(2.013752707470477).epsilon(1e-14));
  CHECK(factor_value(1, 0, 0.7) == 1.0);
  CHECK(factor_value(0, 0, -1.2) == doctest::Approx(0.30119421191220214).epsilon(1e-14));
}

TEST_CASE("conditional_marginal matches enumeration on star graphs") {
  SUBCASE("similar neighbors [1, 1, 0], w = 1") {
    const auto g = star({1, 1, 0}, Polarity::Similar);
    const RelationWeights w(g, uniform_table(1.0, -1.0));
    const double p = conditional_marginal(g, 0, w);
    // sigma(1)
    CHECK(std::abs(p - 0.7310585786300049) <= 1e-12);
    CHECK(std::abs(p - brute_force_marginal(g, 0, {0}, {1.0, 1.0, 1.0})) <= 1e-12);
  }
  SUBCASE("one opposite neighbor labeled 1, w = -2") {
    const auto g = star({1}, Polarity::Opposite);
    const RelationWeights w(g, uniform_table(1.0, -2.0));
    const double p = conditional_marginal(g, 0, w);
    CHECK(std::abs(p - 0.11920292202211755) <= 1e-12);
    CHECK(std::abs(p - brute_force_marginal(g, 0, {0}, {-2.0})) <= 1e-12);
  }
  SUBCASE("no labeled neighbors") {
    const auto g = star({}, Polarity::Similar);
    CHECK(conditional_marginal(g, 0, WeightTable{}) == 0.5);
  }
}

TEST_CASE("exact_marginal") {
  SUBCASE("single free variable agrees with the closed form") {
    const auto g = star({1, 1, 0}, Polarity::Similar);
    const RelationWeights w(g, uniform_table(1.0, -1.0));
    const std::vector<VariableId> free_vars = {0};
    CHECK(std::abs(exact_marginal(g, 0, free_vars, w, 12) - conditional_marginal(g, 0, w)) <= 1e-12);
  }
  SUBCASE("two free variables joined by a similar relation, no evidence") {
    std::vector<InstanceRecord> inst = {test("a"), test("b")};
    std::vector<RelationRecord> rels = {similar("a", "b", "c")};
    const auto g = build_graph(inst, kOne, rels);
    const RelationWeights w(g, uniform_table(1.0, -1.0));
    const std::vector<VariableId> free_vars = {0, 1};
    CHECK(exact_marginal(g, 0, free_vars, w, 12) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(exact_marginal(g, 1, free_vars, w, 12) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("isolated free variable") {
    const auto g = star({}, Polarity::Similar);
    const std::vector<VariableId> free_vars = {0};
    CHECK(exact_marginal(g, 0, free_vars, RelationWeights(g, WeightTable{}), 12) == 0.5);
  }
  SUBCASE("free set larger than enum_cap") {
    std::vector<InstanceRecord> inst = {test("a"), test("b"), test("c")};
    const auto g = build_graph(inst, kOne, {});
    const std::vector<VariableId> free_vars = {0, 1, 2};
    CHECK_THROWS_AS(exact_marginal(g, 0, free_vars, RelationWeights(g, WeightTable{}), 2),
                    InvariantError);
  }
  SUBCASE("labeled variable in the free set") {
    const auto g = star({1}, Polarity::Similar);
    const std::vector<VariableId> free_vars = {0, 1};
    CHECK_THROWS_AS(exact_marginal(g, 0, free_vars, RelationWeights(g, WeightTable{}), 12),
                    InvariantError);
  }
}

TEST_CASE("property: exact_marginal equals brute-force enumeration on random subgraphs") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_free = 1 + rng.below(6);
    const std::size_t n_ev = rng.below(6);
    std::vector<InstanceRecord> inst;
    for (std::size_t i = 0; i < n_free; ++i) inst.push_back(test("f" + std::to_string(i)));
    for (std::size_t i = 0; i < n_ev; ++i) {
      inst.push_back(train("e" + std::to_string(i), {{"c", static_cast<int>(rng.below(2))}}));
    }
    std::vector<RelationRecord> rels;
    for (std::size_t a = 0; a < inst.size(); ++a) {
      for (std::size_t b = a + 1; b < inst.size(); ++b) {
        if (a >= n_free && b >= n_free) continue;
        if (!rng.bernoulli(0.4)) continue;
        rels.push_back({inst[a].id, inst[b].id, "c",
                        rng.bernoulli(0.5) ? Polarity::Similar : Polarity::Opposite, "bert", 1.0});
      }
    }
    const auto g = build_graph(inst, kOne, rels);
    const auto table = uniform_table(5.0 * rng.uniform(), -5.0 * rng.uniform());
    const RelationWeights w(g, table);
    std::vector<double> raw(w.values().begin(), w.values().end());
    std::vector<VariableId> free_vars;
    for (std::size_t i = 0; i < n_free; ++i) free_vars.push_back(i);
    const VariableId target = rng.below(n_free);
    CHECK(std::abs(exact_marginal(g, target, free_vars, w, 12) -
                   brute_force_marginal(g, target, free_vars, raw)) <= 1e-12);
  }
}

TEST_CASE("evidential_support") {
  std::vector<InstanceRecord> inst = {test("v"), train("a", {{"c", 1}}), train("b", {{"c", 0}}),
                                      train("d", {{"c", 1}}), test("u")};
  std::vector<RelationRecord> rels = {similar("v", "a", "c", "bert", 1.0),
                                      similar("v", "b", "c", "bert", 0.8),
                                      opposite("v", "d", "c", "bert", 0.5),
                                      similar("v", "u", "c", "bert", 0.7)};
  auto g = build_graph(inst, kOne, rels);
  CHECK(evidential_support(g, 0) == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(evidential_support(g, *g.find("u", "c")) == 0.0);

  const double before = evidential_support(g, 0);
  g.commit(*g.find("u", "c"), 1, 0.8, CommitMethod::Inferred);
  CHECK(evidential_support(g, 0) > before);

  const auto isolated = build_graph(std::vector<InstanceRecord>{test("x")}, kOne, {});
  CHECK(evidential_support(isolated, 0) == 0.0);
}

TEST_CASE("entropy") {
  CHECK(entropy(0.5) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(entropy(0.0) == 0.0);
  CHECK(entropy(1.0) == 0.0);
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform();
    CHECK(std::abs(entropy(p) - entropy(1.0 - p)) <= 1e-15);
    CHECK(entropy(p) >= 0.0);
    CHECK(entropy(p) <= std::numbers::ln2 + 1e-15);
  }
}

TEST_CASE("inference_subgraph keeps the strongest unlabeled neighbors") {
  std::vector<InstanceRecord> inst = {test("v"), test("a"), test("b"), test("d"),
                                      train("e", {{"c", 1}})};
  std::vector<RelationRecord> rels = {similar("v", "a", "c", "bert", 0.4),
                                      similar("v", "b", "c", "bert", 0.9),
                                      similar("v", "d", "c", "bert", 0.6),
                                      similar("v", "e", "c", "bert", 1.0)};
  const auto g = build_graph(inst, kOne, rels);
  const VariableId v = 0, a = 1, b = 2, d = 3;
  CHECK(inference_subgraph(g, v, 12) == std::vector<VariableId>{v, b, d, a});
  CHECK(inference_subgraph(g, v, 2) == std::vector<VariableId>{v, b});
  CHECK(inference_subgraph(g, v, 1) == std::vector<VariableId>{v});
}
