#include <doctest.h>

#include <set>
#include <tuple>

#include "gml/error.hpp"
#include "gml/graph.hpp"
#include "gml/rng.hpp"
#include "helpers.hpp"

using namespace gml;
using namespace gml::testing;

namespace {

const std::vector<std::string> kCats = {"Ambience", "Food", "Price", "Service"};

std::vector<InstanceRecord> running_example() {
  return {train("s1", {{"Food", 1}, {"Price", 1}, {"Service", 0}, {"Ambience", 0}}),
          train("s2", {{"Food", 0}, {"Price", 0}, {"Service", 1}, {"Ambience", 0}}),
          test("s3")};
}

}  // namespace

TEST_CASE("build_graph materializes one variable per (instance, category)") {
  const auto g = build_graph(running_example(), kCats, {});
  CHECK(g.variables().size() == 12);
  std::size_t evidence = 0, unlabeled = 0;
  for (const auto& v : g.variables()) {
    evidence += v.is_evidence();
    unlabeled += v.is_unlabeled();
  }
  CHECK(evidence == 8);
  CHECK(unlabeled == 4);
  CHECK(g.unlabeled_count() == 4);

  // s1: "Food was very expensive for what you get." -> Food, Price
  CHECK(g.variable(*g.find("s1", "Food")).label() == 1);
  CHECK(g.variable(*g.find("s1", "Price")).label() == 1);
  CHECK(g.variable(*g.find("s1", "Service")).label() == 0);
  CHECK(g.variable(*g.find("s1", "Ambience")).label() == 0);
  CHECK(g.variable(*g.find("s3", "Food")).is_unlabeled());
}

TEST_CASE("build_graph rejects bad input") {
  SUBCASE("relation naming an unknown instance") {
    std::vector<RelationRecord> rels = {similar("s3", "zzz", "Food")};
    try {
      build_graph(running_example(), kCats, rels);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("zzz") != std::string::npos);
    }
  }
  SUBCASE("unknown category") {
    std::vector<RelationRecord> rels = {similar("s3", "s1", "Menu")};
    CHECK_THROWS_AS(build_graph(running_example(), kCats, rels), InputError);
  }
  SUBCASE("duplicate instance") {
    auto inst = running_example();
    inst.push_back(test("s3"));
    CHECK_THROWS_AS(build_graph(inst, kCats, {}), InputError);
  }
  SUBCASE("train instance missing a label") {
    std::vector<InstanceRecord> inst = {train("s1", {{"Food", 1}})};
    CHECK_THROWS_AS(build_graph(inst, kCats, {}), InputError);
  }
  SUBCASE("self relation") {
    std::vector<RelationRecord> rels = {similar("s3", "s3", "Food")};
    CHECK_THROWS_AS(build_graph(running_example(), kCats, rels), InputError);
  }
  SUBCASE("duplicate canonical tuple in either direction") {
    std::vector<RelationRecord> rels = {similar("s3", "s1", "Food"), similar("s1", "s3", "Food")};
    CHECK_THROWS_AS(build_graph(running_example(), kCats, rels), InputError);
  }
}

TEST_CASE("same pair may carry different groups and polarities") {
  std::vector<RelationRecord> rels = {similar("s3", "s1", "Food", "bert"),
                                      similar("s3", "s1", "Food", "knn"),
                                      opposite("s3", "s1", "Food", "bert")};
  const auto g = build_graph(running_example(), kCats, rels);
  CHECK(g.relations().size() == 3);
  for (const auto& r : g.relations()) CHECK(r.a < r.b);
  CHECK(g.groups() == std::vector<std::string>{"bert", "knn"});
}

TEST_CASE("commit_label") {
  auto g = build_graph(running_example(), kCats, {});
  const VariableId food = *g.find("s3", "Food");
  const VariableId price = *g.find("s3", "Price");

  commit_label(g, food, 1, 0.91, CommitMethod::Inferred);
  const auto& st = std::get<Inferred>(g.variable(food).state);
  CHECK(st.label == 1);
  CHECK(st.probability == 0.91);
  CHECK(st.commit_order == 1);
  CHECK(g.commit_log().size() == 1);

  CHECK_THROWS_AS(commit_label(g, food, 0, 0.2, CommitMethod::Inferred), InvariantError);
  CHECK_THROWS_AS(commit_label(g, *g.find("s1", "Food"), 0, 0.2, CommitMethod::Inferred),
                  InvariantError);

  commit_label(g, price, 0, 0.1, CommitMethod::Fallback);
  CHECK(std::get<Inferred>(g.variable(price).state).commit_order == 2);
  CHECK(g.unlabeled_count() == 2);
}

TEST_CASE("labeled_neighbors filters to labeled endpoints in relation order") {
  std::vector<InstanceRecord> inst = {train("e1", {{"c", 1}}), test("t0"), test("u1"), test("i2"),
                                      test("iso")};
  std::vector<RelationRecord> rels = {similar("t0", "e1", "c"), similar("t0", "u1", "c"),
                                      opposite("t0", "i2", "c")};
  auto g = build_graph(inst, std::vector<std::string>{"c"}, rels);
  commit_label(g, *g.find("i2", "c"), 0, 0.3, CommitMethod::Inferred);

  const auto ln = labeled_neighbors(g, *g.find("t0", "c"));
  REQUIRE(ln.size() == 2);
  CHECK(ln[0].label == 1);
  CHECK(ln[1].label == 0);
  CHECK(ln[0].relation < ln[1].relation);

  CHECK(labeled_neighbors(g, *g.find("iso", "c")).empty());
  // u1's only neighbor t0 is unlabeled
  CHECK(labeled_neighbors(g, *g.find("u1", "c")).empty());
}

TEST_CASE("property: variable count, adjacency symmetry, commit-log replay") {
  Rng rng(20240601);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(15);
    const std::size_t m = 1 + rng.below(5);
    std::vector<std::string> cats;
    for (std::size_t c = 0; c < m; ++c) cats.push_back("c" + std::to_string(c));
    std::vector<InstanceRecord> inst;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(0.5)) {
        std::map<std::string, int> labels;
        for (const auto& c : cats) labels[c] = static_cast<int>(rng.below(2));
        inst.push_back(train("i" + std::to_string(i), labels));
      } else {
        inst.push_back(test("i" + std::to_string(i)));
      }
    }
    std::vector<RelationRecord> rels;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> used;
    for (int r = 0; r < 25; ++r) {
      std::size_t a = rng.below(n), b = rng.below(n), c = rng.below(m);
      if (a == b || !used.insert({std::min(a, b), std::max(a, b), c}).second) continue;
      rels.push_back(similar(inst[a].id, inst[b].id, cats[c], "bert", 0.5 + 0.5 * rng.uniform()));
    }

    auto g = build_graph(inst, cats, rels);
    CHECK(g.variables().size() == n * m);
    for (RelationId r = 0; r < g.relations().size(); ++r) {
      const auto& rel = g.relation(r);
      auto has = [&](VariableId v, VariableId other) {
        for (const auto& nb : g.adjacency(v)) {
          if (nb.relation == r && nb.variable == other) return true;
        }
        return false;
      };
      CHECK(has(rel.a, rel.b));
      CHECK(has(rel.b, rel.a));
      CHECK(g.variable(rel.a).category == g.variable(rel.b).category);
    }

    const auto fresh = g;
    for (const auto& v : fresh.variables()) {
      if (v.is_unlabeled() && rng.bernoulli(0.7)) {
        g.commit(v.id, static_cast<int>(rng.below(2)), rng.uniform(), CommitMethod::Inferred);
      }
    }
    auto replayed = fresh;
    replayed.replay(g.commit_log());
    for (const auto& v : g.variables()) {
      const auto& w = replayed.variable(v.id);
      CHECK(v.label() == w.label());
      if (const auto* i = std::get_if<Inferred>(&v.state)) {
        const auto& j = std::get<Inferred>(w.state);
        CHECK(i->probability == j.probability);
        CHECK(i->commit_order == j.commit_order);
      }
    }
    CHECK(replayed.commit_log() == g.commit_log());
  }
}
