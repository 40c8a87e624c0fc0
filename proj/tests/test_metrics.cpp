#include <doctest.h>

#include <algorithm>

#include "gml/error.hpp"
#include "gml/metrics.hpp"
#include "gml/rng.hpp"

using namespace gml;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

struct Sample {
  std::vector<LabeledPair> gold;
  std::vector<LabeledPair> pred;
};

Sample random_sample(Rng& rng) {
  Sample s;
  const std::size_t n_inst = 1 + rng.below(12);
  const std::size_t n_cat = 1 + rng.below(4);
  for (std::size_t i = 0; i < n_inst; ++i) {
    for (std::size_t c = 0; c < n_cat; ++c) {
      const std::string inst = "i" + std::to_string(i);
      const std::string cat = "c" + std::to_string(c);
      s.gold.push_back({inst, cat, rng.bernoulli(0.4) ? 1 : 0});
      s.pred.push_back({inst, cat, rng.bernoulli(0.5) ? 1 : 0});
    }
  }
  return s;
}

}  // namespace

TEST_CASE("perfect predictions") {
  std::vector<LabeledPair> gold = {{"a", "x", 1}, {"a", "y", 0}, {"b", "x", 0}, {"b", "y", 1}};
  const auto r = evaluate(gold, gold);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.micro_f1 == 1.0);
  CHECK(r.accuracy == 1.0);
  CHECK(r.strict_accuracy == 1.0);
  CHECK(r.decisions == 4);
  CHECK(r.instances == 2);
}

TEST_CASE("one of each outcome") {
  std::vector<LabeledPair> gold = {{"a", "x", 1}, {"b", "x", 0}, {"c", "x", 1}, {"d", "x", 0}};
  std::vector<LabeledPair> pred = {{"a", "x", 1}, {"b", "x", 1}, {"c", "x", 0}, {"d", "x", 0}};
  const auto r = evaluate(pred, gold);
  const auto& s = r.per_category.at("x");
  CHECK(s.tp == 1);
  CHECK(s.fp == 1);
  CHECK(s.fn == 1);
  CHECK(s.tn == 1);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 0.5);
  CHECK(s.f1 == 0.5);
  CHECK(r.macro_f1 == 0.5);
  CHECK(r.accuracy == 0.5);
}

TEST_CASE("strict accuracy needs every category right") {
  std::vector<LabeledPair> gold = {{"a", "x", 1}, {"a", "y", 0}, {"b", "x", 0}, {"b", "y", 1}};
  std::vector<LabeledPair> pred = {{"a", "x", 1}, {"a", "y", 0}, {"b", "x", 0}, {"b", "y", 0}};
  const auto r = evaluate(pred, gold);
  CHECK(r.strict_accuracy == 0.5);
  CHECK(r.accuracy == 0.75);
}

TEST_CASE("no positives anywhere gives zero F1, not NaN") {
  std::vector<LabeledPair> gold = {{"a", "x", 0}};
  const auto r = evaluate(gold, gold);
  CHECK(r.macro_f1 == 0.0);
  CHECK(r.accuracy == 1.0);
}

TEST_CASE("coverage mismatch is an error that lists pairs") {
  std::vector<LabeledPair> gold = {{"a", "x", 1}, {"b", "x", 0}};
  std::vector<LabeledPair> pred = {{"a", "x", 1}, {"z", "x", 0}};
  try {
    evaluate(pred, gold);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(contains(e.what(), "(b, x)"));
    CHECK(contains(e.what(), "(z, x)"));
  }
  std::vector<LabeledPair> dup = {{"a", "x", 1}, {"a", "x", 0}};
  CHECK_THROWS_AS(evaluate(dup, gold), InputError);
}

TEST_CASE("property: metric invariants") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = random_sample(rng);
    const auto r = evaluate(s.pred, s.gold);

    // permutation invariance
    auto shuffled = s.pred;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    const auto r2 = evaluate(shuffled, s.gold);
    CHECK(r2.macro_f1 == r.macro_f1);
    CHECK(r2.micro_f1 == r.micro_f1);
    CHECK(r2.strict_accuracy == r.strict_accuracy);

    double mean = 0.0;
    for (const auto& [_, cs] : r.per_category) {
      CHECK(r.strict_accuracy <= cs.accuracy + 1e-15);
      CHECK(cs.tp + cs.fp + cs.fn + cs.tn == r.instances);
      mean += cs.f1;
    }
    mean /= static_cast<double>(r.per_category.size());
    CHECK(r.macro_f1 == doctest::Approx(mean).epsilon(1e-15));
    for (double v : {r.macro_f1, r.micro_f1, r.accuracy, r.strict_accuracy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}
