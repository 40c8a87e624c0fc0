#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace gml {

// One (instance, category) decision; used for both gold and predictions.
struct LabeledPair {
  std::string instance;
  std::string category;
  int label = 0;
};

struct CategoryScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct MetricsReport {
  std::map<std::string, CategoryScores> per_category;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double strict_accuracy = 0.0;
  std::size_t decisions = 0;
  std::size_t instances = 0;
};

double f1_score(double precision, double recall);

// Label 1 is the positive class. Throws InputError listing missing pairs
// when the two sides do not cover the same (instance, category) set.
MetricsReport evaluate(std::span<const LabeledPair> predictions, std::span<const LabeledPair> gold);

// Fraction of decisions matching gold; same coverage contract as evaluate.
double oracle_accuracy(std::span<const LabeledPair> gold, std::span<const LabeledPair> predictions);

}  // namespace gml
