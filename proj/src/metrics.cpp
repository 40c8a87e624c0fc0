#include "gml/metrics.hpp"

#include <utility>

#include "gml/error.hpp"

namespace gml {
namespace {

using PairKey = std::pair<std::string, std::string>;

std::map<PairKey, int> index_pairs(std::span<const LabeledPair> pairs, const char* side) {
  std::map<PairKey, int> out;
  for (const auto& p : pairs) {
    if (!out.emplace(PairKey{p.instance, p.category}, p.label).second) {
      throw InputError(std::string("duplicate ") + side + " decision for (" + p.instance + ", " +
                       p.category + ")");
    }
  }
  return out;
}

void check_coverage(const std::map<PairKey, int>& pred, const std::map<PairKey, int>& gold) {
  constexpr std::size_t kMaxListed = 10;
  std::vector<std::string> missing;
  std::size_t count = 0;
  auto note = [&](const PairKey& k, const char* where) {
    if (missing.size() < kMaxListed) {
      missing.push_back("(" + k.first + ", " + k.second + ") missing from " + where);
    }
    ++count;
  };
  for (const auto& [k, _] : gold) {
    if (!pred.count(k)) note(k, "predictions");
  }
  for (const auto& [k, _] : pred) {
    if (!gold.count(k)) note(k, "gold");
  }
  if (count == 0) return;
  std::string msg = "prediction/gold coverage mismatch (" + std::to_string(count) + " pairs):";
  for (const auto& m : missing) msg += "\n  " + m;
  if (count > missing.size()) msg += "\n  ...";
  throw InputError(msg);
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

MetricsReport evaluate(std::span<const LabeledPair> predictions, std::span<const LabeledPair> gold) {
  const auto pred = index_pairs(predictions, "prediction");
  const auto truth = index_pairs(gold, "gold");
  check_coverage(pred, truth);

  MetricsReport report;
  std::map<std::string, bool> instance_correct;
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (const auto& [key, y] : truth) {
    const int yhat = pred.at(key);
    auto& cs = report.per_category[key.second];
    if (yhat == 1 && y == 1) ++cs.tp;
    else if (yhat == 1) ++cs.fp;
    else if (y == 1) ++cs.fn;
    else ++cs.tn;
    auto [it, _] = instance_correct.emplace(key.first, true);
    if (yhat != y) it->second = false;
    else ++correct;
  }

  double f1_sum = 0.0;
  for (auto& [_, cs] : report.per_category) {
    cs.precision = ratio(cs.tp, cs.tp + cs.fp);
    cs.recall = ratio(cs.tp, cs.tp + cs.fn);
    cs.f1 = f1_score(cs.precision, cs.recall);
    cs.accuracy = ratio(cs.tp + cs.tn, cs.tp + cs.tn + cs.fp + cs.fn);
    tp += cs.tp;
    fp += cs.fp;
    fn += cs.fn;
    f1_sum += cs.f1;
  }

  report.micro_precision = ratio(tp, tp + fp);
  report.micro_recall = ratio(tp, tp + fn);
  report.micro_f1 = f1_score(report.micro_precision, report.micro_recall);
  report.macro_f1 = report.per_category.empty()
                        ? 0.0
                        : f1_sum / static_cast<double>(report.per_category.size());
  report.decisions = truth.size();
  report.accuracy = ratio(correct, truth.size());

  std::size_t strict = 0;
  for (const auto& [_, ok] : instance_correct) strict += ok ? 1 : 0;
  report.instances = instance_correct.size();
  report.strict_accuracy = ratio(strict, instance_correct.size());
  return report;
}

double oracle_accuracy(std::span<const LabeledPair> gold, std::span<const LabeledPair> predictions) {
  const auto pred = index_pairs(predictions, "prediction");
  const auto truth = index_pairs(gold, "gold");
  check_coverage(pred, truth);
  std::size_t correct = 0;
  for (const auto& [key, y] : truth) correct += pred.at(key) == y ? 1 : 0;
  return ratio(correct, truth.size());
}

}  // namespace gml
