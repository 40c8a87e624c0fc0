#include "gml/io.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "gml/error.hpp"

namespace gml {
namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    throw InputError(std::string("field \"") + key + "\" must be a non-empty string");
  }
  return v.get<std::string>();
}

int require_label(const json& v, const std::string& what) {
  if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
    throw InputError(what + " must be 0 or 1");
  }
  return v.get<int>();
}

}  // namespace

void for_each_jsonl(const fs::path& path, const std::function<void(std::size_t, const json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected a JSON object");
    }
    try {
      fn(line_no, j);
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  auto out = open_out(path);
  for (const auto& row : rows) out << row.dump() << '\n';
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
}

std::vector<InstanceRecord> read_instances(const fs::path& path) {
  std::vector<InstanceRecord> out;
  for_each_jsonl(path, [&](std::size_t, const json& j) {
    InstanceRecord rec;
    rec.id = require_string(j, "id");
    const std::string split = require_string(j, "split");
    if (split == "train") rec.split = Split::Train;
    else if (split == "test") rec.split = Split::Test;
    else throw InputError("split must be \"train\" or \"test\", got \"" + split + "\"");
    if (rec.split == Split::Train) {
      const json& labels = require(j, "labels");
      if (!labels.is_object()) throw InputError("\"labels\" must be an object");
      for (const auto& [cat, v] : labels.items()) {
        rec.labels[cat] = require_label(v, "label of '" + cat + "'");
      }
    }
    out.push_back(std::move(rec));
  });
  return out;
}

void write_instances(const fs::path& path, const std::vector<InstanceRecord>& instances) {
  std::vector<json> rows;
  rows.reserve(instances.size());
  for (const auto& rec : instances) {
    json j = {{"id", rec.id}, {"split", to_string(rec.split)}};
    if (rec.split == Split::Train) j["labels"] = rec.labels;
    rows.push_back(std::move(j));
  }
  write_jsonl(path, rows);
}

std::vector<EmbeddingRecord> read_embeddings(const fs::path& path) {
  std::vector<EmbeddingRecord> out;
  for_each_jsonl(path, [&](std::size_t, const json& j) {
    EmbeddingRecord rec;
    rec.instance = require_string(j, "id");
    rec.category = require_string(j, "category");
    const json& v = require(j, "vector");
    if (!v.is_array()) throw InputError("\"vector\" must be an array");
    for (const auto& x : v) {
      if (!x.is_number()) throw InputError("\"vector\" must contain numbers");
      rec.vector.push_back(x.get<double>());
    }
    out.push_back(std::move(rec));
  });
  return out;
}

void write_embeddings(const fs::path& path, const std::vector<EmbeddingRecord>& embeddings) {
  std::vector<json> rows;
  rows.reserve(embeddings.size());
  for (const auto& e : embeddings) {
    rows.push_back({{"id", e.instance}, {"category", e.category}, {"vector", e.vector}});
  }
  write_jsonl(path, rows);
}

json relation_to_json(const RelationRecord& r) {
  return {{"a", r.a},
          {"b", r.b},
          {"category", r.category},
          {"polarity", to_string(r.polarity)},
          {"group", r.group},
          {"confidence", r.confidence}};
}

RelationRecord relation_from_json(const json& j) {
  RelationRecord r;
  r.a = require_string(j, "a");
  r.b = require_string(j, "b");
  r.category = require_string(j, "category");
  const std::string polarity = require_string(j, "polarity");
  if (polarity == "similar") r.polarity = Polarity::Similar;
  else if (polarity == "opposite") r.polarity = Polarity::Opposite;
  else throw InputError("polarity must be \"similar\" or \"opposite\", got \"" + polarity + "\"");
  r.group = require_string(j, "group");
  if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw InputError("\"confidence\" must be a number");
    r.confidence = it->get<double>();
    if (!(r.confidence > 0.0 && r.confidence <= 1.0)) {
      throw InputError("\"confidence\" must be in (0, 1]");
    }
  }
  return r;
}

void write_relations(const fs::path& path, const std::vector<RelationRecord>& relations) {
  std::vector<json> rows;
  rows.reserve(relations.size());
  for (const auto& r : relations) rows.push_back(relation_to_json(r));
  write_jsonl(path, rows);
}

std::vector<Prediction> predictions_from_graph(const FactorGraph& graph) {
  std::vector<Prediction> out;
  out.reserve(graph.variables().size());
  for (const auto& v : graph.variables()) {
    Prediction p;
    p.instance = graph.instance_of(v.id);
    p.category = graph.category_of(v.id);
    if (const auto* e = std::get_if<Evidence>(&v.state)) {
      p.label = e->label;
      p.probability = e->label;
      p.method = "evidence";
    } else if (const auto* i = std::get_if<Inferred>(&v.state)) {
      p.label = i->label;
      p.probability = i->probability;
      p.order = i->commit_order;
      p.method = to_string(graph.commit_log()[i->commit_order - 1].method);
    } else {
      throw InvariantError("predictions requested while variable " + std::to_string(v.id) +
                           " is still unlabeled");
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_predictions(const fs::path& path, const std::vector<Prediction>& predictions) {
  std::vector<json> rows;
  rows.reserve(predictions.size());
  for (const auto& p : predictions) {
    json j = {{"id", p.instance},
              {"category", p.category},
              {"label", p.label},
              {"probability", p.probability}};
    j["order"] = p.order ? json(*p.order) : json(nullptr);
    j["method"] = p.method;
    rows.push_back(std::move(j));
  }
  write_jsonl(path, rows);
}

std::vector<Prediction> read_predictions(const fs::path& path) {
  std::vector<Prediction> out;
  for_each_jsonl(path, [&](std::size_t, const json& j) {
    Prediction p;
    p.instance = require_string(j, "id");
    p.category = require_string(j, "category");
    p.label = require_label(require(j, "label"), "\"label\"");
    if (auto it = j.find("probability"); it != j.end() && it->is_number()) {
      p.probability = it->get<double>();
    }
    if (auto it = j.find("order"); it != j.end() && it->is_number_integer()) {
      p.order = it->get<std::size_t>();
    }
    if (auto it = j.find("method"); it != j.end() && it->is_string()) p.method = it->get<std::string>();
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<LabeledPair> read_gold(const fs::path& path) {
  std::vector<LabeledPair> out;
  for_each_jsonl(path, [&](std::size_t, const json& j) {
    out.push_back({require_string(j, "id"), require_string(j, "category"),
                   require_label(require(j, "label"), "\"label\"")});
  });
  return out;
}

void write_gold(const fs::path& path, const std::vector<LabeledPair>& gold) {
  std::vector<json> rows;
  rows.reserve(gold.size());
  for (const auto& g : gold) {
    rows.push_back({{"id", g.instance}, {"category", g.category}, {"label", g.label}});
  }
  write_jsonl(path, rows);
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

}  // namespace gml
