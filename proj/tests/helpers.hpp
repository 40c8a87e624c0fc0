#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gml/graph.hpp"

namespace gml::testing {

inline InstanceRecord train(std::string id, std::map<std::string, int> labels) {
  return {std::move(id), Split::Train, std::move(labels)};
}

inline InstanceRecord test(std::string id) { return {std::move(id), Split::Test, {}}; }

inline RelationRecord similar(std::string a, std::string b, std::string cat,
                              std::string group = "bert", double confidence = 1.0) {
  return {std::move(a), std::move(b), std::move(cat), Polarity::Similar, std::move(group), confidence};
}

inline RelationRecord opposite(std::string a, std::string b, std::string cat,
                               std::string group = "bert", double confidence = 1.0) {
  return {std::move(a), std::move(b), std::move(cat), Polarity::Opposite, std::move(group), confidence};
}

inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::path(GML_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace gml::testing
