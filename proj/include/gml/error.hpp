#pragma once

#include <stdexcept>
#include <string>

namespace gml {

// Bad input: malformed files, unknown references, invalid configuration.
// Carries the pipeline stage once one is known so the CLI can name it.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message) : std::runtime_error(message) {}
  InputError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// An internal contract was broken (e.g. re-labeling a committed variable).
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& message) : std::logic_error(message) {}
};

}  // namespace gml
