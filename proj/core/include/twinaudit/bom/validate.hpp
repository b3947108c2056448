#pragma once

#include <string>
#include <vector>

#include "twinaudit/bom/model.hpp"

namespace twinaudit::bom {

struct Violation {
  std::string path;
  std::string message;

  std::string ToString() const { return path.empty() ? message : path + ": " + message; }
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Total: returns every invariant violation, empty when the Bom is valid.
std::vector<Violation> ValidateBom(const Bom& bom);

std::vector<std::string> ToStrings(const std::vector<Violation>& violations);

}  // namespace twinaudit::bom
