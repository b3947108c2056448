#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twinaudit/bom/model.hpp"
#include "twinaudit/errors.hpp"

namespace twinaudit::bom {

class DanglingRefError : public NotFoundError {
 public:
  explicit DanglingRefError(const std::string& message)
      : NotFoundError(message, "dangling_ref") {}
};

// Boms keyed by (serial_number, version). Several versions of one serial may
// coexist so that older links stay resolvable.
class BomRegistry {
 public:
  BomRegistry() = default;
  explicit BomRegistry(const std::vector<Bom>& boms);

  // Replaces any Bom with the same (serial, version).
  void Add(Bom bom);
  const Bom* Find(const std::string& serial, std::uint64_t version) const;
  std::size_t size() const { return boms_.size(); }
  std::vector<const Bom*> All() const;

 private:
  std::map<std::pair<std::string, std::uint64_t>, Bom> boms_;
};

using ResolvedLink = std::variant<Bom, Component>;

// Exact (serial, version) match. Throws NotFoundError when the Bom is absent
// and DanglingRefError when the fragment names no component.
ResolvedLink ResolveBomLink(const BomLink& link, const BomRegistry& registry);

}  // namespace twinaudit::bom
