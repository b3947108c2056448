#include "twinaudit/bom/link.hpp"

namespace twinaudit::bom {

BomRegistry::BomRegistry(const std::vector<Bom>& boms) {
  for (const auto& b : boms) Add(b);
}

void BomRegistry::Add(Bom bom) {
  auto key = std::make_pair(bom.serial_number, bom.version);
  boms_.insert_or_assign(std::move(key), std::move(bom));
}

const Bom* BomRegistry::Find(const std::string& serial, std::uint64_t version) const {
  auto it = boms_.find({serial, version});
  return it == boms_.end() ? nullptr : &it->second;
}

std::vector<const Bom*> BomRegistry::All() const {
  std::vector<const Bom*> out;
  out.reserve(boms_.size());
  for (const auto& [key, bom] : boms_) out.push_back(&bom);
  return out;
}

ResolvedLink ResolveBomLink(const BomLink& link, const BomRegistry& registry) {
  const Bom* bom = registry.Find(link.target_serial, link.target_version);
  if (bom == nullptr) {
    throw NotFoundError("no BOM " + link.target_serial + " version " +
                        std::to_string(link.target_version));
  }
  if (!link.target_bom_ref) return *bom;
  if (const Component* c = bom->FindComponent(*link.target_bom_ref)) return *c;
  throw DanglingRefError("BOM " + link.target_serial + " has no component '" +
                         *link.target_bom_ref + "'");
}

}  // namespace twinaudit::bom
