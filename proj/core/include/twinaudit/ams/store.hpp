#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace twinaudit::ams {

// Collection names used by the AMS.
namespace collection {
inline constexpr const char* kHosts = "hosts";
inline constexpr const char* kRelationships = "relationships";
inline constexpr const char* kProfiles = "profiles";
inline constexpr const char* kHostProfiles = "host_profiles";
inline constexpr const char* kRuns = "runs";
inline constexpr const char* kBoms = "boms";
inline constexpr const char* kEvidence = "evidence";
}  // namespace collection

// Non-relational document store keyed by (collection, key).
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  virtual void Put(const std::string& collection, const std::string& key,
                   const nlohmann::json& document) = 0;
  virtual std::optional<nlohmann::json> Get(const std::string& collection,
                                            const std::string& key) const = 0;
  virtual bool Erase(const std::string& collection, const std::string& key) = 0;
  // Sorted.
  virtual std::vector<std::string> Keys(const std::string& collection) const = 0;

  std::vector<std::pair<std::string, nlohmann::json>> Query(
      const std::string& collection,
      const std::function<bool(const nlohmann::json&)>& predicate = {}) const;
};

class MemoryDocumentStore : public DocumentStore {
 public:
  void Put(const std::string& collection, const std::string& key,
           const nlohmann::json& document) override;
  std::optional<nlohmann::json> Get(const std::string& collection,
                                    const std::string& key) const override;
  bool Erase(const std::string& collection, const std::string& key) override;
  std::vector<std::string> Keys(const std::string& collection) const override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::map<std::string, nlohmann::json>> data_;
};

// <root>/<collection>/<escaped key>.json, written via temp file + rename.
class FileDocumentStore : public DocumentStore {
 public:
  // Creates `root` if needed; throws IoError when it cannot.
  explicit FileDocumentStore(std::filesystem::path root);

  void Put(const std::string& collection, const std::string& key,
           const nlohmann::json& document) override;
  std::optional<nlohmann::json> Get(const std::string& collection,
                                    const std::string& key) const override;
  bool Erase(const std::string& collection, const std::string& key) override;
  std::vector<std::string> Keys(const std::string& collection) const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path PathFor(const std::string& collection, const std::string& key) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

// Reversible file-name encoding of arbitrary keys.
std::string EscapeKey(const std::string& key);
std::string UnescapeKey(const std::string& escaped);

}  // namespace twinaudit::ams
