#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twinaudit/errors.hpp"

namespace twinaudit::evidence {

class ScanFailed : public IoError {
 public:
  explicit ScanFailed(const std::string& message) : IoError(message, "scan_failed") {}
};

// Out-of-band facts shipped next to the file tree as facts.json.
inline constexpr const char* kFactsFile = "facts.json";

// Read-only view of an offline host image: either a directory tree or an
// uncompressed tar archive. Paths are relative and '/'-separated.
class HostSnapshot {
 public:
  // Directory or .tar, chosen by what `location` is. `host_id` overrides the
  // facts file, which in turn overrides the directory or archive stem.
  // Throws ScanFailed when the root cannot be read.
  static HostSnapshot Open(const std::filesystem::path& location,
                           std::optional<std::string> host_id = std::nullopt);
  static HostSnapshot FromFiles(std::string host_id, std::map<std::string, std::string> files,
                                nlohmann::json facts = nlohmann::json::object());

  const std::string& host_id() const { return host_id_; }
  const nlohmann::json& facts() const { return facts_; }
  // Fact value as a string, if present.
  std::optional<std::string> fact(const std::string& key) const;

  // Sorted; excludes facts.json.
  const std::vector<std::string>& files() const { return files_; }
  bool Exists(const std::string& path) const;
  // nullopt when the file is missing or cannot be read.
  std::optional<std::string> Read(const std::string& path) const;

 private:
  std::string host_id_;
  nlohmann::json facts_ = nlohmann::json::object();
  std::vector<std::string> files_;
  std::optional<std::filesystem::path> root_;             // directory-backed
  std::shared_ptr<const std::map<std::string, std::string>> blobs_;  // tar or in-memory
};

// Minimal ustar reader: regular files only; understands GNU long names and
// pax `path` records. Throws ScanFailed on a truncated or corrupt archive.
std::map<std::string, std::string> ReadTarArchive(const std::string& bytes);
// Plain ustar writer, used for fixtures.
std::string WriteTarArchive(const std::map<std::string, std::string>& files);

}  // namespace twinaudit::evidence
