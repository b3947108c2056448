#include "twinaudit/ams/store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "twinaudit/errors.hpp"
#include "twinaudit/ids.hpp"

namespace twinaudit::ams {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::pair<std::string, json>> DocumentStore::Query(
    const std::string& collection, const std::function<bool(const json&)>& predicate) const {
  std::vector<std::pair<std::string, json>> out;
  for (const auto& key : Keys(collection)) {
    auto doc = Get(collection, key);
    if (doc && (!predicate || predicate(*doc))) out.emplace_back(key, std::move(*doc));
  }
  return out;
}

void MemoryDocumentStore::Put(const std::string& collection, const std::string& key,
                              const json& document) {
  std::lock_guard lock(mu_);
  data_[collection][key] = document;
}

std::optional<json> MemoryDocumentStore::Get(const std::string& collection,
                                             const std::string& key) const {
  std::lock_guard lock(mu_);
  auto c = data_.find(collection);
  if (c == data_.end()) return std::nullopt;
  auto it = c->second.find(key);
  if (it == c->second.end()) return std::nullopt;
  return it->second;
}

bool MemoryDocumentStore::Erase(const std::string& collection, const std::string& key) {
  std::lock_guard lock(mu_);
  auto c = data_.find(collection);
  return c != data_.end() && c->second.erase(key) > 0;
}

std::vector<std::string> MemoryDocumentStore::Keys(const std::string& collection) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  auto c = data_.find(collection);
  if (c == data_.end()) return out;
  for (const auto& [k, v] : c->second) out.push_back(k);
  return out;
}

std::string EscapeKey(const std::string& key) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char ch : key) {
    if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '@' || (ch == '.' && !out.empty())) {
      out += static_cast<char>(ch);
    } else {
      out += '%';
      out += kHex[ch >> 4];
      out += kHex[ch & 0xf];
    }
  }
  return out;
}

std::string UnescapeKey(const std::string& escaped) {
  std::string out;
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] == '%' && i + 2 < escaped.size()) {
      out += static_cast<char>(std::stoi(escaped.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += escaped[i];
    }
  }
  return out;
}

FileDocumentStore::FileDocumentStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw IoError("cannot create document store at " + root_.string() + ": " + ec.message());
  }
}

fs::path FileDocumentStore::PathFor(const std::string& collection, const std::string& key) const {
  if (collection.empty() || EscapeKey(collection) != collection) {
    throw InvalidArgumentError("invalid collection name '" + collection + "'");
  }
  if (key.empty()) throw InvalidArgumentError("empty document key");
  return root_ / collection / (EscapeKey(key) + ".json");
}

void FileDocumentStore::Put(const std::string& collection, const std::string& key,
                            const json& document) {
  const fs::path path = PathFor(collection, key);
  std::lock_guard lock(mu_);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  const fs::path tmp = path.string() + ".tmp-" + RandomHex(4);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << document.dump();
    out.flush();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot replace " + path.string() + ": " + ec.message());
  }
}

std::optional<json> FileDocumentStore::Get(const std::string& collection,
                                           const std::string& key) const {
  const fs::path path = PathFor(collection, key);
  std::lock_guard lock(mu_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw IoError("corrupt document " + path.string() + ": " + e.what());
  }
}

bool FileDocumentStore::Erase(const std::string& collection, const std::string& key) {
  const fs::path path = PathFor(collection, key);
  std::lock_guard lock(mu_);
  std::error_code ec;
  return fs::remove(path, ec);
}

std::vector<std::string> FileDocumentStore::Keys(const std::string& collection) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  const fs::path dir = root_ / collection;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    constexpr std::string_view kExt = ".json";
    if (name.size() <= kExt.size() || name.compare(name.size() - kExt.size(), kExt.size(), kExt) != 0) {
      continue;
    }
    out.push_back(UnescapeKey(name.substr(0, name.size() - kExt.size())));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace twinaudit::ams
