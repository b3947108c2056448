#include "twinaudit/evidence/snapshot.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace twinaudit::evidence {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kBlock = 512;

std::optional<std::string> Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

std::string Field(const char* p, std::size_t n) {
  std::size_t len = 0;
  while (len < n && p[len] != '\0') ++len;
  return std::string(p, len);
}

std::size_t Octal(const char* p, std::size_t n) {
  std::size_t v = 0;
  for (std::size_t i = 0; i < n && p[i] != '\0' && p[i] != ' '; ++i) {
    if (p[i] < '0' || p[i] > '7') throw ScanFailed("corrupt tar header: bad octal field");
    v = v * 8 + static_cast<std::size_t>(p[i] - '0');
  }
  return v;
}

std::string NormalizeMember(std::string name) {
  while (name.rfind("./", 0) == 0) name.erase(0, 2);
  while (!name.empty() && name.front() == '/') name.erase(0, 1);
  return name;
}

std::optional<std::string> PaxPath(const std::string& data) {
  // records: "<len> key=value\n"
  std::size_t pos = 0;
  std::optional<std::string> out;
  while (pos < data.size()) {
    const auto sp = data.find(' ', pos);
    if (sp == std::string::npos) break;
    const std::size_t len = std::stoul(data.substr(pos, sp - pos));
    if (len == 0 || pos + len > data.size()) break;
    const std::string rec = data.substr(sp + 1, pos + len - sp - 2);
    if (rec.rfind("path=", 0) == 0) out = rec.substr(5);
    pos += len;
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> ReadTarArchive(const std::string& bytes) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  std::optional<std::string> next_name;
  while (pos + kBlock <= bytes.size()) {
    const char* h = bytes.data() + pos;
    if (std::all_of(h, h + kBlock, [](char c) { return c == '\0'; })) break;
    std::size_t sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i) {
      sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(h[i]);
    }
    if (sum != Octal(h + 148, 8)) throw ScanFailed("corrupt tar header: checksum mismatch");
    std::string name = Field(h, 100);
    const std::string prefix = Field(h + 345, 155);
    if (std::memcmp(h + 257, "ustar", 5) == 0 && !prefix.empty()) name = prefix + "/" + name;
    const std::size_t size = Octal(h + 124, 12);
    const char type = h[156];
    pos += kBlock;
    if (pos + size > bytes.size()) throw ScanFailed("truncated tar archive");
    std::string data = bytes.substr(pos, size);
    pos += (size + kBlock - 1) / kBlock * kBlock;
    if (type == 'L') {
      next_name = Field(data.data(), data.size());
      continue;
    }
    if (type == 'x') {
      next_name = PaxPath(data);
      continue;
    }
    if (next_name) {
      name = *next_name;
      next_name.reset();
    }
    if (type == '0' || type == '\0') out[NormalizeMember(name)] = std::move(data);
  }
  return out;
}

namespace {

void AppendMember(std::string& out, const std::string& name, const std::string& data, char type) {
  char h[kBlock] = {};
  std::memcpy(h, name.data(), std::min<std::size_t>(name.size(), 100));
  std::snprintf(h + 100, 8, "%07o", 0644);
  std::snprintf(h + 108, 8, "%07o", 0);
  std::snprintf(h + 116, 8, "%07o", 0);
  std::snprintf(h + 124, 12, "%011zo", data.size());
  std::snprintf(h + 136, 12, "%011o", 0);
  h[156] = type;
  std::memcpy(h + 257, "ustar", 6);
  std::memcpy(h + 263, "00", 2);
  std::memset(h + 148, ' ', 8);
  unsigned sum = 0;
  for (unsigned char c : h) sum += c;
  std::snprintf(h + 148, 8, "%06o", sum);
  h[155] = ' ';
  out.append(h, kBlock);
  out += data;
  out.append((kBlock - data.size() % kBlock) % kBlock, '\0');
}

}  // namespace

std::string WriteTarArchive(const std::map<std::string, std::string>& files) {
  std::string out;
  for (const auto& [name, data] : files) {
    if (name.size() > 99) AppendMember(out, "././@LongLink", name + '\0', 'L');
    AppendMember(out, name, data, '0');
  }
  out.append(2 * kBlock, '\0');
  return out;
}

HostSnapshot HostSnapshot::Open(const fs::path& location, std::optional<std::string> host_id) {
  std::error_code ec;
  HostSnapshot s;
  json facts = json::object();
  if (fs::is_directory(location, ec)) {
    s.root_ = location;
    fs::recursive_directory_iterator it(location, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw ScanFailed("cannot read snapshot root " + location.string() + ": " + ec.message());
    for (const auto& entry : it) {
      if (!entry.is_regular_file(ec)) continue;
      std::string rel = fs::relative(entry.path(), location, ec).generic_string();
      if (ec || rel.empty()) continue;
      if (rel == kFactsFile) continue;
      s.files_.push_back(std::move(rel));
    }
    if (auto raw = Slurp(location / kFactsFile)) {
      facts = json::parse(*raw, nullptr, false);
      if (facts.is_discarded()) throw ScanFailed("malformed facts.json in " + location.string());
    }
  } else if (fs::is_regular_file(location, ec)) {
    auto raw = Slurp(location);
    if (!raw) throw ScanFailed("cannot read snapshot archive " + location.string());
    auto members = ReadTarArchive(*raw);
    if (auto f = members.find(kFactsFile); f != members.end()) {
      facts = json::parse(f->second, nullptr, false);
      if (facts.is_discarded()) throw ScanFailed("malformed facts.json in " + location.string());
      members.erase(f);
    }
    for (const auto& [name, data] : members) s.files_.push_back(name);
    s.blobs_ = std::make_shared<const std::map<std::string, std::string>>(std::move(members));
  } else {
    throw ScanFailed("snapshot root " + location.string() + " does not exist");
  }
  std::sort(s.files_.begin(), s.files_.end());
  if (!facts.is_object()) facts = json::object();
  s.facts_ = std::move(facts);
  if (host_id) {
    s.host_id_ = *host_id;
  } else if (s.facts_.contains("host_id") && s.facts_["host_id"].is_string()) {
    s.host_id_ = s.facts_["host_id"].get<std::string>();
  } else {
    s.host_id_ = location.stem().string();
  }
  if (s.host_id_.empty()) throw ScanFailed("snapshot has empty host id");
  return s;
}

HostSnapshot HostSnapshot::FromFiles(std::string host_id, std::map<std::string, std::string> files,
                                     json facts) {
  if (host_id.empty()) throw InvalidArgumentError("host id must not be empty");
  HostSnapshot s;
  s.host_id_ = std::move(host_id);
  s.facts_ = facts.is_object() ? std::move(facts) : json::object();
  for (const auto& [name, data] : files) s.files_.push_back(name);
  s.blobs_ = std::make_shared<const std::map<std::string, std::string>>(std::move(files));
  return s;
}

std::optional<std::string> HostSnapshot::fact(const std::string& key) const {
  if (!facts_.contains(key) || !facts_[key].is_string()) return std::nullopt;
  return facts_[key].get<std::string>();
}

bool HostSnapshot::Exists(const std::string& path) const {
  return std::binary_search(files_.begin(), files_.end(), path);
}

std::optional<std::string> HostSnapshot::Read(const std::string& path) const {
  if (blobs_) {
    auto it = blobs_->find(path);
    if (it == blobs_->end()) return std::nullopt;
    return it->second;
  }
  if (!root_ || !Exists(path)) return std::nullopt;
  return Slurp(*root_ / path);
}

}  // namespace twinaudit::evidence
