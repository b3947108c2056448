#include "twinaudit/vuln/version.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>
#include <vector>

namespace twinaudit::vuln {

namespace {

struct Segment {
  bool has_number = true;
  std::string number = "0";  // no leading zeros
  bool suffix_empty = true;
  std::string suffix;

  auto key() const { return std::tie(has_number, number, suffix_empty, suffix); }
};

bool IsSeparator(char c) { return c == '.' || c == '-' || c == '_' || c == '+'; }

std::vector<Segment> Split(std::string_view text) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = i;
    while (j < text.size() && !IsSeparator(text[j])) ++j;
    std::string_view part = text.substr(i, j - i);
    Segment seg;
    std::size_t k = 0;
    while (k < part.size() && std::isdigit(static_cast<unsigned char>(part[k]))) ++k;
    seg.has_number = k > 0;
    if (seg.has_number) {
      std::string_view digits = part.substr(0, k);
      const auto nz = digits.find_first_not_of('0');
      seg.number = nz == std::string_view::npos ? "0" : std::string(digits.substr(nz));
    } else {
      seg.number = "";
    }
    for (char c : part.substr(k)) {
      seg.suffix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    seg.suffix_empty = seg.suffix.empty();
    out.push_back(std::move(seg));
    if (j == text.size()) break;
    i = j + 1;
  }
  return out;
}

int CompareNumbers(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

int Compare(const Segment& a, const Segment& b) {
  if (a.has_number != b.has_number) return a.has_number ? 1 : -1;
  if (int c = CompareNumbers(a.number, b.number); c != 0) return c;
  if (a.suffix_empty != b.suffix_empty) return a.suffix_empty ? 1 : -1;
  if (a.suffix != b.suffix) return a.suffix < b.suffix ? -1 : 1;
  return 0;
}

}  // namespace

int CompareVersions(std::string_view a, std::string_view b) {
  const auto sa = Split(a);
  const auto sb = Split(b);
  const Segment zero;
  const std::size_t n = std::max(sa.size(), sb.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Segment& x = i < sa.size() ? sa[i] : zero;
    const Segment& y = i < sb.size() ? sb[i] : zero;
    if (int c = Compare(x, y); c != 0) return c;
  }
  return 0;
}

bool VersionRange::Contains(std::string_view version) const {
  if (lower) {
    const int c = CompareVersions(version, lower->version);
    if (c < 0 || (c == 0 && !lower->inclusive)) return false;
  }
  if (upper) {
    const int c = CompareVersions(version, upper->version);
    if (c > 0 || (c == 0 && !upper->inclusive)) return false;
  }
  return true;
}

bool VersionRange::WellFormed() const {
  if (lower && lower->version.empty()) return false;
  if (upper && upper->version.empty()) return false;
  if (!lower || !upper) return true;
  const int c = CompareVersions(lower->version, upper->version);
  if (c > 0) return false;
  if (c == 0) return lower->inclusive && upper->inclusive;
  return true;
}

std::string VersionRange::ToString() const {
  std::string out;
  out += lower ? (lower->inclusive ? "[" : "(") + lower->version : "(*";
  out += ", ";
  out += upper ? upper->version + (upper->inclusive ? "]" : ")") : "*)";
  return out;
}

std::string NormalizePackageName(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '_') {
      out.push_back('-');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace twinaudit::vuln
