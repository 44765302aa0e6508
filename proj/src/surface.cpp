#include "skillgraph/surface.hpp"

#include <array>
#include <cctype>
#include <sstream>
#include <utility>
#include <vector>

namespace skillgraph::surface {

namespace {

constexpr std::array<std::string_view, 5> kVendors = {"acme", "globex", "initech", "umbrella", "contoso"};

constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kAbbreviations = {{
    {"management", "mgmt"},
    {"administration", "admin"},
    {"development", "dev"},
    {"operations", "ops"},
    {"analysis", "anlys"},
    {"coordination", "coord"},
    {"engineering", "eng"},
    {"reporting", "rptg"},
    {"planning", "plng"},
    {"customer", "cust"},
    {"inventory", "inv"},
    {"accounting", "acctg"},
    {"software", "sw"},
    {"quality", "qlty"},
}};

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::span<const std::string_view> vendor_prefixes() { return kVendors; }

std::optional<std::string_view> abbreviate_word(std::string_view word) {
  for (const auto& [full, shortform] : kAbbreviations)
    if (full == word) return shortform;
  return std::nullopt;
}

std::optional<std::string_view> expand_word(std::string_view word) {
  for (const auto& [full, shortform] : kAbbreviations)
    if (shortform == word) return full;
  return std::nullopt;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string to_title(std::string_view s) {
  std::string out(s);
  bool start = true;
  for (char& c : out) {
    if (c == ' ') {
      start = true;
    } else if (start) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      start = false;
    }
  }
  return out;
}

std::string abbreviate(std::string_view s) {
  std::string out;
  for (const auto& w : split_words(s)) {
    if (!out.empty()) out.push_back(' ');
    if (auto a = abbreviate_word(w)) {
      out.append(*a);
    } else {
      out.append(w);
    }
  }
  return out;
}

std::string canonical_key(std::string_view s) {
  std::string folded;
  folded.reserve(s.size());
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && !std::isalnum(u)) {
      folded.push_back(' ');
    } else {
      folded.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  std::string out;
  for (const auto& w : split_words(folded)) {
    bool vendor = false;
    for (auto v : kVendors) vendor = vendor || (w == v);
    if (vendor) continue;
    if (!out.empty()) out.push_back(' ');
    if (auto full = expand_word(w)) {
      out.append(*full);
    } else {
      out.append(w);
    }
  }
  return out;
}

}  // namespace skillgraph::surface
