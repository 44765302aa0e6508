#include "skillgraph/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include "json.hpp"
#include <sstream>

#include "skillgraph/error.hpp"

namespace skillgraph::report {

using json = nlohmann::ordered_json;

std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "structured" || s == "json") return Format::structured;
  return std::nullopt;
}

std::string_view format_name(Format f) { return f == Format::csv ? "csv" : "structured"; }

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return std::string(kUndefined);
  const double scale = std::pow(10.0, decimals);
  const double scaled = std::fabs(value) * scale;
  // The relative nudge absorbs binary error such as 0.245 -> 24.499999...
  double r = std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, scaled));
  const bool negative = value < 0 && r != 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f", r);
  std::string digits = buf;
  if (decimals > 0) {
    if (digits.size() <= static_cast<std::size_t>(decimals))
      digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  }
  return negative ? "-" + digits : digits;
}

Cell Cell::text(std::string s) {
  Cell c;
  c.kind_ = Kind::Text;
  c.text_ = std::move(s);
  return c;
}

Cell Cell::integer(std::int64_t v) {
  Cell c;
  c.kind_ = Kind::Integer;
  c.integer_ = v;
  c.text_ = std::to_string(v);
  return c;
}

Cell Cell::number(double v, int decimals) {
  if (!std::isfinite(v)) return Cell();
  Cell c;
  c.kind_ = Kind::Number;
  c.text_ = format_fixed(v, decimals);
  return c;
}

Cell Cell::number(std::optional<double> v, int decimals) { return v ? number(*v, decimals) : Cell(); }

std::string Cell::render() const { return kind_ == Kind::Null ? std::string(kUndefined) : text_; }

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw Error(ErrorCode::Internal, name, "row width does not match header");
  rows.push_back(std::move(row));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json cell_json(const Cell& c) {
  switch (c.kind()) {
    case Cell::Kind::Null: return nullptr;
    case Cell::Kind::Text: return c.text_value();
    case Cell::Kind::Integer: return c.integer_value();
    case Cell::Kind::Number: return std::stod(c.text_value());
  }
  return nullptr;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i].render());
    out += '\n';
  }
  return out;
}

std::string to_structured(const Table& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, path.string(), "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, path.string(), "write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_table(const Table& t, const std::filesystem::path& dir, Format format) {
  const std::string file = t.name + (format == Format::csv ? ".csv" : ".json");
  write_text(dir / file, format == Format::csv ? to_csv(t) : to_structured(t));
  return file;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Internal, "sha256", "digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string manifest_json(const Manifest& m) {
  json j;
  j["files"] = json::array();
  for (const auto& f : m.files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["digest"] = m.digest;
  return j.dump(2) + "\n";
}

std::optional<Manifest> read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const auto j = json::parse(read_text(path));
    Manifest m;
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uint64_t>()});
    m.digest = j.at("digest").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, path.string(), std::string("unreadable manifest: ") + e.what());
  }
}

Manifest update_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files) {
  std::map<std::string, ManifestEntry> entries;
  if (auto old = read_manifest(dir))
    for (auto& f : old->files)
      if (std::filesystem::exists(dir / f.path)) entries[f.path] = f;
  for (const auto& f : files) {
    const auto bytes = read_text(dir / f);
    entries[f] = {f, sha256_hex(bytes), bytes.size()};
  }
  Manifest m;
  std::string lines;
  for (auto& [path, e] : entries) {
    lines += e.path + "  " + e.sha256 + "\n";
    m.files.push_back(e);
  }
  m.digest = sha256_hex(lines);
  write_text(dir / "manifest.json", manifest_json(m));
  return m;
}

}  // namespace skillgraph::report
