#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skillgraph::report {

enum class Format { csv, structured };
std::optional<Format> parse_format(std::string_view s);
std::string_view format_name(Format f);

// Fixed-point rendering, half away from zero. -0 collapses to 0.
std::string format_fixed(double value, int decimals);

inline constexpr std::string_view kUndefined = "undefined";

class Cell {
 public:
  enum class Kind { Null, Text, Integer, Number };

  static Cell null() { return Cell(); }
  static Cell text(std::string s);
  static Cell integer(std::int64_t v);
  static Cell number(double v, int decimals);
  static Cell number(std::optional<double> v, int decimals);

  Kind kind() const { return kind_; }
  // CSV rendering; Null becomes "undefined".
  std::string render() const;
  const std::string& text_value() const { return text_; }
  std::int64_t integer_value() const { return integer_; }

 private:
  Kind kind_ = Kind::Null;
  std::string text_;  // also holds the fixed rendering of Number cells
  std::int64_t integer_ = 0;
};

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

std::string to_csv(const Table& t);
// Array of objects, keys in column order, numbers as JSON numbers, Null as null.
std::string to_structured(const Table& t);

// Writes <dir>/<name>.csv or .json; returns the file name. Throws IoFailure.
std::string write_table(const Table& t, const std::filesystem::path& dir, Format format);
void write_text(const std::filesystem::path& path, std::string_view bytes);
std::string read_text(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

struct ManifestEntry {
  std::string path;
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct Manifest {
  std::vector<ManifestEntry> files;  // sorted by path
  std::string digest;                // sha256 over "path  sha256\n" lines
};

// Re-hashes `files` (relative to dir), merges them into any manifest already in
// dir, and writes manifest.json. No timestamps are recorded.
Manifest update_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files);
std::optional<Manifest> read_manifest(const std::filesystem::path& dir);
std::string manifest_json(const Manifest& m);

}  // namespace skillgraph::report
