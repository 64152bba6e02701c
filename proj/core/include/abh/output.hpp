#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "abh/error.hpp"
#include "abh/params.hpp"

namespace abh {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

enum class OutputFormat { csv, json };
OutputFormat parse_output_format(const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
/// Hash of the canonical rendering, as 16 lowercase hex digits.
std::string config_hash(const KeyValueDoc& doc);

struct Manifest {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::string version{kArtifactVersion};
  std::vector<std::pair<std::string, std::string>> extra;  // kept in insertion order
};

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest round-trip scientific notation, independent of the global locale.
std::string format_number(double value);

/// `# manifest: key=value` lines, a header row, then data rows.
std::string render_csv(const Manifest& manifest, const Table& table);
/// {"manifest": {...}, "columns": [...], "rows": [[...], ...]}; non-finite numbers as strings.
std::string render_json(const Manifest& manifest, const Table& table);
std::string render(const Manifest& manifest, const Table& table, OutputFormat format);

/// Machine-readable error record.
std::string render_error(ErrorKind kind, std::string_view message);

/// Writes a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace abh
