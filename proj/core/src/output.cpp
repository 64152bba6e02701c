#include "abh/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "json.hpp"

namespace abh {
namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json manifest_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  if (m.seed) j["seed"] = *m.seed;
  j["version"] = m.version;
  for (const auto& [k, v] : m.extra) j[k] = v;
  return j;
}

}  // namespace

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + text + "' (expected csv or json)");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const KeyValueDoc& doc) {
  char buf[17];
  const auto h = fnv1a64(doc.canonical());
  auto [end, ec] = std::to_chars(buf, buf + 16, h, 16);
  std::string s(buf, end);
  return std::string(16 - s.size(), '0') + s;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  if (ec != std::errc()) throw NumericError("number formatting failed");
  return std::string(buf, end);
}

std::string render_csv(const Manifest& m, const Table& table) {
  std::string out;
  out += "# manifest: command=" + m.command + "\n";
  out += "# manifest: config_hash=" + m.config_hash + "\n";
  if (m.seed) out += "# manifest: seed=" + std::to_string(*m.seed) + "\n";
  out += "# manifest: version=" + m.version + "\n";
  for (const auto& [k, v] : m.extra) out += "# manifest: " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + csv_field(table.columns[i]);
  }
  out += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw NumericError("table row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(cell_text(row[i]));
    out += "\n";
  }
  return out;
}

std::string render_json(const Manifest& m, const Table& table) {
  nlohmann::ordered_json j;
  j["manifest"] = manifest_json(m);
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw NumericError("table row width mismatch");
    auto r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const auto* d = std::get_if<double>(&cell)) {
        if (std::isfinite(*d)) {
          r.push_back(*d);
        } else {
          r.push_back(format_number(*d));
        }
      } else if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        r.push_back(*i);
      } else {
        r.push_back(std::get<std::string>(cell));
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string render(const Manifest& manifest, const Table& table, OutputFormat format) {
  return format == OutputFormat::csv ? render_csv(manifest, table) : render_json(manifest, table);
}

std::string render_error(ErrorKind kind, std::string_view message) {
  const char* name = kind == ErrorKind::config ? "config" : kind == ErrorKind::numeric ? "numeric" : "regime";
  nlohmann::ordered_json j;
  j["error"] = {{"kind", name}, {"exit_code", static_cast<int>(kind)}, {"message", std::string(message)}};
  return j.dump() + "\n";
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

}  // namespace abh
