#include "hdlab/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hdlab/error.hpp"

namespace hdlab {
namespace fs = std::filesystem;

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorKind::io, "table has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

const std::string& Table::at(std::size_t row, std::string_view name) const {
  return rows.at(row).at(column(name));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_bool(bool value) { return value ? "true" : "false"; }

namespace {

bool needs_quotes(const std::string& cell) {
  return cell.find_first_of(",\"\r\n") != std::string::npos;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ',';
    const auto& cell = cells[i];
    if (!needs_quotes(cell)) {
      out += cell;
      continue;
    }
    out += '"';
    for (char c : cell) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += "\r\n";
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& row : table.rows) append_row(out, row);
  return out;
}

Table parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t line = 1;

  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_record = [&] {
    end_cell();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (cell_started) fail(ErrorKind::io, "stray quote on line " + std::to_string(line));
        quoted = true;
        cell_started = true;
        break;
      case ',':
        end_cell();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) fail(ErrorKind::io, "unterminated quoted cell at end of table");
  if (cell_started || !record.empty()) end_record();

  Table table;
  if (records.empty()) fail(ErrorKind::io, "table is empty (no header row)");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      fail(ErrorKind::io, "row " + std::to_string(r) + " has " +
                              std::to_string(records[r].size()) + " cells, header has " +
                              std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const Error& e) {
    fail(ErrorKind::io, path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::io, "write failed for " + path.string());
}

fs::path sidecar_path(const fs::path& table_path) {
  fs::path out = table_path;
  if (out.extension() == ".csv") out.replace_extension();
  out += ".meta.json";
  return out;
}

namespace {

void add_table(Summary& summary, const fs::path& path) {
  const Table table = read_table(path);
  ++summary.tables;
  const std::size_t kind = table.column("kind");
  const std::size_t pass = table.column("pass");
  const auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - table.header.begin());
  };
  const auto margin = find("margin");
  const auto experiment = find("experiment");
  const auto row_id = find("row");
  const auto status = find("status");
  const auto message = find("message");

  for (const auto& row : table.rows) {
    auto& k = summary.kinds[row[kind]];
    ++k.rows;
    if (row[pass] == "true") {
      ++k.passed;
    } else if (row[pass] == "false") {
      ++k.failed;
      summary.failures.push_back({path.filename().string(), experiment ? row[*experiment] : "",
                                  row_id ? row[*row_id] : "", status ? row[*status] : "",
                                  message ? row[*message] : ""});
    } else {
      fail(ErrorKind::io, path.string() + ": pass cell '" + row[pass] + "' is not true/false");
    }
    if (margin && !row[*margin].empty()) {
      const double m = std::strtod(row[*margin].c_str(), nullptr);
      if (!k.worst_margin || m < *k.worst_margin) k.worst_margin = m;
    }
  }
}

}  // namespace

Summary summarize(const fs::path& path) {
  Summary summary;
  if (fs::is_directory(path)) {
    std::vector<fs::path> tables;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") tables.push_back(entry.path());
    }
    std::sort(tables.begin(), tables.end());
    for (const auto& t : tables) add_table(summary, t);
  } else {
    if (!fs::exists(path)) fail(ErrorKind::io, "no such table: " + path.string());
    add_table(summary, path);
  }
  return summary;
}

std::string render(const Summary& summary) {
  std::ostringstream out;
  out << "tables: " << summary.tables << "\n";
  for (const auto& [kind, k] : summary.kinds) {
    out << kind << ": rows=" << k.rows << " pass=" << k.passed << " fail=" << k.failed
        << " worst_margin=" << (k.worst_margin ? format_number(*k.worst_margin) : "-") << "\n";
  }
  for (const auto& f : summary.failures) {
    out << "FAILED " << f.table << " experiment=" << f.experiment << " row=" << f.row
        << " status=" << f.status;
    if (!f.message.empty()) out << " message=" << f.message;
    out << "\n";
  }
  out << (summary.all_passed() ? "all rows passed" : std::to_string(summary.failures.size()) +
                                                         " failing row(s)")
      << "\n";
  return out.str();
}

}  // namespace hdlab
