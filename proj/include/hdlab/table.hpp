#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hdlab {

/// A result table: header plus string cells, written as RFC-4180 CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // io error when absent
  const std::string& at(std::size_t row, std::string_view name) const;
};

/// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double value);
std::string format_bool(bool value);

std::string to_csv(const Table& table);
/// Strict parser: ragged rows and unterminated quotes raise io.
Table parse_csv(std::string_view text);

Table read_table(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// `results.csv` -> `results.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& table_path);

struct KindSummary {
  std::uint64_t rows = 0;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::optional<double> worst_margin;
};

struct FailedRow {
  std::string table;
  std::string experiment;
  std::string row;
  std::string status;
  std::string message;
};

struct Summary {
  std::map<std::string, KindSummary> kinds;
  std::vector<FailedRow> failures;
  std::uint64_t tables = 0;

  bool all_passed() const noexcept { return failures.empty(); }
};

/// Summarizes one CSV file, or every .csv file in a directory (sorted by
/// name). Tables need `kind` and `pass` columns.
Summary summarize(const std::filesystem::path& path);
std::string render(const Summary& summary);

}  // namespace hdlab
