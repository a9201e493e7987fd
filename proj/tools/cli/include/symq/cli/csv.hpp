#pragma once

// Tidy CSV with a leading `# key: value` metadata block.

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace symq::cli {

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;  // keys may repeat
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// First metadata value for key.
  std::optional<std::string> meta(const std::string& key) const;
  /// Every metadata value for key, in order.
  std::vector<std::string> meta_all(const std::string& key) const;
  /// Throws std::out_of_range for an unknown column.
  std::size_t column(const std::string& name) const;
};

/// Shortest decimal string that reads back to the same double.
std::string format_real(double v);

void write_csv(std::ostream& out, const CsvTable& table);

/// Throws std::runtime_error when the file cannot be written.
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

/// Throws std::invalid_argument on ragged rows or a missing header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace symq::cli
