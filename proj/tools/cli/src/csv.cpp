#include "symq/cli/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symq::cli {

std::optional<std::string> CsvTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<std::string> CsvTable::meta_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : metadata) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no column '" + name + "'");
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_real failed");
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& [k, v] : table.metadata) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, table);
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) throw std::invalid_argument("metadata after the header row");
      const auto colon = line.find(": ");
      if (colon == std::string::npos) {
        t.metadata.emplace_back(line.substr(line.size() > 1 ? 2 : 1), "");
      } else {
        t.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      }
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (!header) {
      t.columns = std::move(cells);
      header = true;
    } else {
      if (cells.size() != t.columns.size()) {
        throw std::invalid_argument("row " + std::to_string(t.rows.size() + 1) + " has " +
                                    std::to_string(cells.size()) + " cells, expected " +
                                    std::to_string(t.columns.size()));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (!header) throw std::invalid_argument("CSV has no header row");
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  return read_csv(in);
}

}  // namespace symq::cli
