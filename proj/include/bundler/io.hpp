#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace bundler {

// Shortest representation that round-trips to the same double. Non-finite
// values print as nan / inf / -inf.
std::string format_double(double v);

class CsvTable {
 public:
  using Cell = std::variant<double, std::string>;

  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace bundler
