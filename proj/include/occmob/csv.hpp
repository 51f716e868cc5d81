#pragma once

#include <map>
#include <string>
#include <vector>

namespace occmob::csv {

// Minimal RFC-4180-ish table. Lines starting with '#' are skipped
// (provenance headers). Quoted fields may contain commas.
class Table {
 public:
  static Table read_file(const std::string& path);
  static Table parse(const std::string& text, const std::string& origin = "<string>");

  std::size_t rows() const { return cells_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  bool has_column(const std::string& name) const;
  // Cell (row, column-by-name); throws DataError on unknown column.
  const std::string& at(std::size_t row, const std::string& col) const;
  const std::vector<std::string>& row(std::size_t i) const { return cells_[i]; }

 private:
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> cells_;
  std::string origin_;
};

std::string escape_field(const std::string& s);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace occmob::csv
