#include "occmob/csv.hpp"

#include <fstream>
#include <sstream>

#include "occmob/error.hpp"

namespace occmob::csv {

namespace {

std::vector<std::string> split_line(const std::string& line, const std::string& origin,
                                    std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted)
    throw DataError(origin + ":" + std::to_string(lineno) + ": unterminated quote");
  out.push_back(std::move(field));
  return out;
}

}  // namespace

Table Table::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

Table Table::parse(const std::string& text, const std::string& origin) {
  Table t;
  t.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_line(line, origin, lineno);
    if (!have_header) {
      t.header_ = fields;
      for (std::size_t i = 0; i < fields.size(); ++i) t.index_[fields[i]] = i;
      have_header = true;
      continue;
    }
    if (fields.size() != t.header_.size())
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header_.size()) + " fields, got " +
                      std::to_string(fields.size()));
    t.cells_.push_back(std::move(fields));
  }
  if (!have_header) throw DataError(origin + ": missing header row");
  return t;
}

bool Table::has_column(const std::string& name) const { return index_.count(name) > 0; }

const std::string& Table::at(std::size_t row, const std::string& col) const {
  auto it = index_.find(col);
  if (it == index_.end()) throw DataError(origin_ + ": unknown column '" + col + "'");
  return cells_[row][it->second];
}

std::string escape_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += escape_field(fields[i]);
  }
  return out;
}

}  // namespace occmob::csv
