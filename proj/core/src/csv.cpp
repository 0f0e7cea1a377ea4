#include "metacorr/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace metacorr {

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool row_has_data = false;  // any field boundary or non-blank char seen
  int line = 1;
  int row_line = 1;
  size_t i = 0;

  // Comment detection runs at physical-line level, outside quoted fields, so
  // '#' headers may contain arbitrary characters including unbalanced quotes.
  auto at_line_start_skip_comment = [&]() {
    while (i < text.size()) {
      size_t j = i;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
      if (j >= text.size() || text[j] != '#') return;
      while (j < text.size() && text[j] != '\n') ++j;
      if (j < text.size()) ++j, ++line;
      i = j;
    }
  };

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    row.line = row_line;
    if (row.fields.size() > 1 || !row.fields[0].empty())
      rows.push_back(std::move(row));
    row = {};
    row_has_data = false;
  };

  at_line_start_skip_comment();
  row_line = line;
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_data = true;
        ++i;
        break;
      case ',':
        end_field();
        row_has_data = true;
        ++i;
        break;
      case '\r':
        ++i;
        break;
      case '\n':
        ++line;
        ++i;
        if (row_has_data || !field.empty()) end_row();
        field.clear();
        at_line_start_skip_comment();
        row_line = line;
        break;
      default:
        field += c;
        row_has_data = true;
        ++i;
    }
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  if (row_has_data || !field.empty()) end_row();
  return rows;
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

}  // namespace metacorr
