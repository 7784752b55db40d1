#include "ustatboot/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ustatboot {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

// locale-independent full-field parse
bool parse_number(const std::string& field, double& out) {
  const std::string t = trimmed(field);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source_name) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_data_row = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_fields(line);

    if (first_data_row) {
      bool all_numeric = true;
      double tmp;
      for (const auto& f : fields)
        if (!parse_number(f, tmp)) {
          all_numeric = false;
          break;
        }
      if (!all_numeric) {
        table.had_header = true;
        for (const auto& f : fields) table.header.push_back(trimmed(f));
        width = fields.size();
        first_data_row = false;
        continue;
      }
      width = fields.size();
      first_data_row = false;
    }

    if (fields.size() != width)
      throw std::invalid_argument(source_name + ": row " + std::to_string(line_no) +
                                  " has " + std::to_string(fields.size()) +
                                  " columns, expected " + std::to_string(width));
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      if (!parse_number(fields[c], row[c]))
        throw std::invalid_argument(source_name + ": row " + std::to_string(line_no) +
                                    ", column " + std::to_string(c + 1) + ": '" +
                                    trimmed(fields[c]) + "' is not a number");
    rows.push_back(std::move(row));
  }

  if (rows.empty())
    throw std::invalid_argument(source_name + ": no numeric rows found");

  table.values = Matrix(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) table.values(r, c) = rows[r][c];
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const Matrix& values,
               const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      out << (c ? "," : "") << header[c];
    out << '\n';
  }
  char buf[64];
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", values(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Matrix& values,
                    const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, values, header);
}

}  // namespace ustatboot
