#include "eakf/csv_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace eakf::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, const std::string& source, std::size_t row,
                   std::size_t col) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(source + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                ": cannot parse '" + std::string(field) + "' as a number");
  }
  return value;
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;

    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view field =
          view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(parse_field(field, source, line_no, values.size() + 1));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw Error(source + ": row " + std::to_string(line_no) + " has " +
                  std::to_string(values.size()) + " fields, expected " +
                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) {
    throw Error(source + ": no data rows");
  }

  Matrix out(static_cast<linalg::Index>(rows.size()), static_cast<linalg::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<linalg::Index>(i), static_cast<linalg::Index>(j)) = rows[i][j];
    }
  }
  if (!out.allFinite()) {
    throw Error(source + ": non-finite entry");
  }
  return out;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(path.string() + ": cannot open for reading");
  }
  return parse_matrix_csv(in, path.string());
}

std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  char buf[32];
  for (linalg::Index i = 0; i < m.rows(); ++i) {
    for (linalg::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(path.string() + ": cannot open for writing");
  }
  out << text;
  if (!out) {
    throw Error(path.string() + ": write failed");
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  write_text_file(path, format_matrix_csv(m));
}

}  // namespace eakf::io
