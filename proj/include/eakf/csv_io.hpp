#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "eakf/linalg.hpp"

namespace eakf::io {

using linalg::Matrix;

/// Matrix CSV: one matrix row per line, comma-separated, no header. Vectors
/// are single-column files. Values are written with 17 significant digits so
/// a write/read cycle is exact.
///
/// Parse errors throw eakf::Error with `source` and the 1-based row index in
/// the message.
Matrix parse_matrix_csv(std::istream& in, const std::string& source);
Matrix read_matrix_csv(const std::filesystem::path& path);

std::string format_matrix_csv(const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace eakf::io
