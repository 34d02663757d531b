#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "permorb/core.hpp"

namespace permorb {

// Matrix files are plain CSV: one matrix row per line, comma separated reals.
// Blank lines and lines whose first non-blank character is '#' are ignored.
// Every row must have the same number of fields.

Matrix parse_csv_matrix(std::string_view text, std::string_view source = "<string>");
Matrix read_csv_matrix(const std::filesystem::path& path);

/// Values are printed with 17 significant digits, so reading back is exact.
std::string format_csv_matrix(const Matrix& m);
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);

/// %.17g rendering of a double.
std::string format_double(double x);

/// Serializes JSON with every floating-point number at 17 significant digits.
/// Object keys keep nlohmann's (sorted) order, so output is deterministic.
std::string dump_json(const nlohmann::json& j, int indent = 2);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace permorb
