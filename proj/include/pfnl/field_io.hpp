#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pfnl/fields.hpp"

namespace pfnl {

enum class FieldFormat { Csv, Binary };

FieldFormat parse_field_format(std::string_view name);
std::string_view extension(FieldFormat format);

/// 17 significant digits, enough to round-trip a double.
std::string format_real(double x);

/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV: header "i,value" (d = 1) or "i,j,value" (d = 2), one row per cell.
/// Binary: little-endian float64, row-major, no header.
std::string encode_field(const Field& u, FieldFormat format);
void write_field(const std::filesystem::path& path, const Field& u, FieldFormat format);

/// Reads a field written by write_field. The grid supplies the shape; a size
/// or index mismatch is a ValidationError.
Field read_field(const std::filesystem::path& path, const Grid& grid, FieldFormat format);

}  // namespace pfnl
