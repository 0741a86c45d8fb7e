#include "pfnl/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pfnl/error.hpp"

namespace pfnl {

namespace fs = std::filesystem;

FieldFormat parse_field_format(std::string_view name) {
  if (name == "csv") return FieldFormat::Csv;
  if (name == "binary") return FieldFormat::Binary;
  throw ValidationError("fields: unknown output format '" + std::string(name) + "' (expected csv or binary)");
}

std::string_view extension(FieldFormat format) { return format == FieldFormat::Csv ? ".csv" : ".bin"; }

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io: cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("io: write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

}  // namespace

std::string encode_field(const Field& u, FieldFormat format) {
  const Grid& g = u.grid();
  if (format == FieldFormat::Binary) {
    std::string bytes(u.size() * 8, '\0');
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::uint64_t v = to_little_endian(std::bit_cast<std::uint64_t>(u[i]));
      std::memcpy(bytes.data() + 8 * i, &v, 8);
    }
    return bytes;
  }
  std::ostringstream out;
  out << (g.dimension() == 1 ? "i,value\n" : "i,j,value\n");
  for (int i = 0; i < g.cells(0); ++i) {
    for (int j = 0; j < g.cells(1); ++j) {
      out << i << ',';
      if (g.dimension() == 2) out << j << ',';
      out << format_real(u[i * g.stride(0) + j]) << '\n';
    }
  }
  return out.str();
}

void write_field(const fs::path& path, const Field& u, FieldFormat format) {
  write_text_atomic(path, encode_field(u, format));
}

Field read_field(const fs::path& path, const Grid& grid, FieldFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("io: cannot open field file " + path.string());
  Field out(grid);
  if (format == FieldFormat::Binary) {
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != grid.size() * 8) {
      throw ValidationError("io: " + path.string() + " holds " + std::to_string(bytes.size() / 8) +
                            " values, grid has " + std::to_string(grid.size()));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::uint64_t v = 0;
      std::memcpy(&v, bytes.data() + 8 * i, 8);
      out[i] = std::bit_cast<double>(to_little_endian(v));
    }
    return out;
  }
  std::string line;
  std::getline(in, line);  // header
  std::vector<bool> seen(grid.size(), false);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(row, cell, ',')) parts.push_back(cell);
    const std::size_t expected = grid.dimension() == 1 ? 2 : 3;
    if (parts.size() != expected) {
      throw ValidationError("io: " + path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(expected) + " columns");
    }
    try {
      const int i = std::stoi(parts[0]);
      const int j = grid.dimension() == 2 ? std::stoi(parts[1]) : 0;
      if (i < 0 || i >= grid.cells(0) || j < 0 || j >= grid.cells(1)) throw std::out_of_range("index");
      const std::size_t k = i * grid.stride(0) + j;
      out[k] = std::stod(parts.back());
      seen[k] = true;
    } catch (const std::logic_error&) {
      throw ValidationError("io: " + path.string() + ":" + std::to_string(line_no) + ": bad row '" + line + "'");
    }
  }
  for (bool s : seen) {
    if (!s) throw ValidationError("io: " + path.string() + " does not cover every grid cell");
  }
  return out;
}

}  // namespace pfnl
