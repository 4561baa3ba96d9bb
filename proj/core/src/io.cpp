#include "ibmi/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>

namespace ibmi::io {

namespace {

constexpr std::array<char, 8> kMagic = {'I', 'B', 'M', 'I', '1', '\0', '\0', '\0'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("IBMI1: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw IoError("could not format value");
  return std::string(buf, ptr);
}

}  // namespace

void write_binary(std::ostream& out, const DenseMatrix& m) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  } else {
    for (double v : m.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw IoError("IBMI1: write failed");
}

DenseMatrix read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw IoError("IBMI1: bad magic");
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (rows == 0 || cols == 0) throw IoError("IBMI1: zero dimension");
  if (rows > (std::uint64_t{1} << 32) || cols > (std::uint64_t{1} << 32))
    throw IoError("IBMI1: implausible dimensions");
  std::vector<double> data(rows * cols);
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double))))
      throw IoError("IBMI1: truncated payload");
  } else {
    for (double& v : data) v = std::bit_cast<double>(get_u64(in));
  }
  return DenseMatrix::from_data(rows, cols, std::move(data));
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
  std::string line;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("CSV: write failed");
}

DenseMatrix read_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t cols = 0, rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw IoError("CSV: bad number on line " + std::to_string(rows + 1));
      data.push_back(v);
      ++count;
      p = next;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') throw IoError("CSV: expected ',' on line " + std::to_string(rows + 1));
      ++p;
    }
    if (rows == 0) cols = count;
    else if (count != cols) throw IoError("CSV: ragged row " + std::to_string(rows + 1));
    ++rows;
  }
  if (rows == 0) throw IoError("CSV: no data");
  return DenseMatrix::from_data(rows, cols, std::move(data));
}

void write_binary(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_binary(out, m);
}

DenseMatrix read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_binary(in);
}

void write_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(out, m);
}

DenseMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? read_csv(path) : read_binary(path);
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  if (path.extension() == ".csv") write_csv(path, m);
  else write_binary(path, m);
}

}  // namespace ibmi::io
