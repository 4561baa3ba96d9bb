#pragma once

#include <filesystem>
#include <iosfwd>

#include "ibmi/matrix.hpp"

namespace ibmi::io {

// "IBMI1" binary layout: 8-byte magic "IBMI1\0\0\0", rows and cols as
// little-endian uint64, then rows*cols little-endian IEEE-754 doubles,
// row-major.
void write_binary(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_binary(std::istream& in);
void write_binary(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_binary(const std::filesystem::path& path);

// One matrix row per line, comma separated, shortest round-trip decimals.
void write_csv(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_csv(std::istream& in);
void write_csv(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_csv(const std::filesystem::path& path);

// Picks the format from the extension: ".csv" is text, anything else IBMI1.
DenseMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);

}  // namespace ibmi::io
