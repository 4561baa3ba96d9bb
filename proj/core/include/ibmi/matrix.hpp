#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "ibmi/errors.hpp"

namespace ibmi {

using IndexList = std::vector<std::size_t>;

// Non-owning views over a row-major block with leading dimension `ld`.
struct ConstMatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;

  const double& operator()(std::size_t i, std::size_t j) const { return data[i * ld + j]; }
  ConstMatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    return {data + r0 * ld + c0, nr, nc, ld};
  }
};

struct MatrixView {
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;

  double& operator()(std::size_t i, std::size_t j) const { return data[i * ld + j]; }
  MatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    return {data + r0 * ld + c0, nr, nc, ld};
  }
  operator ConstMatrixView() const { return {data, rows, cols, ld}; }
};

/// Dense row-major matrix of doubles. Always at least 1x1.
class DenseMatrix {
 public:
  DenseMatrix() : DenseMatrix(1, 1) {}
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);
  static DenseMatrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> values() const noexcept { return data_; }

  MatrixView view() { return {data_.data(), rows_, cols_, cols_}; }
  ConstMatrixView view() const { return {data_.data(), rows_, cols_, cols_}; }
  operator ConstMatrixView() const { return view(); }

  DenseMatrix transposed() const;
  // Replaces the matrix with (M + M^T) / 2.
  void symmetrize();

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

DenseMatrix to_matrix(ConstMatrixView v);

double frobenius_norm(ConstMatrixView a);
double max_abs(ConstMatrixView a);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
bool is_symmetric(const DenseMatrix& a, double rel_tol = 1e-12);

// out[i][j] = a[rows[i]][cols[j]]
DenseMatrix gather(const DenseMatrix& a, std::span<const std::size_t> rows,
                   std::span<const std::size_t> cols);

enum class ScatterMode { Overwrite, Add };

// target[rows[i]][cols[j]] := src[i][j] (or += with ScatterMode::Add).
void scatter_add_assign(DenseMatrix& target, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols, const DenseMatrix& src,
                        ScatterMode mode = ScatterMode::Overwrite);

}  // namespace ibmi
