#include "ibmi/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ibmi {

UncoveredIndices::UncoveredIndices(std::vector<std::size_t> missing)
    : Error([&] {
        std::string msg = "partition leaves indices uncovered:";
        for (std::size_t i = 0; i < missing.size() && i < 16; ++i) msg += " " + std::to_string(missing[i]);
        if (missing.size() > 16) msg += " ...";
        return msg;
      }()),
      missing_(std::move(missing)) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw DimensionMismatch("matrix dimensions must be at least 1x1");
  data_.assign(rows * cols, fill);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionMismatch("matrix dimensions must be at least 1x1");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
  if (data.size() != rows * cols)
    throw DimensionMismatch("data length " + std::to_string(data.size()) + " != " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  DenseMatrix m(rows, cols);
  m.data_ = std::move(data);
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  constexpr std::size_t kB = 32;
  for (std::size_t i0 = 0; i0 < rows_; i0 += kB)
    for (std::size_t j0 = 0; j0 < cols_; j0 += kB)
      for (std::size_t i = i0; i < std::min(i0 + kB, rows_); ++i)
        for (std::size_t j = j0; j < std::min(j0 + kB, cols_); ++j) t(j, i) = (*this)(i, j);
  return t;
}

void DenseMatrix::symmetrize() {
  if (!is_square()) throw DimensionMismatch("symmetrize requires a square matrix");
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
}

DenseMatrix to_matrix(ConstMatrixView v) {
  DenseMatrix m(v.rows, v.cols);
  for (std::size_t i = 0; i < v.rows; ++i) std::copy_n(v.data + i * v.ld, v.cols, m.data() + i * v.cols);
  return m;
}

double frobenius_norm(ConstMatrixView a) {
  // Scaled accumulation so tiny residuals do not underflow.
  double scale = 0.0, ssq = 1.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) {
      const double x = std::abs(a(i, j));
      if (x == 0.0) continue;
      if (scale < x) {
        ssq = 1.0 + ssq * (scale / x) * (scale / x);
        scale = x;
      } else {
        ssq += (x / scale) * (x / scale);
      }
    }
  return scale * std::sqrt(ssq);
}

double max_abs(ConstMatrixView a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

namespace {
void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(op) + ": shapes differ");
}
}  // namespace

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator+");
  DenseMatrix c = a;
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] += b.data()[k];
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "operator-");
  DenseMatrix c = a;
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] -= b.data()[k];
  return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix c = a;
  for (std::size_t k = 0; k < c.size(); ++k) c.data()[k] *= s;
  return c;
}

bool is_symmetric(const DenseMatrix& a, double rel_tol) {
  if (!a.is_square()) return false;
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
  return true;
}

namespace {
void check_indices(std::span<const std::size_t> idx, std::size_t bound, const char* what) {
  for (std::size_t v : idx)
    if (v >= bound)
      throw IndexOutOfRange(std::string(what) + " index " + std::to_string(v) +
                            " out of range (extent " + std::to_string(bound) + ")");
}
}  // namespace

DenseMatrix gather(const DenseMatrix& a, std::span<const std::size_t> rows,
                   std::span<const std::size_t> cols) {
  check_indices(rows, a.rows(), "row");
  check_indices(cols, a.cols(), "column");
  if (rows.empty() || cols.empty()) throw DimensionMismatch("gather needs non-empty index lists");
  DenseMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = a.data() + rows[i] * a.cols();
    double* dst = out.data() + i * cols.size();
    for (std::size_t j = 0; j < cols.size(); ++j) dst[j] = src[cols[j]];
  }
  return out;
}

void scatter_add_assign(DenseMatrix& target, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols, const DenseMatrix& src,
                        ScatterMode mode) {
  if (src.rows() != rows.size() || src.cols() != cols.size())
    throw DimensionMismatch("scatter: source is " + std::to_string(src.rows()) + "x" +
                            std::to_string(src.cols()) + ", index lists are " +
                            std::to_string(rows.size()) + "x" + std::to_string(cols.size()));
  check_indices(rows, target.rows(), "row");
  check_indices(cols, target.cols(), "column");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double* dst = target.data() + rows[i] * target.cols();
    const double* s = src.data() + i * src.cols();
    if (mode == ScatterMode::Overwrite) {
      for (std::size_t j = 0; j < cols.size(); ++j) dst[cols[j]] = s[j];
    } else {
      for (std::size_t j = 0; j < cols.size(); ++j) dst[cols[j]] += s[j];
    }
  }
}

}  // namespace ibmi
