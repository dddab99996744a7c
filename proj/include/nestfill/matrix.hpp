#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestfill {

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_)
        throw std::invalid_argument("ragged rows: row " + std::to_string(r) + " has " +
                                    std::to_string(rows[r].size()) + " entries, expected " +
                                    std::to_string(m.cols_));
      std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * m.cols_));
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<std::vector<T>> to_rows() const {
    std::vector<std::vector<T>> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
    return out;
  }

  /// Rows [begin, end).
  Matrix slice_rows(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows_) throw std::out_of_range("row range out of bounds");
    Matrix m(end - begin, cols_);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
              data_.begin() + static_cast<std::ptrdiff_t>(end * cols_), m.data_.begin());
    return m;
  }

  /// Columns [begin, end).
  Matrix slice_cols(std::size_t begin, std::size_t end) const {
    if (begin > end || end > cols_) throw std::out_of_range("column range out of bounds");
    Matrix m(rows_, end - begin);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = begin; c < end; ++c) m(r, c - begin) = (*this)(r, c);
    return m;
  }

  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Stack matrices with equal column counts top to bottom.
template <typename T>
Matrix<T> vstack(const std::vector<Matrix<T>>& parts) {
  std::size_t rows = 0;
  std::size_t cols = parts.empty() ? 0 : parts.front().cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("vstack: column counts differ");
    rows += p.rows();
  }
  Matrix<T> out(rows, cols);
  std::size_t at = 0;
  for (const auto& p : parts)
    for (std::size_t r = 0; r < p.rows(); ++r, ++at)
      for (std::size_t c = 0; c < cols; ++c) out(at, c) = p(r, c);
  return out;
}

using LevelMatrix = Matrix<std::uint32_t>;

}  // namespace nestfill
