#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctf/error.hpp"

namespace ctf {

/// Dense row-major matrix of doubles. Rows are state dimensions, columns are
/// time samples.
class ArrayF64 {
 public:
  ArrayF64() = default;

  ArrayF64(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  ArrayF64(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(Errc::ShapeMismatch, "data length " + std::to_string(data_.size()) +
                                           " != " + std::to_string(rows_) + "x" +
                                           std::to_string(cols_));
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void set_column(std::size_t c, std::span<const double> v) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
  }

  /// Columns [begin, end) as a new matrix.
  ArrayF64 columns(std::size_t begin, std::size_t end) const {
    ArrayF64 out(rows_, end - begin);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_ + begin),
                data_.begin() + static_cast<std::ptrdiff_t>(r * cols_ + end),
                out.data_.begin() + static_cast<std::ptrdiff_t>(r * out.cols_));
    }
    return out;
  }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  bool all_zero() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
  }

  friend bool operator==(const ArrayF64&, const ArrayF64&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Half-open column interval [begin, end).
struct ColumnRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  static ColumnRange all(const ArrayF64& a) { return {0, a.cols()}; }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline Shape shape_of(const ArrayF64& a) noexcept { return {a.rows(), a.cols()}; }

inline std::string to_string(Shape s) {
  return "(" + std::to_string(s.rows) + ", " + std::to_string(s.cols) + ")";
}

}  // namespace ctf
