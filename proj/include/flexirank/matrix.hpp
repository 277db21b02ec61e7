#pragma once

#include <algorithm>
#include <initializer_list>
#include <span>
#include <vector>

#include "flexirank/error.hpp"

namespace flexirank {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw InvalidArgument("ragged matrix rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Per-column min-max scaling to [0,1]; constant columns map to 0.
struct MinMaxScaler {
  std::vector<double> lo;
  std::vector<double> range;  // 0 for constant columns

  static MinMaxScaler fit(const Matrix& x) {
    MinMaxScaler s;
    s.lo.assign(x.cols(), 0.0);
    s.range.assign(x.cols(), 0.0);
    if (x.rows() == 0) return s;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double lo = x(0, j), hi = x(0, j);
      for (std::size_t i = 1; i < x.rows(); ++i) {
        lo = std::min(lo, x(i, j));
        hi = std::max(hi, x(i, j));
      }
      s.lo[j] = lo;
      s.range[j] = hi - lo;
    }
    return s;
  }

  Matrix transform(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = scale(j, x(i, j));
    return out;
  }

  double scale(std::size_t j, double v) const { return range[j] > 0.0 ? (v - lo[j]) / range[j] : 0.0; }
  double unscale(std::size_t j, double v) const { return lo[j] + v * range[j]; }
};

}  // namespace flexirank
