#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sleeptda/error.hpp"

namespace sleeptda {

/// Dense row-major n x n matrix of reals.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  SquareMatrix(std::size_t n, std::vector<double> row_major) : n_(n), data_(std::move(row_major)) {
    require(data_.size() == n * n, ErrorKind::InvalidInput, "matrix data size is not n*n");
  }

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  bool has_zero_diagonal() const {
    for (std::size_t i = 0; i < n_; ++i)
      if ((*this)(i, i) != 0.0) return false;
    return true;
  }

  double max_entry() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, v);
    return m;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace sleeptda
