#pragma once

#include <cmath>
#include <string>

#include "sleeptda/error.hpp"
#include "sleeptda/matrix.hpp"

namespace sleeptda::persistence {

/// Symmetric non-negative dissimilarity with zero diagonal. The triangle
/// inequality is not required.
class FiniteMetric {
 public:
  explicit FiniteMetric(SquareMatrix d) : d_(std::move(d)) {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i < n; ++i) {
      require(d_(i, i) == 0.0, ErrorKind::InvalidInput,
              "distance matrix diagonal entry " + std::to_string(i) + " is not zero");
      for (std::size_t j = 0; j < n; ++j) {
        require(std::isfinite(d_(i, j)) && d_(i, j) >= 0.0, ErrorKind::InvalidInput,
                "distance matrix entries must be finite and non-negative");
        require(d_(i, j) == d_(j, i), ErrorKind::InvalidInput,
                "distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                    std::to_string(j) + ")");
      }
    }
  }

  std::size_t size() const noexcept { return d_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return d_(i, j); }
  const SquareMatrix& matrix() const noexcept { return d_; }

 private:
  SquareMatrix d_;
};

}  // namespace sleeptda::persistence
