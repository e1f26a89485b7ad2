#pragma once

// Random instance generators shared by the unit and acceptance tests.

#include <cstddef>
#include <random>
#include <vector>

#include "sleeptda/matrix.hpp"
#include "sleeptda/persistence/diagram.hpp"
#include "sleeptda/persistence/metric.hpp"

namespace sleeptda::testing {

/// Symmetric dissimilarity on n points. With ties, entries are drawn from a
/// handful of values so equal filtration values are common.
inline persistence::FiniteMetric random_metric(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 4);
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = ties ? 0.25 * level(rng) : u(rng);
  return persistence::FiniteMetric(std::move(m));
}

/// Up to max_points finite bars with 0 <= birth <= death <= hi.
inline persistence::PersistenceDiagram random_diagram(std::mt19937_64& rng, std::size_t max_points,
                                                      double hi = 1.0, int dim = 0) {
  std::uniform_int_distribution<std::size_t> count(0, max_points);
  std::uniform_real_distribution<double> u(0.0, hi);
  persistence::PersistenceDiagram d;
  const std::size_t n = count(rng);
  for (std::size_t p = 0; p < n; ++p) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    d.points.push_back({dim == 0 ? 0.0 : a, b, dim});
  }
  return d;
}

}  // namespace sleeptda::testing
