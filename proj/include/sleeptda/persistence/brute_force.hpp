#pragma once

// Textbook persistence by dense boundary-matrix reduction over F2. Slow and
// deliberately unoptimised; it serves as the reference the Rips routines are
// checked against.

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/persistence/diagram.hpp"
#include "sleeptda/persistence/metric.hpp"

namespace sleeptda::persistence {

inline constexpr std::size_t kMaxBruteForcePoints = 10;

inline PersistenceDiagram brute_force_persistence(const FiniteMetric& metric, int max_dim = 1) {
  const std::size_t n = metric.size();
  require(n <= kMaxBruteForcePoints, ErrorKind::Capacity,
          "brute_force_persistence supports at most " + std::to_string(kMaxBruteForcePoints) +
              " points, got " + std::to_string(n));
  require(max_dim == 0 || max_dim == 1, ErrorKind::InvalidParameter,
          "max homology dimension must be 0 or 1");

  struct Simplex {
    std::vector<std::size_t> vertices;
    double value;
    int dim() const { return static_cast<int>(vertices.size()) - 1; }
  };

  auto diameter = [&](const std::vector<std::size_t>& vs) {
    double d = 0.0;
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b) d = std::max(d, metric(vs[a], vs[b]));
    return d;
  };

  // All simplices up to dimension max_dim + 1.
  std::vector<Simplex> simplices;
  for (std::size_t a = 0; a < n; ++a) {
    simplices.push_back({{a}, 0.0});
    for (std::size_t b = a + 1; b < n; ++b) {
      simplices.push_back({{a, b}, diameter({a, b})});
      if (max_dim < 1) continue;
      for (std::size_t c = b + 1; c < n; ++c) simplices.push_back({{a, b, c}, diameter({a, b, c})});
    }
  }
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& x, const Simplex& y) {
    return std::make_tuple(x.value, x.dim(), x.vertices) <
           std::make_tuple(y.value, y.dim(), y.vertices);
  });

  const std::size_t m = simplices.size();
  auto position = [&](const std::vector<std::size_t>& vs) -> std::size_t {
    for (std::size_t i = 0; i < m; ++i)
      if (simplices[i].vertices == vs) return i;
    fail(ErrorKind::InvalidInput, "face missing from filtration");
  };

  std::vector<std::vector<char>> boundary(m, std::vector<char>(m, 0));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& vs = simplices[j].vertices;
    if (vs.size() < 2) continue;
    for (std::size_t drop = 0; drop < vs.size(); ++drop) {
      std::vector<std::size_t> face;
      for (std::size_t k = 0; k < vs.size(); ++k)
        if (k != drop) face.push_back(vs[k]);
      boundary[position(face)][j] = 1;
    }
  }

  auto low = [&](std::size_t j) -> long {
    for (std::size_t i = m; i-- > 0;)
      if (boundary[i][j]) return static_cast<long>(i);
    return -1;
  };

  std::vector<long> lows(m, -1);
  for (std::size_t j = 0; j < m; ++j) {
    bool changed = true;
    while (changed) {
      changed = false;
      const long l = low(j);
      if (l < 0) break;
      for (std::size_t k = 0; k < j; ++k) {
        if (lows[k] == l) {
          for (std::size_t i = 0; i < m; ++i) boundary[i][j] ^= boundary[i][k];
          changed = true;
          break;
        }
      }
    }
    lows[j] = low(j);
  }

  PersistenceDiagram out;
  std::vector<bool> is_low(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    if (lows[j] < 0) continue;
    const auto i = static_cast<std::size_t>(lows[j]);
    is_low[i] = true;
    const int dim = simplices[i].dim();
    if (dim > max_dim) continue;
    const double birth = simplices[i].value;
    const double death = simplices[j].value;
    if (dim >= 1 && death == birth) continue;
    out.points.push_back({birth, death, dim});
  }
  for (std::size_t j = 0; j < m; ++j) {
    const int dim = simplices[j].dim();
    if (dim <= max_dim && lows[j] < 0 && !is_low[j]) ++out.essential[static_cast<std::size_t>(dim)];
  }
  return out;
}

}  // namespace sleeptda::persistence
