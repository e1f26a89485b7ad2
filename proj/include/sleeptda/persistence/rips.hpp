#pragma once

// Vietoris-Rips persistence in dimensions 0 and 1 over F2.
//
// Simplices are ordered by (diameter, dimension, lexicographic vertex list).
// Dimension 0 is single-linkage merging with union-find; dimension 1 reduces
// the sparse boundary matrix of the triangles against the edge order.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/persistence/diagram.hpp"
#include "sleeptda/persistence/metric.hpp"

namespace sleeptda::persistence {

/// Largest point count accepted by rips_h1 (the triangle count grows as n^3).
inline constexpr std::size_t kMaxRipsH1Points = 32;

namespace detail {

struct Edge {
  double diameter;
  std::uint32_t u, v;  // u < v
};

inline std::vector<Edge> sorted_edges(const FiniteMetric& metric, double r_max) {
  std::vector<Edge> edges;
  const auto n = static_cast<std::uint32_t>(metric.size());
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (metric(u, v) <= r_max) edges.push_back({metric(u, v), u, v});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.diameter, a.u, a.v) < std::tie(b.diameter, b.u, b.v);
  });
  return edges;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
};

// Columns are ascending index lists; addition over F2 is symmetric difference.
inline void add_column(std::vector<std::uint32_t>& target, const std::vector<std::uint32_t>& source,
                       std::vector<std::uint32_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace detail

/// Dimension-0 persistence: one (0, w) bar per merge edge of single linkage,
/// plus one essential class per connected component of the complex at r_max.
inline PersistenceDiagram rips_h0(const FiniteMetric& metric,
                                  double r_max = std::numeric_limits<double>::infinity()) {
  PersistenceDiagram out;
  const std::size_t n = metric.size();
  detail::UnionFind uf(n);
  std::size_t components = n;
  for (const auto& e : detail::sorted_edges(metric, r_max)) {
    if (uf.unite(e.u, e.v)) {
      out.points.push_back({0.0, e.diameter, 0});
      --components;
    }
  }
  out.essential[0] = components;
  return out;
}

/// Dimension-1 persistence of the Rips filtration truncated at r_max, with
/// zero-length bars discarded. Loops still open at r_max are essential.
inline PersistenceDiagram rips_h1(const FiniteMetric& metric,
                                  double r_max = std::numeric_limits<double>::infinity()) {
  const std::size_t n = metric.size();
  require(n <= kMaxRipsH1Points, ErrorKind::Capacity,
          "rips_h1 supports at most " + std::to_string(kMaxRipsH1Points) + " points, got " +
              std::to_string(n));
  PersistenceDiagram out;
  if (n < 3) return out;

  const auto edges = detail::sorted_edges(metric, r_max);
  std::vector<std::uint32_t> edge_index(n * n, UINT32_MAX);
  for (std::uint32_t k = 0; k < edges.size(); ++k) {
    edge_index[edges[k].u * n + edges[k].v] = k;
    edge_index[edges[k].v * n + edges[k].u] = k;
  }

  struct Triangle {
    double diameter;
    std::uint32_t a, b, c;
  };
  std::vector<Triangle> triangles;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      for (std::uint32_t c = b + 1; c < n; ++c) {
        const double d = std::max({metric(a, b), metric(a, c), metric(b, c)});
        if (d <= r_max) triangles.push_back({d, a, b, c});
      }
  std::sort(triangles.begin(), triangles.end(), [](const Triangle& x, const Triangle& y) {
    return std::tie(x.diameter, x.a, x.b, x.c) < std::tie(y.diameter, y.a, y.b, y.c);
  });

  // Edges that merge components are negative in dimension 0 and never carry a loop.
  std::vector<bool> negative(edges.size(), false);
  detail::UnionFind uf(n);
  std::size_t merges = 0;
  for (std::uint32_t k = 0; k < edges.size(); ++k)
    if (uf.unite(edges[k].u, edges[k].v)) {
      negative[k] = true;
      ++merges;
    }

  std::vector<std::int64_t> pivot_owner(edges.size(), -1);
  std::vector<std::vector<std::uint32_t>> reduced;
  std::vector<std::uint32_t> column, scratch;
  std::size_t killed = 0;
  for (const auto& t : triangles) {
    column = {edge_index[t.a * n + t.b], edge_index[t.a * n + t.c], edge_index[t.b * n + t.c]};
    std::sort(column.begin(), column.end());
    while (!column.empty() && pivot_owner[column.back()] >= 0)
      detail::add_column(column, reduced[static_cast<std::size_t>(pivot_owner[column.back()])],
                         scratch);
    if (column.empty()) continue;
    const std::uint32_t pivot = column.back();
    pivot_owner[pivot] = static_cast<std::int64_t>(reduced.size());
    reduced.push_back(column);
    ++killed;
    const double birth = edges[pivot].diameter;
    if (t.diameter > birth) out.points.push_back({birth, t.diameter, 1});
  }
  out.essential[1] = edges.size() - merges - killed;
  return out;
}

/// Both dimensions up to max_dim (0 or 1).
inline PersistenceDiagram rips_persistence(const FiniteMetric& metric, int max_dim = 1,
                                           double r_max = std::numeric_limits<double>::infinity()) {
  require(max_dim == 0 || max_dim == 1, ErrorKind::InvalidParameter,
          "max homology dimension must be 0 or 1");
  PersistenceDiagram d = rips_h0(metric, r_max);
  if (max_dim >= 1) d.merge(rips_h1(metric, r_max));
  return d;
}

}  // namespace sleeptda::persistence
