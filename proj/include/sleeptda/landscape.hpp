#pragma once

// Persistence landscapes sampled on a shared uniform grid, with the vector
// operations the two-group test needs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/persistence/diagram.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::landscape {

using persistence::PersistenceDiagram;

/// t_i = start + i * step for i in [0, size).
struct Grid {
  double start = 0.0;
  double step = 1.0 / 255.0;
  std::size_t size = 256;

  Grid() = default;
  Grid(double start_, double step_, std::size_t size_) : start(start_), step(step_), size(size_) {
    require(size >= 1, ErrorKind::InvalidParameter, "landscape grid needs at least one sample");
    require(step > 0.0 && std::isfinite(step) && std::isfinite(start), ErrorKind::InvalidParameter,
            "landscape grid step must be positive and finite");
  }

  /// size samples evenly covering [lo, hi].
  static Grid spanning(double lo, double hi, std::size_t size) {
    require(size >= 2 && hi > lo, ErrorKind::InvalidParameter, "invalid grid span");
    return Grid(lo, (hi - lo) / static_cast<double>(size - 1), size);
  }

  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double end() const { return at(size - 1); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// How the essential (never-dying) classes of a diagram enter a landscape.
enum class EssentialMode { Drop, Cap };

struct LandscapeOptions {
  EssentialMode essential = EssentialMode::Drop;
  /// Death assigned to essential classes under EssentialMode::Cap.
  double cap = 1.0;
};

class PersistenceLandscape {
 public:
  PersistenceLandscape() = default;
  PersistenceLandscape(Grid grid, std::size_t levels)
      : grid_(grid), levels_(levels), values_(levels * grid.size, 0.0) {
    require(levels >= 1, ErrorKind::InvalidParameter, "landscape needs at least one level");
  }
  PersistenceLandscape(Grid grid, std::size_t levels, std::vector<double> values)
      : grid_(grid), levels_(levels), values_(std::move(values)) {
    require(levels >= 1, ErrorKind::InvalidParameter, "landscape needs at least one level");
    require(values_.size() == levels * grid.size, ErrorKind::InvalidInput,
            "landscape value count does not match levels x grid size");
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t levels() const noexcept { return levels_; }

  /// lambda_{k+1}(t_i) for zero-based level k.
  double operator()(std::size_t k, std::size_t i) const { return values_[k * grid_.size + i]; }
  double& operator()(std::size_t k, std::size_t i) { return values_[k * grid_.size + i]; }

  std::span<const double> level(std::size_t k) const {
    return std::span<const double>(values_).subspan(k * grid_.size, grid_.size);
  }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  bool compatible_with(const PersistenceLandscape& o) const {
    return grid_ == o.grid_ && levels_ == o.levels_;
  }

  friend bool operator==(const PersistenceLandscape&, const PersistenceLandscape&) = default;

 private:
  Grid grid_;
  std::size_t levels_ = 1;
  std::vector<double> values_ = std::vector<double>(grid_.size, 0.0);
};

/// Tent function of a single bar: max(0, min(t - b, d - t)).
inline double tent(double birth, double death, double t) {
  return std::max(0.0, std::min(t - birth, death - t));
}

/// lambda_k(t) is the k-th largest tent value over the diagram's bars of the
/// given dimension; levels past the number of bars stay zero.
inline PersistenceLandscape landscape_from_diagram(const PersistenceDiagram& diagram, int dim,
                                                   const Grid& grid, std::size_t levels,
                                                   const LandscapeOptions& options = {}) {
  std::vector<std::pair<double, double>> bars;
  for (const auto& p : diagram.points)
    if (p.dim == dim) bars.emplace_back(p.birth, p.death);
  if (options.essential == EssentialMode::Cap && dim >= 0 &&
      static_cast<std::size_t>(dim) < diagram.essential.size())
    for (std::size_t e = 0; e < diagram.essential[static_cast<std::size_t>(dim)]; ++e)
      bars.emplace_back(0.0, options.cap);

  PersistenceLandscape out(grid, levels);
  std::vector<double> heights(bars.size());
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double t = grid.at(i);
    for (std::size_t b = 0; b < bars.size(); ++b) heights[b] = tent(bars[b].first, bars[b].second, t);
    const std::size_t keep = std::min(levels, heights.size());
    std::partial_sort(heights.begin(), heights.begin() + static_cast<std::ptrdiff_t>(keep),
                      heights.end(), std::greater<>());
    for (std::size_t k = 0; k < keep; ++k) out(k, i) = heights[k];
  }
  return out;
}

inline void require_compatible(const PersistenceLandscape& a, const PersistenceLandscape& b) {
  require(a.compatible_with(b), ErrorKind::IncompatibleGrid,
          "landscapes do not share grid and level count");
}

inline PersistenceLandscape average_landscapes(std::span<const PersistenceLandscape> set) {
  require(!set.empty(), ErrorKind::InvalidInput, "cannot average an empty set of landscapes");
  PersistenceLandscape out(set.front().grid(), set.front().levels());
  for (const auto& l : set) {
    require_compatible(out, l);
    for (std::size_t v = 0; v < out.values().size(); ++v) out.values()[v] += l.values()[v];
  }
  const double inv = 1.0 / static_cast<double>(set.size());
  for (double& v : out.values()) v *= inv;
  return out;
}

/// Test statistic over a difference landscape: Absolute is the sup-norm of
/// a - b; Signed is the maximum of a - b.
enum class Statistic { Absolute, Signed };

inline double sup_difference(std::span<const double> a, std::span<const double> b,
                             Statistic statistic = Statistic::Absolute) {
  double best = statistic == Statistic::Absolute ? 0.0 : -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < a.size(); ++v) {
    const double d = a[v] - b[v];
    best = std::max(best, statistic == Statistic::Absolute ? std::abs(d) : d);
  }
  return best;
}

inline double sup_difference(const PersistenceLandscape& a, const PersistenceLandscape& b,
                             Statistic statistic = Statistic::Absolute) {
  require_compatible(a, b);
  return sup_difference(a.values(), b.values(), statistic);
}

/// Header line "landscape <start> <step> <G> <K>" then K rows of G values.
inline void write_landscape(std::ostream& os, const PersistenceLandscape& l) {
  os << "landscape " << format_double(l.grid().start) << ' ' << format_double(l.grid().step) << ' '
     << l.grid().size << ' ' << l.levels() << '\n';
  for (std::size_t k = 0; k < l.levels(); ++k) {
    for (std::size_t i = 0; i < l.grid().size; ++i) {
      if (i) os << ' ';
      os << format_double(l(k, i));
    }
    os << '\n';
  }
}

inline PersistenceLandscape read_landscape(std::istream& is) {
  std::string tag, s_start, s_step, s_size, s_levels;
  is >> tag >> s_start >> s_step >> s_size >> s_levels;
  const auto start = parse_double(s_start);
  const auto step = parse_double(s_step);
  const auto size = parse_integer<std::size_t>(s_size);
  const auto levels = parse_integer<std::size_t>(s_levels);
  require(tag == "landscape" && start && step && size && levels && *size >= 1 && *levels >= 1,
          ErrorKind::CorruptArchive, "malformed landscape header");
  const Grid grid(*start, *step, *size);
  std::vector<double> values;
  values.reserve(*size * *levels);
  std::string token;
  while (values.size() < *size * *levels && is >> token) {
    const auto v = parse_double(token);
    require(v.has_value(), ErrorKind::CorruptArchive, "malformed landscape value '" + token + "'");
    values.push_back(*v);
  }
  require(values.size() == *size * *levels && !(is >> token), ErrorKind::CorruptArchive,
          "landscape value count does not match its header");
  return PersistenceLandscape(grid, *levels, std::move(values));
}

inline std::string to_text(const PersistenceLandscape& l) {
  std::ostringstream os;
  write_landscape(os, l);
  return os.str();
}

}  // namespace sleeptda::landscape
