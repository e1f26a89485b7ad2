#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::persistence {

inline constexpr int kMaxDim = 1;

struct PersistencePair {
  double birth = 0.0;
  double death = 0.0;
  int dim = 0;

  double persistence() const { return death - birth; }
  friend std::partial_ordering operator<=>(const PersistencePair& a, const PersistencePair& b) {
    if (auto c = a.dim <=> b.dim; c != 0) return c;
    if (auto c = a.birth <=> b.birth; c != 0) return c;
    return a.death <=> b.death;
  }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

/// Finite (birth, death) pairs plus the number of classes that never die,
/// for homology dimensions 0 and 1.
struct PersistenceDiagram {
  std::vector<PersistencePair> points;
  std::array<std::size_t, kMaxDim + 1> essential{0, 0};

  std::vector<PersistencePair> pairs(int dim) const {
    std::vector<PersistencePair> out;
    for (const auto& p : points)
      if (p.dim == dim) out.push_back(p);
    return out;
  }

  std::size_t finite_count(int dim) const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [dim](const auto& p) { return p.dim == dim; }));
  }

  void merge(const PersistenceDiagram& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    for (std::size_t d = 0; d < essential.size(); ++d) essential[d] += other.essential[d];
  }

  /// Sorted copy; two diagrams are equal as multisets iff their canonical forms compare equal.
  PersistenceDiagram canonical() const {
    PersistenceDiagram c = *this;
    std::sort(c.points.begin(), c.points.end());
    return c;
  }

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

inline bool multiset_equal(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  return a.canonical() == b.canonical();
}

/// Line-oriented text: '#' comments, then one "dim birth death" record per
/// bar in canonical order; essential classes use death "inf" and birth 0.
inline void write_diagram(std::ostream& os, const PersistenceDiagram& diagram) {
  os << "# persistence diagram v1: dim birth death\n";
  const PersistenceDiagram c = diagram.canonical();
  for (const auto& p : c.points)
    os << p.dim << ' ' << format_double(p.birth) << ' ' << format_double(p.death) << '\n';
  for (std::size_t d = 0; d < c.essential.size(); ++d)
    for (std::size_t k = 0; k < c.essential[d]; ++k) os << d << " 0 inf\n";
}

inline PersistenceDiagram read_diagram(std::istream& is) {
  PersistenceDiagram diagram;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields(t);
    std::string sd, sb, se, extra;
    fields >> sd >> sb >> se;
    const auto dim = parse_integer<int>(sd);
    const auto birth = parse_double(sb);
    const auto death = parse_double(se);
    require(dim && birth && death && !(fields >> extra) && *dim >= 0 && *dim <= kMaxDim,
            ErrorKind::CorruptArchive, "malformed diagram record at line " + std::to_string(lineno));
    if (std::isinf(*death)) {
      ++diagram.essential[static_cast<std::size_t>(*dim)];
    } else {
      require(*death >= *birth, ErrorKind::CorruptArchive,
              "death before birth at line " + std::to_string(lineno));
      diagram.points.push_back({*birth, *death, *dim});
    }
  }
  return diagram;
}

inline std::string to_text(const PersistenceDiagram& d) {
  std::ostringstream os;
  write_diagram(os, d);
  return os.str();
}

}  // namespace sleeptda::persistence
