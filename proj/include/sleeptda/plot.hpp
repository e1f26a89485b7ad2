#pragma once

// Standalone SVG renderings of a persistence diagram (birth vs death with the
// diagonal) and of a landscape (one polyline per level).

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>

#include "sleeptda/landscape.hpp"
#include "sleeptda/persistence/diagram.hpp"

namespace sleeptda::plot {

namespace detail {

constexpr double kWidth = 480.0, kHeight = 480.0, kMargin = 56.0;

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

inline void open_svg(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\" class=\"background\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
}

inline void axes(std::ostringstream& os, const Frame& f, const std::string& xlabel,
                 const std::string& ylabel) {
  os << "<line class=\"axis\" x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(f.y0))
     << "\" x2=\"" << num(f.px(f.x1)) << "\" y2=\"" << num(f.py(f.y0)) << "\" stroke=\"black\"/>\n";
  os << "<line class=\"axis\" x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(f.y0))
     << "\" x2=\"" << num(f.px(f.x0)) << "\" y2=\"" << num(f.py(f.y1)) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 16)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(kHeight / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
     << "transform=\"rotate(-90 16 " << num(kHeight / 2) << ")\">" << escape(ylabel) << "</text>\n";
  for (double v : {f.x0, f.x1})
    os << "<text x=\"" << num(f.px(v)) << "\" y=\"" << num(f.py(f.y0) + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << num(v) << "</text>\n";
  for (double v : {f.y0, f.y1})
    os << "<text x=\"" << num(f.px(f.x0) - 6) << "\" y=\"" << num(f.py(v) + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << num(v) << "</text>\n";
}

}  // namespace detail

/// Finite bars are drawn as circles (dimension 0 blue, dimension 1 orange);
/// essential classes are only counted in a caption.
inline std::string diagram_svg(const persistence::PersistenceDiagram& diagram,
                               const std::string& title) {
  double hi = 1.0;
  for (const auto& p : diagram.points) hi = std::max(hi, p.death);
  const detail::Frame f{0.0, hi, 0.0, hi};
  std::ostringstream os;
  detail::open_svg(os, title);
  detail::axes(os, f, "birth", "death");
  os << "<line class=\"diagonal\" x1=\"" << detail::num(f.px(0)) << "\" y1=\"" << detail::num(f.py(0))
     << "\" x2=\"" << detail::num(f.px(hi)) << "\" y2=\"" << detail::num(f.py(hi))
     << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& p : diagram.canonical().points)
    os << "<circle class=\"h" << p.dim << "\" cx=\"" << detail::num(f.px(p.birth)) << "\" cy=\""
       << detail::num(f.py(p.death)) << "\" r=\"4\" fill=\""
       << (p.dim == 0 ? "#1f77b4" : "#ff7f0e") << "\"/>\n";
  os << "<text x=\"" << detail::num(detail::kWidth - detail::kMargin) << "\" y=\"44\" "
     << "text-anchor=\"end\" font-size=\"11\">essential: H0=" << diagram.essential[0]
     << " H1=" << diagram.essential[1] << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

inline std::string landscape_svg(const landscape::PersistenceLandscape& l, const std::string& title) {
  double hi = 0.0;
  for (double v : l.values()) hi = std::max(hi, v);
  if (hi <= 0.0) hi = 1.0;
  const auto& g = l.grid();
  const double x1 = g.size > 1 ? g.end() : g.start + 1.0;
  const detail::Frame f{g.start, x1, 0.0, hi};
  std::ostringstream os;
  detail::open_svg(os, title);
  detail::axes(os, f, "t", "lambda_k(t)");
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  for (std::size_t k = 0; k < l.levels(); ++k) {
    os << "<polyline class=\"level" << (k + 1) << "\" fill=\"none\" stroke=\"" << kColors[k % 8]
       << "\" points=\"";
    for (std::size_t i = 0; i < g.size; ++i)
      os << (i ? " " : "") << detail::num(f.px(g.at(i))) << ',' << detail::num(f.py(l(k, i)));
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sleeptda::plot
