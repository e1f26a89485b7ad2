#pragma once

// Pipeline configuration and its text format: one "key = value" per line,
// '#' starts a comment, list values are comma-separated. Every key is
// optional; missing keys keep their defaults.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sleeptda/cohort/study.hpp"
#include "sleeptda/dsp/bands.hpp"
#include "sleeptda/dsp/butterworth.hpp"
#include "sleeptda/dsp/spectral.hpp"
#include "sleeptda/error.hpp"
#include "sleeptda/landscape.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda {

enum class KernelType { ModifiedDaniell, Uniform };
enum class Pooling { PerStudy, PerEpoch };

struct PipelineConfig {
  KernelType kernel = KernelType::ModifiedDaniell;
  std::size_t kernel_half_width = 4;
  dsp::BandEdges bands{};
  double epoch_seconds = 30.0;

  std::vector<double> notch_centers{60.0, 120.0};
  double notch_half_width = 2.0;
  int filter_order = 3;
  bool zero_phase = false;

  bool preprocess_awake = true;
  bool allow_nonfinite = false;
  std::vector<std::string> apnea_patterns = cohort::default_apnea_patterns();

  double grid_start = 0.0;
  double grid_step = 1.0 / 255.0;
  std::size_t grid_size = 256;
  std::size_t levels = 6;
  landscape::EssentialMode essential = landscape::EssentialMode::Drop;

  int homology_dim = 0;
  std::size_t permutations = 1000;
  std::uint64_t seed = 1;
  Pooling pooling = Pooling::PerStudy;
  landscape::Statistic statistic = landscape::Statistic::Absolute;

  dsp::SmoothingKernel smoothing_kernel() const {
    return kernel == KernelType::Uniform ? dsp::SmoothingKernel::uniform(2 * kernel_half_width + 1)
                                         : dsp::SmoothingKernel::modified_daniell(kernel_half_width);
  }

  dsp::NotchSpec notch_spec() const {
    return dsp::NotchSpec{notch_centers, notch_half_width, filter_order, zero_phase};
  }

  landscape::Grid grid() const { return landscape::Grid(grid_start, grid_step, grid_size); }

  landscape::LandscapeOptions landscape_options() const {
    return landscape::LandscapeOptions{essential, grid().end()};
  }

  void validate() const {
    require(homology_dim == 0 || homology_dim == 1, ErrorKind::InvalidParameter,
            "homology_dim must be 0 or 1");
    require(levels >= 1 && permutations >= 1, ErrorKind::InvalidParameter,
            "levels and permutations must be >= 1");
    require(!apnea_patterns.empty(), ErrorKind::InvalidParameter, "apnea_patterns is empty");
    for (Band b : kAllBands)
      require(bands.lo(b) < bands.hi(b), ErrorKind::InvalidParameter,
              "band " + std::string(to_string(b)) + " has lo >= hi");
    (void)grid();
    (void)smoothing_kernel();
  }

  friend bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
    return a.kernel == b.kernel && a.kernel_half_width == b.kernel_half_width &&
           a.bands == b.bands && a.epoch_seconds == b.epoch_seconds &&
           a.notch_centers == b.notch_centers && a.notch_half_width == b.notch_half_width &&
           a.filter_order == b.filter_order && a.zero_phase == b.zero_phase &&
           a.preprocess_awake == b.preprocess_awake && a.allow_nonfinite == b.allow_nonfinite &&
           a.apnea_patterns == b.apnea_patterns && a.grid_start == b.grid_start &&
           a.grid_step == b.grid_step && a.grid_size == b.grid_size && a.levels == b.levels &&
           a.essential == b.essential && a.homology_dim == b.homology_dim &&
           a.permutations == b.permutations && a.seed == b.seed && a.pooling == b.pooling &&
           a.statistic == b.statistic;
  }
};

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

inline std::string band_key(Band b) { return "band." + to_lower(to_string(b)); }

}  // namespace detail

inline void write_config(std::ostream& os, const PipelineConfig& c) {
  os << "# sleeptda pipeline configuration\n";
  os << "kernel = " << (c.kernel == KernelType::Uniform ? "uniform" : "modified_daniell") << '\n';
  os << "kernel_half_width = " << c.kernel_half_width << '\n';
  for (Band b : kAllBands)
    os << detail::band_key(b) << " = " << format_double(c.bands.lo(b)) << ','
       << format_double(c.bands.hi(b)) << '\n';
  os << "epoch_seconds = " << format_double(c.epoch_seconds) << '\n';
  os << "notch_centers = " << detail::join_doubles(c.notch_centers) << '\n';
  os << "notch_half_width = " << format_double(c.notch_half_width) << '\n';
  os << "filter_order = " << c.filter_order << '\n';
  os << "zero_phase = " << (c.zero_phase ? "true" : "false") << '\n';
  os << "preprocess_awake = " << (c.preprocess_awake ? "true" : "false") << '\n';
  os << "allow_nonfinite = " << (c.allow_nonfinite ? "true" : "false") << '\n';
  os << "apnea_patterns = ";
  for (std::size_t i = 0; i < c.apnea_patterns.size(); ++i)
    os << (i ? "," : "") << c.apnea_patterns[i];
  os << '\n';
  os << "grid_start = " << format_double(c.grid_start) << '\n';
  os << "grid_step = " << format_double(c.grid_step) << '\n';
  os << "grid_size = " << c.grid_size << '\n';
  os << "levels = " << c.levels << '\n';
  os << "essential = " << (c.essential == landscape::EssentialMode::Cap ? "cap" : "drop") << '\n';
  os << "homology_dim = " << c.homology_dim << '\n';
  os << "permutations = " << c.permutations << '\n';
  os << "seed = " << c.seed << '\n';
  os << "pooling = " << (c.pooling == Pooling::PerEpoch ? "per-epoch" : "per-study") << '\n';
  os << "statistic = " << (c.statistic == landscape::Statistic::Signed ? "signed" : "absolute")
     << '\n';
}

inline PipelineConfig parse_config(std::istream& is) {
  PipelineConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string where = "config line " + std::to_string(lineno);
    require(eq != std::string::npos, ErrorKind::InvalidParameter, where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));

    auto bad = [&]() -> Error {
      return Error(ErrorKind::InvalidParameter, where + ": invalid value '" + value + "' for " + key);
    };
    auto as_double = [&] {
      const auto v = parse_double(value);
      if (!v) throw bad();
      return *v;
    };
    auto as_size = [&] {
      const auto v = parse_integer<std::size_t>(value);
      if (!v) throw bad();
      return *v;
    };
    auto as_bool = [&] {
      if (value == "true") return true;
      if (value == "false") return false;
      throw bad();
    };
    auto as_doubles = [&] {
      std::vector<double> out;
      if (value.empty()) return out;
      for (const auto& part : split(value, ',')) {
        const auto v = parse_double(part);
        if (!v) throw bad();
        out.push_back(*v);
      }
      return out;
    };

    if (key == "kernel") {
      if (value == "uniform") c.kernel = KernelType::Uniform;
      else if (value == "modified_daniell") c.kernel = KernelType::ModifiedDaniell;
      else throw bad();
    } else if (key == "kernel_half_width") {
      c.kernel_half_width = as_size();
    } else if (key.starts_with("band.")) {
      const auto band = parse_band(key.substr(5));
      const auto edges = as_doubles();
      if (!band || edges.size() != 2) throw bad();
      c.bands.edges[index_of(*band)] = {edges[0], edges[1]};
    } else if (key == "epoch_seconds") {
      c.epoch_seconds = as_double();
    } else if (key == "notch_centers") {
      c.notch_centers = as_doubles();
    } else if (key == "notch_half_width") {
      c.notch_half_width = as_double();
    } else if (key == "filter_order") {
      const auto v = parse_integer<int>(value);
      if (!v) throw bad();
      c.filter_order = *v;
    } else if (key == "zero_phase") {
      c.zero_phase = as_bool();
    } else if (key == "preprocess_awake") {
      c.preprocess_awake = as_bool();
    } else if (key == "allow_nonfinite") {
      c.allow_nonfinite = as_bool();
    } else if (key == "apnea_patterns") {
      c.apnea_patterns.clear();
      for (const auto& p : split(value, ','))
        if (!trim(p).empty()) c.apnea_patterns.push_back(trim(p));
    } else if (key == "grid_start") {
      c.grid_start = as_double();
    } else if (key == "grid_step") {
      c.grid_step = as_double();
    } else if (key == "grid_size") {
      c.grid_size = as_size();
    } else if (key == "levels") {
      c.levels = as_size();
    } else if (key == "essential") {
      if (value == "drop") c.essential = landscape::EssentialMode::Drop;
      else if (value == "cap") c.essential = landscape::EssentialMode::Cap;
      else throw bad();
    } else if (key == "homology_dim") {
      const auto v = parse_integer<int>(value);
      if (!v) throw bad();
      c.homology_dim = *v;
    } else if (key == "permutations") {
      c.permutations = as_size();
    } else if (key == "seed") {
      const auto v = parse_integer<std::uint64_t>(value);
      if (!v) throw bad();
      c.seed = *v;
    } else if (key == "pooling") {
      if (value == "per-study") c.pooling = Pooling::PerStudy;
      else if (value == "per-epoch") c.pooling = Pooling::PerEpoch;
      else throw bad();
    } else if (key == "statistic") {
      if (value == "absolute") c.statistic = landscape::Statistic::Absolute;
      else if (value == "signed") c.statistic = landscape::Statistic::Signed;
      else throw bad();
    } else {
      fail(ErrorKind::InvalidParameter, where + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline std::string to_text(const PipelineConfig& c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

inline PipelineConfig config_from_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace sleeptda
