#pragma once

// Two-group permutation test on persistence landscapes.
//
// The statistic is computed from group means of landscape vectors. Each
// replicate draws a uniformly random relabelling of the pooled landscapes
// with the original group sizes and counts how often its statistic reaches
// the observed one (ties count). p = S / B.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/landscape.hpp"
#include "sleeptda/types.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::inference {

using landscape::PersistenceLandscape;
using landscape::Statistic;

struct LabeledLandscapeSet {
  std::vector<PersistenceLandscape> group1;
  std::vector<PersistenceLandscape> group2;
};

struct PermutationOptions {
  Statistic statistic = Statistic::Absolute;
  unsigned jobs = 1;
};

struct PermutationTestResult {
  double observed_stat = 0.0;
  std::size_t permutations = 0;
  std::size_t significant = 0;
  double p_value = 1.0;
  /// (S + 1) / (B + 1), reported alongside the plain estimate.
  double p_value_corrected = 1.0;
  std::uint64_t seed = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  friend bool operator==(const PermutationTestResult&, const PermutationTestResult&) = default;
};

namespace detail {

/// Pooled landscapes in a label-independent order, so relabelling the input
/// groups does not change which partitions a seed produces.
class PooledSample {
 public:
  PooledSample(const LabeledLandscapeSet& data) {
    for (const auto& l : data.group1) rows_.push_back({&l.values(), true});
    for (const auto& l : data.group2) rows_.push_back({&l.values(), false});
    std::stable_sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
      return std::lexicographical_compare(a.values->begin(), a.values->end(), b.values->begin(),
                                          b.values->end());
    });
    n1_ = data.group1.size();
    width_ = data.group1.front().values().size();
    small_is_group1_ = n1_ <= size() - n1_;
  }

  std::size_t size() const { return rows_.size(); }
  std::size_t small_size() const { return small_is_group1_ ? n1_ : size() - n1_; }

  /// Canonical positions of the observed smaller group.
  std::vector<std::size_t> observed_small() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i].in_group1 == small_is_group1_) out.push_back(i);
    return out;
  }

  /// Statistic of group1 mean vs group2 mean when the positions in `small`
  /// (ascending) form the smaller group.
  double statistic(std::span<const std::size_t> small, Statistic stat, std::vector<double>& a,
                   std::vector<double>& b, std::vector<char>& mark) const {
    a.assign(width_, 0.0);
    b.assign(width_, 0.0);
    mark.assign(size(), 0);
    for (std::size_t i : small) mark[i] = 1;
    for (std::size_t i = 0; i < size(); ++i) {
      auto& acc = mark[i] ? a : b;
      const auto& v = *rows_[i].values;
      for (std::size_t x = 0; x < width_; ++x) acc[x] += v[x];
    }
    const double inv_small = 1.0 / static_cast<double>(small.size());
    const double inv_large = 1.0 / static_cast<double>(size() - small.size());
    for (double& v : a) v *= inv_small;
    for (double& v : b) v *= inv_large;
    return small_is_group1_ ? landscape::sup_difference(a, b, stat)
                            : landscape::sup_difference(b, a, stat);
  }

 private:
  struct Row {
    const std::vector<double>* values;
    bool in_group1;
  };
  std::vector<Row> rows_;
  std::size_t n1_ = 0;
  std::size_t width_ = 0;
  bool small_is_group1_ = true;
};

/// Fisher-Yates shuffle of 0..n-1 driven by the replicate's own stream;
/// the first k entries, sorted, are returned.
inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, std::uint64_t seed,
                                              std::uint64_t replicate) {
  std::mt19937_64 rng(derive_seed(seed, replicate));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

inline void validate(const LabeledLandscapeSet& data) {
  require(!data.group1.empty() && !data.group2.empty(), ErrorKind::InvalidInput,
          "permutation test needs at least one landscape in each group");
  const auto& ref = data.group1.front();
  for (const auto* g : {&data.group1, &data.group2})
    for (const auto& l : *g) landscape::require_compatible(ref, l);
}

/// Observed statistic only (no permutations).
inline double observed_statistic(const LabeledLandscapeSet& data,
                                 Statistic statistic = Statistic::Absolute) {
  validate(data);
  const detail::PooledSample pooled(data);
  std::vector<double> a, b;
  std::vector<char> mark;
  return pooled.statistic(pooled.observed_small(), statistic, a, b, mark);
}

inline PermutationTestResult permutation_test(const LabeledLandscapeSet& data,
                                              std::size_t permutations, std::uint64_t seed,
                                              const PermutationOptions& options = {}) {
  validate(data);
  require(permutations >= 1, ErrorKind::InvalidParameter, "permutation count must be >= 1");
  const detail::PooledSample pooled(data);

  PermutationTestResult result;
  result.permutations = permutations;
  result.seed = seed;
  result.n1 = data.group1.size();
  result.n2 = data.group2.size();
  {
    std::vector<double> a, b;
    std::vector<char> mark;
    result.observed_stat = pooled.statistic(pooled.observed_small(), options.statistic, a, b, mark);
  }

  const unsigned chunks = std::max(1u, options.jobs);
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, options.jobs, [&](std::size_t c) {
    std::vector<double> a, b;
    std::vector<char> mark;
    for (std::size_t r = c; r < permutations; r += chunks) {
      const auto subset = detail::random_subset(pooled.size(), pooled.small_size(), seed, r);
      if (pooled.statistic(subset, options.statistic, a, b, mark) >= result.observed_stat) ++hits[c];
    }
  });
  result.significant = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
  result.p_value = static_cast<double>(result.significant) / static_cast<double>(permutations);
  result.p_value_corrected =
      static_cast<double>(result.significant + 1) / static_cast<double>(permutations + 1);
  return result;
}

using CellKey = std::pair<Band, Stage>;
using StratifiedInput = std::map<CellKey, LabeledLandscapeSet>;

/// Results for every band x sleep-stage cell; cells without data in both
/// groups stay empty.
struct PValueTable {
  std::array<std::array<std::optional<PermutationTestResult>, kSleepStages.size()>,
             kAllBands.size()>
      cells;

  static std::optional<std::size_t> column_of(Stage s) {
    for (std::size_t c = 0; c < kSleepStages.size(); ++c)
      if (kSleepStages[c] == s) return c;
    return std::nullopt;
  }

  const std::optional<PermutationTestResult>& at(Band b, Stage s) const {
    return cells[index_of(b)][column_of(s).value()];
  }

  std::size_t present_count() const {
    std::size_t n = 0;
    for (const auto& row : cells)
      for (const auto& c : row) n += c.has_value();
    return n;
  }

  friend bool operator==(const PValueTable&, const PValueTable&) = default;
};

inline PValueTable stratified_test_matrix(const StratifiedInput& input, std::size_t permutations,
                                          std::uint64_t seed,
                                          const PermutationOptions& options = {}) {
  PValueTable table;
  for (const auto& [key, data] : input) {
    const auto column = PValueTable::column_of(key.second);
    if (!column || data.group1.empty() || data.group2.empty()) continue;
    const std::uint64_t cell_seed = derive_seed(seed, index_of(key.first) + 1, index_of(key.second) + 1);
    table.cells[index_of(key.first)][*column] =
        permutation_test(data, permutations, cell_seed, options);
  }
  return table;
}

inline std::string format_p(double p) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

/// Tab-separated, bands as rows and sleep stages as columns; absent cells are "NA".
inline void write_table(std::ostream& os, const PValueTable& table) {
  os << "band";
  for (Stage s : kSleepStages) os << '\t' << to_string(s);
  os << '\n';
  for (Band b : kAllBands) {
    os << to_string(b);
    for (Stage s : kSleepStages) {
      const auto& cell = table.at(b, s);
      os << '\t' << (cell ? format_p(cell->p_value) : "NA");
    }
    os << '\n';
  }
}

inline void write_details(std::ostream& os, const PValueTable& table) {
  os << "band\tstage\tn1\tn2\tobserved\tpermutations\tsignificant\tp_value\tp_value_corrected\tseed\n";
  for (Band b : kAllBands)
    for (Stage s : kSleepStages) {
      const auto& cell = table.at(b, s);
      if (!cell) continue;
      os << to_string(b) << '\t' << to_string(s) << '\t' << cell->n1 << '\t' << cell->n2 << '\t'
         << format_double(cell->observed_stat) << '\t' << cell->permutations << '\t'
         << cell->significant << '\t' << format_double(cell->p_value) << '\t'
         << format_double(cell->p_value_corrected) << '\t' << cell->seed << '\n';
    }
}

}  // namespace sleeptda::inference
