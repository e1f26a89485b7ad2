#pragma once

// Batch stages behind the command-line tool. Each stage reads the previous
// stage's archive (or study manifests) and writes its own archive; outputs
// depend only on inputs and configuration, never on the job count.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sleeptda/archive.hpp"
#include "sleeptda/cohort/io.hpp"
#include "sleeptda/cohort/study.hpp"
#include "sleeptda/config.hpp"
#include "sleeptda/dsp/bands.hpp"
#include "sleeptda/dsp/butterworth.hpp"
#include "sleeptda/dsp/epochs.hpp"
#include "sleeptda/inference.hpp"
#include "sleeptda/landscape.hpp"
#include "sleeptda/persistence/rips.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::pipeline {

namespace fs = std::filesystem;

struct StudyMatrices {
  std::vector<dsp::BandDistanceMatrix> matrices;
  std::size_t epochs = 0;
  std::size_t dropped_nonfinite = 0;
  std::size_t skipped_awake = 0;
};

/// Filter, epoch and reduce one study to its band distance matrices (epoch
/// order, then band order). Epochs containing non-finite raw samples are
/// dropped; those samples are zeroed before filtering so they cannot leak
/// into neighbouring epochs through the filter state.
inline StudyMatrices preprocess_study(const cohort::StudyRecord& study, const PipelineConfig& config,
                                      unsigned jobs = 1) {
  StudyMatrices out;
  const auto raw_epochs =
      dsp::segment_epochs(study.signal, study.stage_annotations, config.epoch_seconds);
  std::vector<std::size_t> bad_slots;
  for (const auto& e : raw_epochs)
    if (!e.signal.all_finite()) bad_slots.push_back(e.index);

  MultichannelSignal clean = study.signal;
  if (study.signal.nonfinite_count() > 0) {
    auto channels = study.signal.channels();
    for (auto& ch : channels)
      for (double& v : ch)
        if (!std::isfinite(v)) v = 0.0;
    clean = MultichannelSignal(std::move(channels), study.signal.sample_rate(),
                               study.signal.channel_ids());
  }
  const MultichannelSignal filtered =
      config.notch_centers.empty() ? clean : dsp::bandstop_filter(clean, config.notch_spec());

  auto epochs = dsp::segment_epochs(filtered, study.stage_annotations, config.epoch_seconds);
  std::erase_if(epochs, [&](const Epoch& e) {
    const bool bad = std::find(bad_slots.begin(), bad_slots.end(), e.index) != bad_slots.end();
    out.dropped_nonfinite += bad;
    return bad;
  });
  if (!config.preprocess_awake)
    std::erase_if(epochs, [&](const Epoch& e) {
      const bool awake = e.stage == Stage::Awake;
      out.skipped_awake += awake;
      return awake;
    });
  out.epochs = epochs.size();

  const dsp::SmoothingKernel kernel = config.smoothing_kernel();
  std::vector<std::vector<dsp::BandDistanceMatrix>> per_epoch(epochs.size());
  parallel_for(epochs.size(), jobs, [&](std::size_t i) {
    per_epoch[i] = dsp::epoch_band_matrices(epochs[i], kernel, config.bands);
  });
  for (auto& v : per_epoch)
    for (auto& m : v) out.matrices.push_back(std::move(m));
  return out;
}

struct PreprocessSummary {
  std::size_t studies = 0;
  std::size_t epochs = 0;
  std::size_t matrices = 0;
  std::size_t dropped_nonfinite = 0;
  std::size_t skipped_awake = 0;
  std::map<std::pair<Stage, Band>, std::size_t> counts;
  std::map<Group, std::size_t> groups;
  std::vector<std::string> warnings;
};

namespace detail {

template <typename Fn>
auto with_study_context(const std::string& study_id, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "study '" + study_id + "': " + e.what());
  }
}

inline void append_study(archive::Writer& writer, PreprocessSummary& summary,
                         const cohort::StudyRecord& study, const PipelineConfig& config,
                         unsigned jobs) {
  const StudyMatrices result =
      with_study_context(study.study_id, [&] { return preprocess_study(study, config, jobs); });
  ++summary.studies;
  ++summary.groups[study.group];
  summary.epochs += result.epochs;
  summary.dropped_nonfinite += result.dropped_nonfinite;
  summary.skipped_awake += result.skipped_awake;
  if (result.dropped_nonfinite > 0)
    summary.warnings.push_back("study '" + study.study_id + "': dropped " +
                               std::to_string(result.dropped_nonfinite) +
                               " epoch(s) with non-finite samples");
  if (result.matrices.empty())
    summary.warnings.push_back("study '" + study.study_id + "' produced no distance matrices");
  for (const auto& m : result.matrices) {
    writer.add(archive::RecordKey{study.study_id, study.group, m.epoch_index, m.band, m.stage},
               archive::matrix_to_text(m.values));
    ++summary.counts[{m.stage, m.band}];
    ++summary.matrices;
  }
}

}  // namespace detail

/// Studies are grouped with the configured apnea patterns before processing.
inline PreprocessSummary preprocess_studies(std::span<const cohort::StudyRecord> studies,
                                            const PipelineConfig& config, const fs::path& out_dir,
                                            unsigned jobs = 1) {
  config.validate();
  archive::Writer writer(out_dir, archive::Kind::Matrices);
  PreprocessSummary summary;
  for (const auto& s : studies)
    detail::append_study(writer, summary, cohort::assign_group(s, config.apnea_patterns), config,
                         jobs);
  writer.finish();
  return summary;
}

/// Loads and processes one manifest at a time.
inline PreprocessSummary preprocess_manifests(std::span<const fs::path> manifests,
                                              const PipelineConfig& config,
                                              const fs::path& out_dir, unsigned jobs = 1) {
  config.validate();
  require(!manifests.empty(), ErrorKind::InvalidInput, "no study manifests given");
  archive::Writer writer(out_dir, archive::Kind::Matrices);
  PreprocessSummary summary;
  cohort::LoadOptions load;
  load.allow_nonfinite = config.allow_nonfinite;
  for (const auto& m : manifests) {
    auto study = cohort::assign_group(cohort::load_study(m, load), config.apnea_patterns);
    detail::append_study(writer, summary, study, config, jobs);
  }
  writer.finish();
  return summary;
}

namespace detail {

inline archive::Index read_index_of_kind(const fs::path& dir, archive::Kind kind) {
  auto index = archive::read_index(dir);
  require(index.kind == kind, ErrorKind::CorruptArchive,
          "'" + dir.string() + "' holds " + std::string(archive::to_string(index.kind)) +
              ", expected " + std::string(archive::to_string(kind)));
  return index;
}

/// Maps every record of `in` through fn and writes the results to `out` under the same keys.
template <typename Fn>
std::size_t transform_archive(const fs::path& in, archive::Kind in_kind, const fs::path& out,
                              archive::Kind out_kind, unsigned jobs, Fn&& fn) {
  const auto index = read_index_of_kind(in, in_kind);
  std::vector<std::string> payloads(index.records.size());
  parallel_for(index.records.size(), jobs, [&](std::size_t i) {
    const auto& key = index.records[i];
    payloads[i] = fn(archive::read_record(in, key), key);
  });
  archive::Writer writer(out, out_kind);
  for (std::size_t i = 0; i < payloads.size(); ++i) writer.add(index.records[i], payloads[i]);
  writer.finish();
  return writer.size();
}

}  // namespace detail

inline persistence::PersistenceDiagram diagram_for_matrix(const SquareMatrix& m, int homology_dim) {
  const persistence::FiniteMetric metric(m);
  const int max_dim =
      (homology_dim >= 1 || metric.size() <= persistence::kMaxRipsH1Points) ? 1 : 0;
  return persistence::rips_persistence(metric, max_dim);
}

inline std::size_t persist_archive(const fs::path& in, const fs::path& out,
                                   const PipelineConfig& config, unsigned jobs = 1) {
  return detail::transform_archive(
      in, archive::Kind::Matrices, out, archive::Kind::Diagrams, jobs,
      [&](const std::string& text, const archive::RecordKey& key) {
        const SquareMatrix m = archive::matrix_from_text(text, key.name());
        try {
          return persistence::to_text(diagram_for_matrix(m, config.homology_dim));
        } catch (const Error& e) {
          throw Error(e.kind(), "record '" + key.name() + "': " + e.what());
        }
      });
}

inline std::size_t landscape_archive(const fs::path& in, const fs::path& out,
                                     const PipelineConfig& config, unsigned jobs = 1) {
  config.validate();
  return detail::transform_archive(
      in, archive::Kind::Diagrams, out, archive::Kind::Landscapes, jobs,
      [&](const std::string& text, const archive::RecordKey& key) {
        std::istringstream is(text);
        try {
          const auto diagram = persistence::read_diagram(is);
          return landscape::to_text(landscape::landscape_from_diagram(
              diagram, config.homology_dim, config.grid(), config.levels,
              config.landscape_options()));
        } catch (const Error& e) {
          throw Error(e.kind(), "record '" + key.name() + "': " + e.what());
        }
      });
}

/// CSV "study_id,group" lines (optional header); group is Apnea or NoApnea.
inline std::map<std::string, Group> read_groups_file(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::MissingFile, "groups file '" + path.string() + "' not found");
  std::map<std::string, Group> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = split(t, ',');
    const Group g = (f.size() == 2 ? parse_group(trim(f[1])) : std::nullopt).value_or(Group::Unassigned);
    if (g == Group::Unassigned && lineno == 1) continue;
    require(g != Group::Unassigned, ErrorKind::MalformedRow,
            "'" + path.string() + "' row " + std::to_string(lineno) + ": expected study_id,group");
    out[trim(f[0])] = g;
  }
  return out;
}

/// Groups the landscapes of the archive by (band, stage). Per-study pooling
/// averages each study's epochs within a cell first; per-epoch pooling uses
/// every epoch as its own unit. Apnea studies form group 1.
inline inference::StratifiedInput collect_landscapes(
    const fs::path& in, const PipelineConfig& config,
    const std::map<std::string, Group>& group_override = {}) {
  const auto index = detail::read_index_of_kind(in, archive::Kind::Landscapes);
  // (band, stage) -> study -> (group, epoch landscapes), study order as in the index.
  std::map<inference::CellKey, std::vector<std::string>> study_order;
  std::map<inference::CellKey, std::map<std::string, std::pair<Group, std::vector<landscape::PersistenceLandscape>>>> cells;
  for (const auto& key : index.records) {
    Group group = key.group;
    if (auto it = group_override.find(key.study_id); it != group_override.end()) group = it->second;
    if (group == Group::Unassigned) continue;
    const inference::CellKey cell{key.band, key.stage};
    std::istringstream is(archive::read_record(in, key));
    auto l = landscape::read_landscape(is);
    auto& slot = cells[cell][key.study_id];
    if (slot.second.empty()) study_order[cell].push_back(key.study_id);
    slot.first = group;
    slot.second.push_back(std::move(l));
  }

  inference::StratifiedInput out;
  for (const auto& [cell, studies] : study_order) {
    auto& set = out[cell];
    for (const auto& id : studies) {
      const auto& [group, ls] = cells[cell][id];
      auto& target = group == Group::Apnea ? set.group1 : set.group2;
      if (config.pooling == Pooling::PerStudy) target.push_back(landscape::average_landscapes(ls));
      else target.insert(target.end(), ls.begin(), ls.end());
    }
  }
  return out;
}

inline inference::PValueTable test_archive(const fs::path& in, const PipelineConfig& config,
                                           unsigned jobs = 1,
                                           const std::map<std::string, Group>& group_override = {}) {
  config.validate();
  const auto input = collect_landscapes(in, config, group_override);
  bool testable = false;
  for (const auto& [cell, set] : input)
    testable |= cell.second != Stage::Awake && !set.group1.empty() && !set.group2.empty();
  require(testable, ErrorKind::InvalidInput,
          "both the Apnea and the NoApnea group need landscapes in at least one band/stage cell");
  inference::PermutationOptions options;
  options.statistic = config.statistic;
  options.jobs = jobs;
  return inference::stratified_test_matrix(input, config.permutations, config.seed, options);
}

}  // namespace sleeptda::pipeline
