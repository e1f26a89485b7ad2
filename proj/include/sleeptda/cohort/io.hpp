#pragma once

// Study manifest format (JSON):
//   {
//     "study_id": "s001",
//     "sample_rate_hz": 256,
//     "channels": [{"id": "C3", "path": "C3.f32", "format": "f32le"}, ...],
//     "annotations_path": "annotations.csv"
//   }
// Paths are relative to the manifest's directory. Channel formats are "f32le"
// (raw little-endian float32) or "csv" (one value per line, optional header).
// Annotations are CSV with header onset_s,duration_s,kind,label and kind in
// {stage, event}.

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sleeptda/cohort/study.hpp"
#include "sleeptda/error.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::cohort {

namespace fs = std::filesystem;

struct LoadOptions {
  /// Keep non-finite samples instead of rejecting the study; downstream
  /// epoching drops the affected epochs.
  bool allow_nonfinite = false;
};

namespace detail {

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::MissingFile, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline float float_from_le(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big)
    bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

inline void float_to_le(float f, char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  if constexpr (std::endian::native == std::endian::big)
    bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
  std::memcpy(p, &bits, 4);
}

inline std::vector<double> read_f32le(const fs::path& path) {
  const std::string bytes = read_file(path);
  require(bytes.size() % 4 == 0, ErrorKind::MalformedRow,
          "'" + path.string() + "' is not a whole number of float32 samples");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = float_from_le(bytes.data() + 4 * i);
  return out;
}

inline std::vector<double> read_csv_column(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string lower = to_lower(t);
    const auto v = lower == "nan" ? std::optional<double>(std::nan("")) : parse_double(t);
    if (!v) {
      if (lineno == 1) continue;  // header
      fail(ErrorKind::MalformedRow,
           "'" + path.string() + "' row " + std::to_string(lineno) + ": not a number");
    }
    out.push_back(*v);
  }
  return out;
}

struct ParsedAnnotations {
  std::vector<StageAnnotation> stages;
  std::vector<EventAnnotation> events;
  std::vector<std::size_t> stage_rows, event_rows;
};

inline ParsedAnnotations read_annotations(const fs::path& path) {
  std::istringstream in(read_file(path));
  ParsedAnnotations out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      require(to_lower(t) == "onset_s,duration_s,kind,label", ErrorKind::MalformedRow,
              "'" + path.string() + "' row 1: expected header onset_s,duration_s,kind,label");
      continue;
    }
    const std::string where = "'" + path.string() + "' row " + std::to_string(lineno);
    // The label is everything after the third comma, optionally quoted.
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int f = 0; f < 3; ++f) {
      const auto pos = t.find(',', start);
      require(pos != std::string::npos, ErrorKind::MalformedRow, where + ": expected 4 fields");
      fields.push_back(t.substr(start, pos - start));
      start = pos + 1;
    }
    std::string label = trim(t.substr(start));
    if (label.size() >= 2 && label.front() == '"' && label.back() == '"') {
      label = label.substr(1, label.size() - 2);
      for (auto p = label.find("\"\""); p != std::string::npos; p = label.find("\"\"", p + 1))
        label.erase(p, 1);
    }
    const auto onset = parse_double(fields[0]);
    const auto duration = parse_double(fields[1]);
    const std::string kind = to_lower(trim(fields[2]));
    require(onset && duration && std::isfinite(*onset) && std::isfinite(*duration) &&
                *onset >= 0.0 && *duration >= 0.0,
            ErrorKind::MalformedRow, where + ": bad onset/duration");
    if (kind == "stage") {
      const auto stage = parse_stage(label);
      require(stage.has_value(), ErrorKind::MalformedRow, where + ": unknown stage '" + label + "'");
      out.stages.push_back({*onset, *duration, *stage});
      out.stage_rows.push_back(lineno);
    } else if (kind == "event") {
      out.events.push_back({*onset, *duration, label});
      out.event_rows.push_back(lineno);
    } else {
      fail(ErrorKind::MalformedRow, where + ": kind must be 'stage' or 'event'");
    }
  }
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string safe_file_stem(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  return s.empty() ? std::string("channel") : s;
}

}  // namespace detail

inline StudyRecord load_study(const fs::path& manifest_path, const LoadOptions& options = {}) {
  require(fs::exists(manifest_path), ErrorKind::MissingFile,
          "manifest '" + manifest_path.string() + "' does not exist");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidManifest, "'" + manifest_path.string() + "': " + e.what());
  }
  const std::string where = "manifest '" + manifest_path.string() + "'";
  require(j.is_object() && j.contains("study_id") && j["study_id"].is_string() &&
              !j["study_id"].get<std::string>().empty(),
          ErrorKind::InvalidManifest, where + ": missing study_id");
  require(j.contains("sample_rate_hz") && j["sample_rate_hz"].is_number_integer() &&
              j["sample_rate_hz"].get<long long>() > 0,
          ErrorKind::InvalidManifest, where + ": sample_rate_hz must be a positive integer");
  require(j.contains("channels") && j["channels"].is_array() && !j["channels"].empty(),
          ErrorKind::InvalidManifest, where + ": channels must be a non-empty array");

  const fs::path base = manifest_path.parent_path();
  const std::string study_id = j["study_id"].get<std::string>();
  const auto sample_rate = static_cast<unsigned>(j["sample_rate_hz"].get<long long>());

  std::vector<std::vector<double>> channels;
  std::vector<std::string> ids;
  for (const auto& ch : j["channels"]) {
    require(ch.is_object() && ch.contains("id") && ch["id"].is_string() && ch.contains("path") &&
                ch["path"].is_string(),
            ErrorKind::InvalidManifest, where + ": each channel needs string id and path");
    const std::string id = ch["id"].get<std::string>();
    const std::string format = ch.value("format", std::string("f32le"));
    const fs::path path = base / ch["path"].get<std::string>();
    require(fs::exists(path), ErrorKind::MissingFile,
            "study '" + study_id + "' channel '" + id + "': file '" + path.string() + "' not found");
    std::vector<double> samples;
    if (format == "f32le") samples = detail::read_f32le(path);
    else if (format == "csv") samples = detail::read_csv_column(path);
    else fail(ErrorKind::InvalidManifest, where + ": channel '" + id + "' has unknown format '" + format + "'");
    if (!channels.empty())
      require(samples.size() == channels.front().size(), ErrorKind::LengthMismatch,
              "study '" + study_id + "' channel '" + id + "' has " + std::to_string(samples.size()) +
                  " samples, expected " + std::to_string(channels.front().size()));
    std::size_t bad = 0;
    for (double v : samples) bad += std::isfinite(v) ? 0 : 1;
    require(bad == 0 || options.allow_nonfinite, ErrorKind::NonFinite,
            "study '" + study_id + "' channel '" + id + "' has " + std::to_string(bad) +
                " non-finite samples");
    channels.push_back(std::move(samples));
    ids.push_back(id);
  }

  StudyRecord study{study_id, MultichannelSignal(std::move(channels), sample_rate, std::move(ids)),
                    {}, {}, Group::Unassigned};

  if (j.contains("annotations_path") && !j["annotations_path"].is_null()) {
    require(j["annotations_path"].is_string(), ErrorKind::InvalidManifest,
            where + ": annotations_path must be a string");
    const fs::path ann_path = base / j["annotations_path"].get<std::string>();
    require(fs::exists(ann_path), ErrorKind::MissingFile,
            "study '" + study_id + "': annotations '" + ann_path.string() + "' not found");
    auto parsed = detail::read_annotations(ann_path);
    const double end = study.signal.duration_s() + 1e-9;
    auto check = [&](double onset, double duration, std::size_t row) {
      require(onset + duration <= end, ErrorKind::OutOfRange,
              "'" + ann_path.string() + "' row " + std::to_string(row) +
                  ": annotation ends after the signal (" + format_double(study.signal.duration_s()) +
                  " s)");
    };
    for (std::size_t i = 0; i < parsed.stages.size(); ++i)
      check(parsed.stages[i].onset_s, parsed.stages[i].duration_s, parsed.stage_rows[i]);
    for (std::size_t i = 0; i < parsed.events.size(); ++i)
      check(parsed.events[i].onset_s, parsed.events[i].duration_s, parsed.event_rows[i]);
    study.stage_annotations = std::move(parsed.stages);
    study.event_annotations = std::move(parsed.events);
  }
  return study;
}

/// Writes manifest.json, one <channel>.f32 file per channel and
/// annotations.csv into dir. Returns the manifest path.
inline fs::path write_study(const StudyRecord& study, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());

  nlohmann::ordered_json j;
  j["study_id"] = study.study_id;
  j["sample_rate_hz"] = study.signal.sample_rate();
  j["channels"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < study.signal.channel_count(); ++c) {
    const std::string& id = study.signal.channel_ids()[c];
    const std::string file = std::to_string(c) + "_" + detail::safe_file_stem(id) + ".f32";
    std::string bytes(study.signal.sample_count() * 4, '\0');
    const auto ch = study.signal.channel(c);
    for (std::size_t i = 0; i < ch.size(); ++i)
      detail::float_to_le(static_cast<float>(ch[i]), bytes.data() + 4 * i);
    std::ofstream out(dir / file, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(out.good(), ErrorKind::Io, "cannot write '" + (dir / file).string() + "'");
    j["channels"].push_back({{"id", id}, {"path", file}, {"format", "f32le"}});
  }
  j["annotations_path"] = "annotations.csv";

  std::ofstream ann(dir / "annotations.csv");
  ann << "onset_s,duration_s,kind,label\n";
  for (const auto& s : study.stage_annotations)
    ann << format_double(s.onset_s) << ',' << format_double(s.duration_s) << ",stage,"
        << to_string(s.stage) << '\n';
  for (const auto& e : study.event_annotations)
    ann << format_double(e.onset_s) << ',' << format_double(e.duration_s) << ",event,"
        << detail::csv_field(e.label) << '\n';
  require(ann.good(), ErrorKind::Io, "cannot write annotations in '" + dir.string() + "'");

  const fs::path manifest = dir / "manifest.json";
  std::ofstream m(manifest);
  m << j.dump(2) << '\n';
  require(m.good(), ErrorKind::Io, "cannot write '" + manifest.string() + "'");
  return manifest;
}

}  // namespace sleeptda::cohort
