#pragma once

// On-disk archive shared by the pipeline stages:
//
//   <dir>/index.tsv          "# sleeptda archive v1 kind=<kind>", a header row
//                            and one row per record:
//                            record, study_id, group, epoch, band, stage
//   <dir>/records/<record>.txt
//
// Record names are "<study_id>.e<epoch, 4 digits>.<band>", so every record is
// addressable by (study_id, epoch, band); the stage and group travel in the
// index. Payloads are the text formats of the respective module.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/matrix.hpp"
#include "sleeptda/types.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::archive {

namespace fs = std::filesystem;

enum class Kind { Matrices, Diagrams, Landscapes };

constexpr std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::Matrices: return "matrices";
    case Kind::Diagrams: return "diagrams";
    case Kind::Landscapes: return "landscapes";
  }
  return "?";
}

struct RecordKey {
  std::string study_id;
  Group group = Group::Unassigned;
  std::size_t epoch_index = 0;
  Band band = Band::Delta;
  Stage stage = Stage::Awake;

  std::string name() const {
    char epoch[16];
    std::snprintf(epoch, sizeof epoch, "%04zu", epoch_index);
    return study_id + ".e" + epoch + "." + to_lower(sleeptda::to_string(band));
  }

  friend bool operator==(const RecordKey&, const RecordKey&) = default;
};

inline bool valid_study_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  return true;
}

struct Index {
  Kind kind = Kind::Matrices;
  std::vector<RecordKey> records;

  const RecordKey* find(const std::string& record_name) const {
    for (const auto& r : records)
      if (r.name() == record_name) return &r;
    return nullptr;
  }
};

inline fs::path record_path(const fs::path& dir, const RecordKey& key) {
  return dir / "records" / (key.name() + ".txt");
}

class Writer {
 public:
  Writer(fs::path dir, Kind kind) : dir_(std::move(dir)) {
    index_.kind = kind;
    std::error_code ec;
    fs::create_directories(dir_ / "records", ec);
    require(!ec, ErrorKind::Io, "cannot create archive '" + dir_.string() + "': " + ec.message());
  }

  void add(const RecordKey& key, const std::string& payload) {
    require(valid_study_id(key.study_id), ErrorKind::InvalidInput,
            "study id '" + key.study_id + "' must be non-empty [A-Za-z0-9_-]");
    require(names_.insert(key.name()).second, ErrorKind::InvalidInput,
            "duplicate archive record '" + key.name() + "'");
    std::ofstream out(record_path(dir_, key), std::ios::binary);
    out << payload;
    require(out.good(), ErrorKind::Io, "cannot write record '" + key.name() + "'");
    index_.records.push_back(key);
  }

  void finish() const {
    std::ofstream out(dir_ / "index.tsv", std::ios::binary);
    out << "# sleeptda archive v1 kind=" << to_string(index_.kind) << '\n';
    out << "record\tstudy_id\tgroup\tepoch\tband\tstage\n";
    for (const auto& r : index_.records)
      out << r.name() << '\t' << r.study_id << '\t' << sleeptda::to_string(r.group) << '\t'
          << r.epoch_index << '\t' << sleeptda::to_string(r.band) << '\t'
          << sleeptda::to_string(r.stage) << '\n';
    require(out.good(), ErrorKind::Io, "cannot write index of '" + dir_.string() + "'");
  }

  std::size_t size() const { return index_.records.size(); }

 private:
  fs::path dir_;
  Index index_;
  std::set<std::string> names_;
};

inline Index read_index(const fs::path& dir) {
  const fs::path path = dir / "index.tsv";
  std::ifstream in(path);
  require(in.good(), ErrorKind::MissingFile, "archive index '" + path.string() + "' not found");
  Index index;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::CorruptArchive,
          "'" + path.string() + "' is empty");
  const std::string prefix = "# sleeptda archive v1 kind=";
  require(line.starts_with(prefix), ErrorKind::CorruptArchive,
          "'" + path.string() + "' has no archive header");
  const std::string kind = trim(line.substr(prefix.size()));
  if (kind == "matrices") index.kind = Kind::Matrices;
  else if (kind == "diagrams") index.kind = Kind::Diagrams;
  else if (kind == "landscapes") index.kind = Kind::Landscapes;
  else fail(ErrorKind::CorruptArchive, "unknown archive kind '" + kind + "'");
  std::getline(in, line);  // column header
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), '\t');
    const std::string where = "'" + path.string() + "' line " + std::to_string(lineno);
    require(f.size() == 6, ErrorKind::CorruptArchive, where + ": expected 6 columns");
    const auto group = parse_group(f[2]);
    const auto epoch = parse_integer<std::size_t>(f[3]);
    const auto band = parse_band(f[4]);
    const auto stage = parse_stage(f[5]);
    require(group && epoch && band && stage, ErrorKind::CorruptArchive, where + ": bad key fields");
    RecordKey key{f[1], *group, *epoch, *band, *stage};
    require(key.name() == f[0], ErrorKind::CorruptArchive,
            where + ": record name '" + f[0] + "' does not match its key");
    index.records.push_back(std::move(key));
  }
  return index;
}

inline std::string read_record(const fs::path& dir, const RecordKey& key) {
  std::ifstream in(record_path(dir, key), std::ios::binary);
  require(in.good(), ErrorKind::CorruptArchive, "record '" + key.name() + "' is missing");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "matrix <n>" followed by n rows of n values.
inline std::string matrix_to_text(const SquareMatrix& m) {
  std::ostringstream os;
  os << "matrix " << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << format_double(m(i, j));
    os << '\n';
  }
  return os.str();
}

inline SquareMatrix matrix_from_text(const std::string& text, const std::string& record) {
  std::istringstream is(text);
  std::string tag, size_text;
  is >> tag >> size_text;
  const auto n = parse_integer<std::size_t>(size_text);
  require(tag == "matrix" && n.has_value(), ErrorKind::CorruptArchive,
          "record '" + record + "' has no matrix header");
  std::vector<double> values;
  std::string token;
  while (values.size() < *n * *n && is >> token) {
    const auto v = parse_double(token);
    require(v.has_value(), ErrorKind::CorruptArchive, "record '" + record + "' has a bad value");
    values.push_back(*v);
  }
  require(values.size() == *n * *n && !(is >> token), ErrorKind::CorruptArchive,
          "record '" + record + "' has the wrong number of values");
  return SquareMatrix(*n, std::move(values));
}

}  // namespace sleeptda::archive
