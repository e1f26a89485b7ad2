#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sleeptda {

enum class ErrorKind {
  InvalidParameter,
  InvalidInput,
  Alignment,
  EmptyBand,
  Capacity,
  IncompatibleGrid,
  MissingFile,
  LengthMismatch,
  MalformedRow,
  OutOfRange,
  NonFinite,
  InvalidManifest,
  CorruptArchive,
  Lookup,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::EmptyBand: return "empty-band";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::IncompatibleGrid: return "incompatible-grid";
    case ErrorKind::MissingFile: return "missing-file";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::MalformedRow: return "malformed-row";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::InvalidManifest: return "invalid-manifest";
    case ErrorKind::CorruptArchive: return "corrupt-archive";
    case ErrorKind::Lookup: return "lookup";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by the filesystem rather than by the data.
  bool is_io() const noexcept {
    return kind_ == ErrorKind::MissingFile || kind_ == ErrorKind::Io;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace sleeptda
