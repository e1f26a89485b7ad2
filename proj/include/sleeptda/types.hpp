#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace sleeptda {

enum class Stage { Awake, NREM1, NREM2, NREM3, REM };
enum class Band { Delta, Theta, Alpha, Beta, Gamma };
enum class Group { Unassigned, Apnea, NoApnea };

inline constexpr std::array<Band, 5> kAllBands = {Band::Delta, Band::Theta, Band::Alpha,
                                                  Band::Beta, Band::Gamma};
// Stages that appear as columns of the p-value table.
inline constexpr std::array<Stage, 4> kSleepStages = {Stage::NREM1, Stage::NREM2, Stage::NREM3,
                                                      Stage::REM};

constexpr std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Awake: return "Awake";
    case Stage::NREM1: return "NREM1";
    case Stage::NREM2: return "NREM2";
    case Stage::NREM3: return "NREM3";
    case Stage::REM: return "REM";
  }
  return "?";
}

constexpr std::string_view to_string(Band b) {
  switch (b) {
    case Band::Delta: return "Delta";
    case Band::Theta: return "Theta";
    case Band::Alpha: return "Alpha";
    case Band::Beta: return "Beta";
    case Band::Gamma: return "Gamma";
  }
  return "?";
}

constexpr std::string_view to_string(Group g) {
  switch (g) {
    case Group::Unassigned: return "Unassigned";
    case Group::Apnea: return "Apnea";
    case Group::NoApnea: return "NoApnea";
  }
  return "?";
}

constexpr std::size_t index_of(Band b) { return static_cast<std::size_t>(b); }
constexpr std::size_t index_of(Stage s) { return static_cast<std::size_t>(s); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Accepts the usual scoring spellings: "N2", "NREM2", "Sleep stage N2", "W", "Wake", "R".
inline std::optional<Stage> parse_stage(std::string_view text) {
  std::string s = to_lower(text);
  std::erase_if(s, [](char c) { return c == ' ' || c == '_' || c == '-'; });
  if (s.starts_with("sleepstage")) s.erase(0, 10);
  if (s == "w" || s == "wake" || s == "awake") return Stage::Awake;
  if (s == "n1" || s == "nrem1") return Stage::NREM1;
  if (s == "n2" || s == "nrem2") return Stage::NREM2;
  if (s == "n3" || s == "nrem3") return Stage::NREM3;
  if (s == "r" || s == "rem") return Stage::REM;
  return std::nullopt;
}

inline std::optional<Band> parse_band(std::string_view text) {
  const std::string s = to_lower(text);
  for (Band b : kAllBands)
    if (to_lower(to_string(b)) == s) return b;
  return std::nullopt;
}

inline std::optional<Group> parse_group(std::string_view text) {
  const std::string s = to_lower(text);
  if (s == "apnea") return Group::Apnea;
  if (s == "noapnea" || s == "no apnea" || s == "control") return Group::NoApnea;
  if (s == "unassigned") return Group::Unassigned;
  return std::nullopt;
}

}  // namespace sleeptda
