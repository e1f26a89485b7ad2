#pragma once

#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/signal.hpp"
#include "sleeptda/types.hpp"

namespace sleeptda::cohort {

struct EventAnnotation {
  double onset_s = 0.0;
  double duration_s = 0.0;
  std::string label;

  friend bool operator==(const EventAnnotation&, const EventAnnotation&) = default;
};

struct StudyRecord {
  std::string study_id;
  MultichannelSignal signal;
  std::vector<StageAnnotation> stage_annotations;
  std::vector<EventAnnotation> event_annotations;
  Group group = Group::Unassigned;
};

/// Throws OutOfRange if any annotation extends past the end of the signal.
inline void validate_annotations(const StudyRecord& study) {
  const double end = study.signal.duration_s() + 1e-9;
  auto check = [&](double onset, double duration, std::size_t i, const char* what) {
    require(onset >= 0.0 && duration >= 0.0 && onset + duration <= end, ErrorKind::OutOfRange,
            std::string(what) + " annotation " + std::to_string(i) + " of study '" +
                study.study_id + "' lies outside the recording");
  };
  for (std::size_t i = 0; i < study.stage_annotations.size(); ++i)
    check(study.stage_annotations[i].onset_s, study.stage_annotations[i].duration_s, i, "stage");
  for (std::size_t i = 0; i < study.event_annotations.size(); ++i)
    check(study.event_annotations[i].onset_s, study.event_annotations[i].duration_s, i, "event");
}

/// Explicit event names; a bare "apnea" would also match "Hypopnea".
inline std::vector<std::string> default_apnea_patterns() {
  return {"obstructive apnea", "central apnea", "mixed apnea"};
}

inline bool matches_any(const std::string& label, const std::vector<std::string>& patterns) {
  const std::string lower = to_lower(label);
  for (const auto& p : patterns)
    if (lower.find(to_lower(p)) != std::string::npos) return true;
  return false;
}

/// A study is Apnea if any event annotation, anywhere in the recording,
/// contains any pattern (case-insensitive substring); otherwise NoApnea.
inline StudyRecord assign_group(StudyRecord study, const std::vector<std::string>& apnea_patterns) {
  require(!apnea_patterns.empty(), ErrorKind::InvalidParameter, "apnea pattern list is empty");
  study.group = Group::NoApnea;
  for (const auto& e : study.event_annotations)
    if (matches_any(e.label, apnea_patterns)) {
      study.group = Group::Apnea;
      break;
    }
  return study;
}

}  // namespace sleeptda::cohort
