#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/signal.hpp"

namespace sleeptda::dsp {

namespace detail {

inline bool as_slot_count(double seconds, double epoch_seconds, std::size_t& out) {
  const double q = seconds / epoch_seconds;
  const double r = std::round(q);
  if (r < 0.0 || std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return false;
  out = static_cast<std::size_t>(r);
  return true;
}

}  // namespace detail

inline std::size_t samples_per_epoch(unsigned sample_rate, double epoch_seconds) {
  require(epoch_seconds > 0.0, ErrorKind::InvalidParameter, "epoch length must be positive");
  const double exact = epoch_seconds * sample_rate;
  const double n = std::round(exact);
  require(n >= 1.0 && std::abs(exact - n) < 1e-9, ErrorKind::InvalidParameter,
          "epoch length does not span a whole number of samples");
  return static_cast<std::size_t>(n);
}

/// Cuts the signal into fixed-length epochs, one per annotated slot that lies
/// completely inside the recording. Annotation onsets and durations must be
/// whole multiples of the epoch length; a trailing partial slot is discarded.
inline std::vector<Epoch> segment_epochs(const MultichannelSignal& signal,
                                         std::span<const StageAnnotation> annotations,
                                         double epoch_seconds = 30.0) {
  const std::size_t spe = samples_per_epoch(signal.sample_rate(), epoch_seconds);
  std::map<std::size_t, Stage> slots;
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    const auto& ann = annotations[a];
    std::size_t first = 0, count = 0;
    require(detail::as_slot_count(ann.onset_s, epoch_seconds, first) &&
                detail::as_slot_count(ann.duration_s, epoch_seconds, count) && count > 0,
            ErrorKind::Alignment,
            "stage annotation " + std::to_string(a) + " (onset " + std::to_string(ann.onset_s) +
                " s, duration " + std::to_string(ann.duration_s) +
                " s) is not aligned to the epoch length");
    for (std::size_t s = first; s < first + count; ++s)
      require(slots.emplace(s, ann.stage).second, ErrorKind::InvalidInput,
              "overlapping stage annotations at epoch " + std::to_string(s));
  }
  std::vector<Epoch> epochs;
  for (const auto& [slot, stage] : slots) {
    if ((slot + 1) * spe > signal.sample_count()) continue;
    epochs.push_back(Epoch{signal.slice(slot * spe, spe), epoch_seconds, stage, slot});
  }
  return epochs;
}

/// Removes epochs holding any non-finite sample; returns how many were removed.
inline std::size_t drop_nonfinite_epochs(std::vector<Epoch>& epochs) {
  const auto before = epochs.size();
  std::erase_if(epochs, [](const Epoch& e) { return !e.signal.all_finite(); });
  return before - epochs.size();
}

}  // namespace sleeptda::dsp
