#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/types.hpp"

namespace sleeptda {

/// Fixed-rate multichannel recording, stored channel-major.
class MultichannelSignal {
 public:
  MultichannelSignal(std::vector<std::vector<double>> channels, unsigned sample_rate,
                     std::vector<std::string> channel_ids)
      : channels_(std::move(channels)), ids_(std::move(channel_ids)), sample_rate_(sample_rate) {
    validate();
  }

  /// Convenience constructor with ids "ch0", "ch1", ...
  MultichannelSignal(std::vector<std::vector<double>> channels, unsigned sample_rate)
      : channels_(std::move(channels)),
        ids_(default_ids(channels_.size())),
        sample_rate_(sample_rate) {
    validate();
  }

  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t sample_count() const noexcept { return channels_.front().size(); }
  unsigned sample_rate() const noexcept { return sample_rate_; }
  double duration_s() const noexcept {
    return static_cast<double>(sample_count()) / static_cast<double>(sample_rate_);
  }

  std::span<const double> channel(std::size_t c) const { return channels_.at(c); }
  const std::vector<std::vector<double>>& channels() const noexcept { return channels_; }
  const std::vector<std::string>& channel_ids() const noexcept { return ids_; }

  bool all_finite() const {
    for (const auto& ch : channels_)
      for (double v : ch)
        if (!std::isfinite(v)) return false;
    return true;
  }

  std::size_t nonfinite_count() const {
    std::size_t n = 0;
    for (const auto& ch : channels_)
      for (double v : ch) n += std::isfinite(v) ? 0 : 1;
    return n;
  }

  /// Samples [first, first + count) of every channel.
  MultichannelSignal slice(std::size_t first, std::size_t count) const {
    require(first + count <= sample_count(), ErrorKind::OutOfRange, "slice beyond signal end");
    std::vector<std::vector<double>> out;
    out.reserve(channels_.size());
    for (const auto& ch : channels_)
      out.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(first),
                       ch.begin() + static_cast<std::ptrdiff_t>(first + count));
    return MultichannelSignal(std::move(out), sample_rate_, ids_);
  }

  /// Same signal with channels reordered so that output channel c is input channel order[c].
  MultichannelSignal permuted(std::span<const std::size_t> order) const {
    require(order.size() == channels_.size(), ErrorKind::InvalidParameter,
            "permutation size mismatch");
    std::vector<std::vector<double>> out;
    std::vector<std::string> ids;
    for (std::size_t c : order) {
      out.push_back(channels_.at(c));
      ids.push_back(ids_.at(c));
    }
    return MultichannelSignal(std::move(out), sample_rate_, std::move(ids));
  }

  friend bool operator==(const MultichannelSignal&, const MultichannelSignal&) = default;

 private:
  static std::vector<std::string> default_ids(std::size_t count) {
    std::vector<std::string> ids;
    for (std::size_t c = 0; c < count; ++c) ids.push_back("ch" + std::to_string(c));
    return ids;
  }

  void validate() const {
    require(sample_rate_ > 0, ErrorKind::InvalidParameter, "sample rate must be positive");
    require(!channels_.empty(), ErrorKind::InvalidInput, "signal has no channels");
    require(ids_.size() == channels_.size(), ErrorKind::InvalidInput,
            "channel id count does not match channel count");
    for (std::size_t c = 1; c < channels_.size(); ++c)
      require(channels_[c].size() == channels_[0].size(), ErrorKind::LengthMismatch,
              "channel '" + ids_[c] + "' has " + std::to_string(channels_[c].size()) +
                  " samples, expected " + std::to_string(channels_[0].size()));
  }

  std::vector<std::vector<double>> channels_;
  std::vector<std::string> ids_;
  unsigned sample_rate_;
};

/// One scored stage interval in seconds from recording start.
struct StageAnnotation {
  double onset_s = 0.0;
  double duration_s = 0.0;
  Stage stage = Stage::Awake;

  friend bool operator==(const StageAnnotation&, const StageAnnotation&) = default;
};

/// A fixed-length segment carrying one stage label. index is the segment's
/// ordinal position in the recording (onset / duration).
struct Epoch {
  MultichannelSignal signal;
  double duration_s = 30.0;
  Stage stage = Stage::Awake;
  std::size_t index = 0;
};

}  // namespace sleeptda
