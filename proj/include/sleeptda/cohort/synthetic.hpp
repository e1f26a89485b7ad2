#pragma once

// Synthetic cohorts with a plantable between-group coherence difference.
//
// Channel i of a study is x_i(t) = c * s(t) + sigma * n_i(t) where n_i is
// unit white noise and s is a shared latent source. s is a random-phase
// multisine with unit power at every Fourier bin in [source_lo_hz,
// source_hi_hz), redrawn for every epoch-length block, so every EEG band
// carries coherence c^2 / (c^2 + sigma^2) in expectation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sleeptda/cohort/study.hpp"
#include "sleeptda/dsp/spectral.hpp"
#include "sleeptda/error.hpp"
#include "sleeptda/util.hpp"

namespace sleeptda::cohort {

struct SyntheticCohortConfig {
  std::size_t n_studies_per_group = 20;
  std::size_t channels = 7;
  unsigned sample_rate = 256;
  double duration_s = 300.0;
  double coupling_apnea = 0.8;
  double coupling_control = 0.2;
  double noise_level = 1.0;
  /// Amplitude of an added 60 Hz mains component (0 disables it).
  double line_noise_amplitude = 0.0;
  double epoch_seconds = 30.0;
  double source_lo_hz = 0.5;
  double source_hi_hz = 50.0;
  std::uint64_t seed = 1;

  void validate() const {
    require(channels >= 2, ErrorKind::InvalidParameter, "synthetic cohort needs >= 2 channels");
    require(sample_rate > 0 && duration_s > 0.0 && epoch_seconds > 0.0,
            ErrorKind::InvalidParameter, "sample rate and durations must be positive");
    require(coupling_apnea >= 0.0 && coupling_apnea <= 1.0 && coupling_control >= 0.0 &&
                coupling_control <= 1.0,
            ErrorKind::InvalidParameter, "coupling parameters must lie in [0, 1]");
    require(noise_level > 0.0, ErrorKind::InvalidParameter, "noise level must be positive");
    require(source_hi_hz > source_lo_hz && source_lo_hz >= 0.0, ErrorKind::InvalidParameter,
            "invalid latent source band");
  }
};

/// One block of the latent source: unit-modulus random-phase coefficients at
/// every bin in [lo, hi), conjugate-mirrored so the block is real.
inline std::vector<double> latent_source_block(std::size_t length, double sample_rate, double lo_hz,
                                               double hi_hz, std::mt19937_64& rng) {
  std::vector<dsp::Complex> d(length, {0.0, 0.0});
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (std::size_t k = 1; 2 * k < length; ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(length);
    if (f < lo_hz || f >= hi_hz) continue;
    const dsp::Complex z = std::polar(1.0, phase(rng));
    d[k] = z;
    d[length - k] = std::conj(z);
  }
  return dsp::inverse_fourier(d);
}

inline StudyRecord generate_synthetic_study(const SyntheticCohortConfig& config, bool apnea,
                                            std::size_t index) {
  config.validate();
  std::mt19937_64 rng(derive_seed(config.seed, apnea ? 1 : 2, index));
  const std::size_t total = static_cast<std::size_t>(std::llround(config.duration_s * config.sample_rate));
  const std::size_t block =
      static_cast<std::size_t>(std::llround(config.epoch_seconds * config.sample_rate));
  const double coupling = apnea ? config.coupling_apnea : config.coupling_control;

  std::vector<double> source;
  source.reserve(total);
  while (source.size() < total) {
    const std::size_t len = std::min(block, total - source.size());
    const auto s = latent_source_block(len, config.sample_rate, config.source_lo_hz,
                                       config.source_hi_hz, rng);
    source.insert(source.end(), s.begin(), s.end());
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<std::vector<double>> channels(config.channels, std::vector<double>(total));
  std::vector<std::string> ids;
  for (std::size_t c = 0; c < config.channels; ++c) {
    ids.push_back("EEG" + std::to_string(c + 1));
    const double hum_phase = phase(rng);
    for (std::size_t t = 0; t < total; ++t) {
      double v = coupling * source[t] + config.noise_level * gauss(rng);
      if (config.line_noise_amplitude > 0.0)
        v += config.line_noise_amplitude *
             std::sin(2.0 * std::numbers::pi * 60.0 * static_cast<double>(t) / config.sample_rate +
                      hum_phase);
      channels[c][t] = v;
    }
  }

  char id[32];
  std::snprintf(id, sizeof id, "%s_%03zu", apnea ? "apnea" : "control", index);
  StudyRecord study{id, MultichannelSignal(std::move(channels), config.sample_rate, std::move(ids)),
                    {}, {}, Group::Unassigned};

  const std::size_t epochs = total / block;
  for (std::size_t e = 0; e < epochs; ++e)
    study.stage_annotations.push_back({static_cast<double>(e) * config.epoch_seconds,
                                       config.epoch_seconds, kSleepStages[e % kSleepStages.size()]});

  std::uniform_real_distribution<double> when(0.0, std::max(0.0, config.duration_s - 10.0));
  const double onset = std::floor(when(rng));
  const double length = std::min(10.0, config.duration_s - onset);
  study.event_annotations.push_back({onset, length, apnea ? "Obstructive Apnea" : "Arousal"});
  return study;
}

/// n_studies_per_group apnea studies followed by as many controls. Each
/// study has its own derived seed, so studies can be generated independently.
inline std::vector<StudyRecord> generate_synthetic_cohort(const SyntheticCohortConfig& config) {
  config.validate();
  std::vector<StudyRecord> out;
  out.reserve(2 * config.n_studies_per_group);
  for (bool apnea : {true, false})
    for (std::size_t i = 0; i < config.n_studies_per_group; ++i)
      out.push_back(generate_synthetic_study(config, apnea, i));
  return out;
}

}  // namespace sleeptda::cohort
