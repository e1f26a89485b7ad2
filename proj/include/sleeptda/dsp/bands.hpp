#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sleeptda/dsp/spectral.hpp"
#include "sleeptda/error.hpp"
#include "sleeptda/matrix.hpp"
#include "sleeptda/signal.hpp"
#include "sleeptda/types.hpp"

namespace sleeptda::dsp {

/// Half-open [lo, hi) frequency ranges in Hz, one per band.
struct BandEdges {
  std::array<std::pair<double, double>, 5> edges{
      {{0.5, 4.0}, {4.0, 8.0}, {8.0, 12.0}, {12.0, 30.0}, {30.0, 50.0}}};

  double lo(Band b) const { return edges[index_of(b)].first; }
  double hi(Band b) const { return edges[index_of(b)].second; }
  double max_hi() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max(m, e.second);
    return m;
  }

  friend bool operator==(const BandEdges&, const BandEdges&) = default;
};

struct BandDistanceMatrix {
  SquareMatrix values;
  Band band = Band::Delta;
  std::size_t epoch_index = 0;
  Stage stage = Stage::Awake;
};

/// Coherence distance 1 - C between every channel pair at a set of
/// non-negative Fourier frequencies.
struct DistanceSpectrum {
  std::size_t channels = 0;
  std::vector<double> freqs_hz;
  std::vector<SquareMatrix> per_bin;
};

/// Distances at bins 0..T/2 whose frequency is below max_freq_hz. The
/// zero-power guard is relative to the largest auto-spectrum value among all
/// channels at those bins.
inline DistanceSpectrum distance_spectrum(const MultichannelSignal& signal,
                                          const SmoothingKernel& kernel,
                                          double max_freq_hz = std::numeric_limits<double>::infinity()) {
  const std::size_t n = signal.sample_count();
  const std::size_t nc = signal.channel_count();
  require(n >= 1, ErrorKind::InvalidInput, "empty signal");
  require(nc >= 2, ErrorKind::InvalidInput, "at least two channels are required for coherence");
  require(kernel.size() <= n, ErrorKind::InvalidParameter, "kernel longer than spectrum");

  std::vector<Spectrum> spectra;
  spectra.reserve(nc);
  for (std::size_t c = 0; c < nc; ++c) spectra.push_back(fourier_coefficients(signal.channel(c)));

  DistanceSpectrum out;
  out.channels = nc;
  std::vector<std::size_t> bins;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * signal.sample_rate() / static_cast<double>(n);
    if (f >= max_freq_hz) break;
    bins.push_back(k);
    out.freqs_hz.push_back(f);
  }

  std::vector<std::vector<double>> autos(nc, std::vector<double>(bins.size()));
  double ref = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t b = 0; b < bins.size(); ++b) {
      autos[c][b] = smoothed_cross_spectrum_at(spectra[c], spectra[c], kernel, bins[b]).real();
      ref = std::max(ref, autos[c][b]);
    }
  const double threshold = kZeroPowerEpsilon * ref;

  out.per_bin.assign(bins.size(), SquareMatrix(nc));
  for (std::size_t b = 0; b < bins.size(); ++b) {
    SquareMatrix& m = out.per_bin[b];
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t j = i + 1; j < nc; ++j) {
        const Complex f_ij = smoothed_cross_spectrum_at(spectra[i], spectra[j], kernel, bins[b]);
        const double d =
            coherence_distance(squared_coherence_at(f_ij, autos[i][b], autos[j][b], threshold));
        m(i, j) = d;
        m(j, i) = d;
      }
  }
  return out;
}

/// Entrywise mean over bins with lo <= f < hi, DC excluded.
inline SquareMatrix band_average(const DistanceSpectrum& spectrum, double lo_hz, double hi_hz) {
  SquareMatrix acc(spectrum.channels);
  std::size_t count = 0;
  for (std::size_t b = 0; b < spectrum.freqs_hz.size(); ++b) {
    const double f = spectrum.freqs_hz[b];
    if (f <= 0.0 || f < lo_hz || f >= hi_hz) continue;
    const SquareMatrix& m = spectrum.per_bin[b];
    for (std::size_t i = 0; i < acc.size(); ++i)
      for (std::size_t j = 0; j < acc.size(); ++j) acc(i, j) += m(i, j);
    ++count;
  }
  require(count > 0, ErrorKind::EmptyBand,
          "no Fourier bins in [" + std::to_string(lo_hz) + ", " + std::to_string(hi_hz) + ") Hz");
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < acc.size(); ++i)
    for (std::size_t j = 0; j < acc.size(); ++j)
      acc(i, j) = (i == j) ? 0.0 : std::clamp(acc(i, j) * inv, 0.0, 1.0);
  return acc;
}

inline BandDistanceMatrix band_average(const DistanceSpectrum& spectrum, const BandEdges& edges,
                                       Band band) {
  return BandDistanceMatrix{band_average(spectrum, edges.lo(band), edges.hi(band)), band, 0,
                            Stage::Awake};
}

/// The five band matrices of one epoch, in band order.
inline std::vector<BandDistanceMatrix> epoch_band_matrices(const Epoch& epoch,
                                                           const SmoothingKernel& kernel,
                                                           const BandEdges& edges = {}) {
  const DistanceSpectrum spectrum = distance_spectrum(epoch.signal, kernel, edges.max_hi());
  std::vector<BandDistanceMatrix> out;
  out.reserve(kAllBands.size());
  for (Band b : kAllBands) {
    BandDistanceMatrix m = band_average(spectrum, edges, b);
    m.epoch_index = epoch.index;
    m.stage = epoch.stage;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace sleeptda::dsp
