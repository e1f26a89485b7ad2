#pragma once

// Unitary Fourier coefficients, kernel-smoothed cross spectra and squared
// coherence between channel pairs.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/signal.hpp"

namespace sleeptda::dsp {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace detail {

// The FFTW planner is not thread-safe; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* ptr;
};

inline void run_dft(std::span<const Complex> in, std::span<Complex> out, int sign) {
  const std::size_t n = in.size();
  FftwBuffer a(n), b(n);
  std::memcpy(a.ptr, in.data(), sizeof(fftw_complex) * n);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), a.ptr, b.ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::memcpy(static_cast<void*>(out.data()), b.ptr, sizeof(fftw_complex) * n);
}

}  // namespace detail

/// d(w_k) = T^{-1/2} sum_{t=1..T} X(t) exp(-i 2 pi t k / T), k = 0..T-1.
/// Time is indexed from 1, so sample x[n] sits at t = n + 1.
inline Spectrum fourier_coefficients(std::span<const double> x) {
  const std::size_t n = x.size();
  require(n >= 1, ErrorKind::InvalidInput, "fourier_coefficients needs at least one sample");
  Spectrum in(x.begin(), x.end());
  Spectrum out(n);
  detail::run_dft(in, out, FFTW_FORWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    out[k] *= scale * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                          static_cast<double>(n));
  return out;
}

/// Exact inverse of fourier_coefficients; returns the real part.
inline std::vector<double> inverse_fourier(std::span<const Complex> d) {
  const std::size_t n = d.size();
  require(n >= 1, ErrorKind::InvalidInput, "inverse_fourier needs at least one coefficient");
  Spectrum in(n);
  for (std::size_t k = 0; k < n; ++k)
    in[k] = d[k] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                       static_cast<double>(n));
  Spectrum out(n);
  detail::run_dft(in, out, FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = out[t].real() * scale;
  return x;
}

/// Symmetric smoothing weights over 2m+1 neighbouring Fourier bins.
class SmoothingKernel {
 public:
  explicit SmoothingKernel(std::vector<double> weights) : w_(std::move(weights)) {
    require(w_.size() % 2 == 1, ErrorKind::InvalidParameter, "kernel length must be odd");
    double sum = 0.0;
    for (double v : w_) {
      require(v >= 0.0 && std::isfinite(v), ErrorKind::InvalidParameter,
              "kernel weights must be finite and non-negative");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-12, ErrorKind::InvalidParameter,
            "kernel weights must sum to 1");
  }

  /// No smoothing: the raw (cross-)periodogram.
  static SmoothingKernel identity() { return SmoothingKernel({1.0}); }

  static SmoothingKernel uniform(std::size_t width) {
    require(width % 2 == 1, ErrorKind::InvalidParameter, "uniform kernel width must be odd");
    return SmoothingKernel(std::vector<double>(width, 1.0 / static_cast<double>(width)));
  }

  /// Modified Daniell: uniform over 2m+1 bins with half-weight endpoints.
  static SmoothingKernel modified_daniell(std::size_t m) {
    if (m == 0) return identity();
    std::vector<double> w(2 * m + 1, 1.0 / (2.0 * static_cast<double>(m)));
    w.front() = w.back() = 1.0 / (4.0 * static_cast<double>(m));
    return SmoothingKernel(std::move(w));
  }

  std::size_t size() const noexcept { return w_.size(); }
  std::size_t half_width() const noexcept { return w_.size() / 2; }
  const std::vector<double>& weights() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

/// sum_l w_l d_i(k+l) conj(d_j(k+l)) with wrap-around bin indices.
inline Complex smoothed_cross_spectrum_at(std::span<const Complex> spec_i,
                                          std::span<const Complex> spec_j,
                                          const SmoothingKernel& kernel, std::size_t bin) {
  const std::size_t n = spec_i.size();
  const std::size_t m = kernel.half_width();
  const auto& w = kernel.weights();
  Complex acc{0.0, 0.0};
  for (std::size_t l = 0; l < w.size(); ++l) {
    const std::size_t k = (bin + n * (m / n + 1) + l - m) % n;
    acc += w[l] * spec_i[k] * std::conj(spec_j[k]);
  }
  return acc;
}

inline Spectrum smoothed_cross_spectrum(std::span<const Complex> spec_i,
                                        std::span<const Complex> spec_j,
                                        const SmoothingKernel& kernel) {
  require(spec_i.size() == spec_j.size(), ErrorKind::InvalidInput, "spectrum lengths differ");
  require(kernel.size() <= spec_i.size(), ErrorKind::InvalidParameter,
          "kernel of length " + std::to_string(kernel.size()) + " exceeds spectrum length " +
              std::to_string(spec_i.size()));
  Spectrum out(spec_i.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = smoothed_cross_spectrum_at(spec_i, spec_j, kernel, k);
  return out;
}

/// Relative threshold below which an auto-spectrum counts as unpowered.
inline constexpr double kZeroPowerEpsilon = 1e-12;

inline double squared_coherence_at(Complex f_ij, double f_ii, double f_jj, double threshold) {
  if (f_ii <= threshold || f_jj <= threshold) return 0.0;
  const double c = std::norm(f_ij) / (f_ii * f_jj);
  return std::clamp(c, 0.0, 1.0);
}

/// |f_ij|^2 / (f_ii f_jj) per bin, clamped to [0, 1]. Bins where either
/// auto-spectrum is at or below kZeroPowerEpsilon * reference_power get 0.
inline std::vector<double> squared_coherence(std::span<const Complex> f_ij,
                                             std::span<const double> f_ii,
                                             std::span<const double> f_jj, double reference_power) {
  require(f_ij.size() == f_ii.size() && f_ii.size() == f_jj.size(), ErrorKind::InvalidInput,
          "spectrum lengths differ");
  const double threshold = kZeroPowerEpsilon * reference_power;
  std::vector<double> c(f_ij.size());
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = squared_coherence_at(f_ij[k], f_ii[k], f_jj[k], threshold);
  return c;
}

/// Reference power is the largest auto-spectrum value of the two channels.
inline std::vector<double> squared_coherence(std::span<const Complex> f_ij,
                                             std::span<const double> f_ii,
                                             std::span<const double> f_jj) {
  double ref = 0.0;
  for (double v : f_ii) ref = std::max(ref, v);
  for (double v : f_jj) ref = std::max(ref, v);
  return squared_coherence(f_ij, f_ii, f_jj, ref);
}

inline std::vector<double> real_part(std::span<const Complex> s) {
  std::vector<double> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = s[k].real();
  return out;
}

inline double coherence_distance(double coherence) { return 1.0 - coherence; }

inline std::vector<double> coherence_distance(std::span<const double> coherence) {
  std::vector<double> d(coherence.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = coherence_distance(coherence[k]);
  return d;
}

/// Smoothed cross-spectral matrix of every channel pair at every Fourier bin.
/// Hermitian by construction: only i <= j is computed, the rest mirrored.
class SpectralMatrix {
 public:
  SpectralMatrix(const MultichannelSignal& signal, const SmoothingKernel& kernel)
      : channels_(signal.channel_count()), bins_(signal.sample_count()) {
    std::vector<Spectrum> spectra;
    for (std::size_t c = 0; c < channels_; ++c)
      spectra.push_back(fourier_coefficients(signal.channel(c)));
    values_.resize(channels_ * channels_);
    for (std::size_t i = 0; i < channels_; ++i) {
      for (std::size_t j = i; j < channels_; ++j) {
        Spectrum f = smoothed_cross_spectrum(spectra[i], spectra[j], kernel);
        if (i == j)
          for (auto& v : f) v = Complex(v.real(), 0.0);
        Spectrum g(f.size());
        for (std::size_t k = 0; k < f.size(); ++k) g[k] = std::conj(f[k]);
        values_[i * channels_ + j] = std::move(f);
        if (i != j) values_[j * channels_ + i] = std::move(g);
      }
    }
    freqs_.resize(bins_);
    for (std::size_t k = 0; k < bins_; ++k)
      freqs_[k] = static_cast<double>(k) * signal.sample_rate() / static_cast<double>(bins_);
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t bins() const noexcept { return bins_; }
  const std::vector<double>& freqs() const noexcept { return freqs_; }
  std::span<const Complex> values(std::size_t i, std::size_t j) const {
    return values_.at(i * channels_ + j);
  }

 private:
  std::size_t channels_;
  std::size_t bins_;
  std::vector<Spectrum> values_;
  std::vector<double> freqs_;
};

}  // namespace sleeptda::dsp
