#pragma once

// Butterworth bandstop (notch) design by bilinear transform of the analog
// lowpass prototype, realised as a cascade of second-order sections.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sleeptda/error.hpp"
#include "sleeptda/signal.hpp"

namespace sleeptda::dsp {

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  /// Complex response at normalized angular frequency omega (rad/sample).
  std::complex<double> response(double omega) const {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }
};

class BiquadCascade {
 public:
  BiquadCascade() = default;
  explicit BiquadCascade(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  void append(const BiquadCascade& other) {
    sections_.insert(sections_.end(), other.sections_.begin(), other.sections_.end());
  }

  std::complex<double> response(double freq_hz, double sample_rate) const {
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : sections_) h *= s.response(omega);
    return h;
  }

  double magnitude(double freq_hz, double sample_rate) const {
    return std::abs(response(freq_hz, sample_rate));
  }

  /// Causal filtering from zero initial state (transposed direct form II).
  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : sections_) {
      double z1 = 0.0, z2 = 0.0;
      for (double& v : y) {
        const double in = v;
        const double out = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * out + z2;
        z2 = s.b2 * in - s.a2 * out;
        v = out;
      }
    }
    return y;
  }

  /// Forward then time-reversed pass; squared magnitude, zero phase.
  std::vector<double> apply_zero_phase(std::span<const double> x) const {
    std::vector<double> y = apply(x);
    std::reverse(y.begin(), y.end());
    y = apply(y);
    std::reverse(y.begin(), y.end());
    return y;
  }

 private:
  std::vector<Biquad> sections_;
};

/// Prewarped analog frequency (rad/s) corresponding to a digital frequency.
inline double prewarp(double freq_hz, double sample_rate) {
  return 2.0 * sample_rate * std::tan(std::numbers::pi * freq_hz / sample_rate);
}

/// Butterworth bandstop of the given prototype order centred on center_hz with
/// band edges center_hz +- half_width_hz. The analog centre is prewarp(center_hz)
/// so the transmission zero sits exactly on center_hz.
inline BiquadCascade design_butterworth_bandstop(double center_hz, double half_width_hz, int order,
                                                 double sample_rate) {
  const double nyquist = sample_rate / 2.0;
  require(sample_rate > 0.0, ErrorKind::InvalidParameter, "sample rate must be positive");
  require(order >= 1, ErrorKind::InvalidParameter, "filter order must be >= 1");
  require(center_hz > 0.0 && center_hz < nyquist, ErrorKind::InvalidParameter,
          "notch center " + std::to_string(center_hz) + " Hz must lie in (0, Nyquist=" +
              std::to_string(nyquist) + " Hz)");
  require(half_width_hz > 0.0 && center_hz - half_width_hz > 0.0 &&
              center_hz + half_width_hz < nyquist,
          ErrorKind::InvalidParameter,
          "notch band around " + std::to_string(center_hz) + " Hz exceeds (0, Nyquist)");

  using cd = std::complex<double>;
  const double w0 = prewarp(center_hz, sample_rate);
  const double bw =
      prewarp(center_hz + half_width_hz, sample_rate) - prewarp(center_hz - half_width_hz, sample_rate);
  const double fs2 = 2.0 * sample_rate;

  // Each prototype pole p yields two bandstop poles: roots of p s^2 - bw s + p w0^2.
  std::vector<cd> zpoles;
  for (int k = 0; k < order; ++k) {
    const cd p = std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order));
    const cd disc = std::sqrt(cd(bw * bw) - 4.0 * p * p * w0 * w0);
    for (const cd s : {(bw + disc) / (2.0 * p), (bw - disc) / (2.0 * p)})
      zpoles.push_back((fs2 + s) / (fs2 - s));
  }

  constexpr double kRealTol = 1e-12;
  std::vector<cd> upper, real;
  for (const cd& z : zpoles) {
    if (z.imag() > kRealTol) upper.push_back(z);
    else if (std::abs(z.imag()) <= kRealTol) real.push_back(cd(z.real(), 0.0));
  }
  std::sort(upper.begin(), upper.end(), [](cd a, cd b) { return std::arg(a) < std::arg(b); });
  std::sort(real.begin(), real.end(), [](cd a, cd b) { return a.real() < b.real(); });

  const double cosw = std::cos(2.0 * std::numbers::pi * center_hz / sample_rate);
  auto make_section = [&](double a1, double a2) {
    // Zeros at exp(+-i w0); unity gain at DC.
    const double g = (1.0 + a1 + a2) / (2.0 - 2.0 * cosw);
    return Biquad{g, -2.0 * cosw * g, g, a1, a2};
  };

  std::vector<Biquad> sections;
  for (const cd& z : upper) sections.push_back(make_section(-2.0 * z.real(), std::norm(z)));
  for (std::size_t i = 0; i + 1 < real.size(); i += 2)
    sections.push_back(
        make_section(-(real[i].real() + real[i + 1].real()), real[i].real() * real[i + 1].real()));
  require(sections.size() == static_cast<std::size_t>(order), ErrorKind::InvalidParameter,
          "pole pairing failed for the requested notch");
  return BiquadCascade(std::move(sections));
}

struct NotchSpec {
  std::vector<double> centers_hz{60.0, 120.0};
  double half_width_hz = 2.0;
  int order = 3;
  bool zero_phase = false;
};

inline BiquadCascade design_notch_filter(const NotchSpec& spec, double sample_rate) {
  BiquadCascade cascade;
  for (double c : spec.centers_hz)
    cascade.append(design_butterworth_bandstop(c, spec.half_width_hz, spec.order, sample_rate));
  return cascade;
}

/// Removes line interference at each notch centre; every channel is filtered
/// independently with the same cascade.
inline MultichannelSignal bandstop_filter(const MultichannelSignal& signal, const NotchSpec& spec) {
  require(signal.sample_count() > 0, ErrorKind::InvalidInput, "cannot filter an empty signal");
  const BiquadCascade cascade = design_notch_filter(spec, signal.sample_rate());
  std::vector<std::vector<double>> out;
  out.reserve(signal.channel_count());
  for (std::size_t c = 0; c < signal.channel_count(); ++c)
    out.push_back(spec.zero_phase ? cascade.apply_zero_phase(signal.channel(c))
                                  : cascade.apply(signal.channel(c)));
  return MultichannelSignal(std::move(out), signal.sample_rate(), signal.channel_ids());
}

inline MultichannelSignal bandstop_filter(const MultichannelSignal& signal,
                                          std::span<const double> notch_centers) {
  NotchSpec spec;
  spec.centers_hz.assign(notch_centers.begin(), notch_centers.end());
  return bandstop_filter(signal, spec);
}

}  // namespace sleeptda::dsp
