#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "sleeptda/dsp/bands.hpp"
#include "sleeptda/dsp/butterworth.hpp"
#include "sleeptda/dsp/epochs.hpp"
#include "sleeptda/dsp/spectral.hpp"

using namespace sleeptda;
using namespace sleeptda::dsp;
using Catch::Approx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sine(double freq, unsigned fs, std::size_t n, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::sin(2.0 * kPi * freq * t / fs);
  return x;
}

std::vector<double> white(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

double peak(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// Squared magnitude of the analog Butterworth bandstop after frequency warping.
double analytic_bandstop_gain(double f, double f0, double half_width, int order, double fs) {
  const double w = prewarp(f, fs);
  const double w0 = prewarp(f0, fs);
  const double bw = prewarp(f0 + half_width, fs) - prewarp(f0 - half_width, fs);
  const double r = bw * w / (w0 * w0 - w * w);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

// d(k) by direct summation with time indexed from 1.
Spectrum direct_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  Spectrum d(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    for (std::size_t t = 1; t <= n; ++t)
      acc += x[t - 1] * std::polar(1.0, -2.0 * kPi * static_cast<double>(t * k % n) / n);
    d[k] = acc / std::sqrt(static_cast<double>(n));
  }
  return d;
}

}  // namespace

TEST_CASE("designed notch matches the analytic Butterworth magnitude", "[filter]") {
  const double fs = 256.0;
  const auto filt = design_butterworth_bandstop(60.0, 2.0, 3, fs);
  REQUIRE(filt.sections().size() == 3);
  for (double f = 0.5; f < 127.5; f += 0.25) {
    if (std::abs(f - 60.0) < 1e-9) continue;
    CHECK_THAT(filt.magnitude(f, fs), WithinAbs(analytic_bandstop_gain(f, 60.0, 2.0, 3, fs), 1e-9));
  }
  CHECK(filt.magnitude(60.0, fs) < 1e-9);
  CHECK_THAT(filt.magnitude(0.0, fs), WithinAbs(1.0, 1e-12));
  CHECK(20.0 * std::log10(filt.magnitude(60.0, fs) + 1e-300) <= -40.0);
  CHECK_THAT(filt.magnitude(10.0, fs), WithinAbs(1.0, 0.01));
}

TEST_CASE("notch band edges sit at -3 dB", "[filter]") {
  const double fs = 256.0;
  const auto filt = design_butterworth_bandstop(60.0, 2.0, 3, fs);
  const double w0 = prewarp(60.0, fs), bw = prewarp(62.0, fs) - prewarp(58.0, fs);
  // Analog edges of the bandstop are the roots of w^2 -+ bw w - w0^2 = 0.
  const double edge = (bw + std::sqrt(bw * bw + 4 * w0 * w0)) / 2.0;
  const double f_edge = std::atan(edge / (2.0 * fs)) * fs / kPi;
  CHECK_THAT(filt.magnitude(f_edge, fs), WithinAbs(1.0 / std::sqrt(2.0), 1e-9));
}

TEST_CASE("bandstop_filter passes DC and removes mains", "[filter]") {
  const unsigned fs = 256;
  const std::size_t n = 20 * fs;
  MultichannelSignal dc({std::vector<double>(n, 1.0)}, fs);
  const auto y = bandstop_filter(dc, std::vector<double>{60.0, 120.0});
  REQUIRE(y.sample_count() == n);
  for (std::size_t t = 10 * fs; t < n; ++t) REQUIRE_THAT(y.channel(0)[t], WithinAbs(1.0, 1e-6));

  MultichannelSignal mains({sine(60.0, fs, n), sine(10.0, fs, n)}, fs);
  const auto z = bandstop_filter(mains, std::vector<double>{60.0, 120.0});
  const auto tail60 = z.channel(0).subspan(10 * fs);
  const auto tail10 = z.channel(1).subspan(10 * fs);
  const double g60 = design_notch_filter(NotchSpec{}, fs).magnitude(60.0, fs);
  CHECK(peak(tail60) <= 0.01);
  CHECK(peak(tail60) <= g60 + 1e-6);
  const double g10 = design_notch_filter(NotchSpec{}, fs).magnitude(10.0, fs);
  CHECK_THAT(peak(tail10), WithinAbs(g10, 1e-3));
  CHECK_THAT(peak(tail10), WithinAbs(1.0, 0.01));
}

TEST_CASE("passband within 1% more than 3 Hz beyond each stopband edge", "[filter]") {
  const double fs = 256.0;
  const auto filt = design_notch_filter(NotchSpec{}, fs);
  for (int i = 0; i < 2560; ++i) {
    const double f = 0.05 * i;
    const bool near = std::abs(f - 60.0) <= 5.0 || std::abs(f - 120.0) <= 5.0;
    if (!near) REQUIRE_THAT(filt.magnitude(f, fs), WithinAbs(1.0, 0.01));
  }
}

TEST_CASE("zero-phase filtering squares the magnitude", "[filter]") {
  const unsigned fs = 256;
  NotchSpec spec;
  spec.zero_phase = true;
  MultichannelSignal s({sine(10.0, fs, 40 * fs)}, fs);
  const auto y = bandstop_filter(s, spec);
  const double g = design_notch_filter(spec, fs).magnitude(10.0, fs);
  CHECK_THAT(peak(y.channel(0).subspan(15 * fs, 10 * fs)), WithinAbs(g * g, 1e-3));
}

TEST_CASE("bandstop_filter is linear", "[filter]") {
  std::mt19937_64 rng(7);
  const unsigned fs = 256;
  const auto x = white(rng, 4096), y = white(rng, 4096);
  const double a = 1.7, b = -0.6;
  std::vector<double> mix(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) mix[t] = a * x[t] + b * y[t];
  const std::vector<double> notches{60.0, 120.0};
  const auto fx = bandstop_filter(MultichannelSignal({x}, fs), notches);
  const auto fy = bandstop_filter(MultichannelSignal({y}, fs), notches);
  const auto fm = bandstop_filter(MultichannelSignal({mix}, fs), notches);
  for (std::size_t t = 0; t < x.size(); ++t)
    REQUIRE_THAT(fm.channel(0)[t], WithinAbs(a * fx.channel(0)[t] + b * fy.channel(0)[t], 1e-9));
}

TEST_CASE("notch parameters are validated", "[filter]") {
  MultichannelSignal s({std::vector<double>(512, 0.0)}, 256);
  CHECK_THROWS_MATCHES(bandstop_filter(s, std::vector<double>{128.0}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.kind() == ErrorKind::InvalidParameter; }));
  CHECK_THROWS_AS(bandstop_filter(s, std::vector<double>{200.0}), Error);
  CHECK_NOTHROW(bandstop_filter(s, std::vector<double>{}));
  CHECK_THROWS_AS(design_butterworth_bandstop(60.0, 2.0, 0, 256.0), Error);
}

TEST_CASE("segment_epochs examples", "[epochs]") {
  const unsigned fs = 256;
  auto signal_of = [&](double seconds) {
    return MultichannelSignal({std::vector<double>(static_cast<std::size_t>(seconds * fs), 0.5)}, fs);
  };
  CHECK(samples_per_epoch(256, 30.0) == 7680);

  const std::vector<StageAnnotation> three{
      {0, 30, Stage::NREM1}, {30, 30, Stage::NREM2}, {60, 30, Stage::REM}};
  const auto e = segment_epochs(signal_of(90), three);
  REQUIRE(e.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(e[i].signal.sample_count() == 7680);
    CHECK(e[i].index == i);
    CHECK(e[i].stage == three[i].stage);
  }

  CHECK(segment_epochs(signal_of(20), std::vector<StageAnnotation>{{0, 30, Stage::NREM2}}).empty());

  const auto one = segment_epochs(signal_of(35), std::vector<StageAnnotation>{{0, 30, Stage::NREM3}});
  REQUIRE(one.size() == 1);
  CHECK(one[0].signal.sample_count() == 7680);

  // A multi-epoch annotation expands into one epoch per slot.
  const auto long_ann =
      segment_epochs(signal_of(100), std::vector<StageAnnotation>{{0, 90, Stage::NREM2}});
  CHECK(long_ann.size() == 3);
}

TEST_CASE("segment_epochs rejects misaligned annotations", "[epochs]") {
  MultichannelSignal s({std::vector<double>(256 * 90, 0.0)}, 256);
  auto kind_of = [&](std::vector<StageAnnotation> ann) {
    try {
      segment_epochs(s, ann);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind_of({{15, 30, Stage::NREM1}}) == ErrorKind::Alignment);
  CHECK(kind_of({{0, 45, Stage::NREM1}}) == ErrorKind::Alignment);
  CHECK(kind_of({{0, 60, Stage::NREM1}, {30, 30, Stage::REM}}) == ErrorKind::InvalidInput);
}

TEST_CASE("drop_nonfinite_epochs removes corrupted epochs", "[epochs]") {
  std::vector<double> x(256 * 60, 1.0);
  x[256 * 45] = std::numeric_limits<double>::quiet_NaN();
  const std::vector<StageAnnotation> ann{{0, 60, Stage::NREM2}};
  auto epochs = segment_epochs(MultichannelSignal({x}, 256), ann);
  CHECK(drop_nonfinite_epochs(epochs) == 1);
  REQUIRE(epochs.size() == 1);
  CHECK(epochs[0].index == 0);
}

TEST_CASE("fourier_coefficients examples", "[fourier]") {
  for (const auto& d : fourier_coefficients(std::vector<double>(16, 0.0))) CHECK(std::abs(d) == 0.0);

  const double c = 2.5;
  const auto d = fourier_coefficients(std::vector<double>(8, c));
  CHECK_THAT(std::abs(d[0]), WithinAbs(c * std::sqrt(8.0), 1e-12));
  for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(d[k]) < 1e-12);
}

TEST_CASE("fourier_coefficients match direct summation", "[fourier]") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 7u, 8u, 30u, 97u, 256u}) {
    const auto x = white(rng, n);
    const auto fast = fourier_coefficients(x);
    const auto slow = direct_dft(x);
    for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(fast[k] - slow[k]) < 1e-10);
    const auto back = inverse_fourier(fast);
    for (std::size_t t = 0; t < n; ++t) REQUIRE_THAT(back[t], WithinAbs(x[t], 1e-12));
  }
}

TEST_CASE("Parseval identity", "[fourier]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = white(rng, 1000 + 37 * trial);
    double time = 0.0, freq = 0.0;
    for (double v : x) time += v * v;
    for (const auto& d : fourier_coefficients(x)) freq += std::norm(d);
    REQUIRE_THAT(freq, WithinRel(time, 1e-9));
  }
}

TEST_CASE("smoothed cross spectrum examples", "[smoothing]") {
  std::mt19937_64 rng(5);
  const auto di = fourier_coefficients(white(rng, 64));
  const auto dj = fourier_coefficients(white(rng, 64));

  const auto raw = smoothed_cross_spectrum(di, di, SmoothingKernel::identity());
  for (std::size_t k = 0; k < di.size(); ++k) {
    CHECK_THAT(raw[k].real(), WithinAbs(std::norm(di[k]), 1e-12));
    CHECK(raw[k].imag() == 0.0);
  }

  const Spectrum powers{{1.0, 0.0}, {std::sqrt(2.0), 0.0}, {std::sqrt(3.0), 0.0}};
  const auto f = smoothed_cross_spectrum(powers, powers, SmoothingKernel::uniform(3));
  CHECK_THAT(f[1].real(), WithinAbs(2.0, 1e-12));
  // Wrap-around: bin 0 averages bins 2, 0, 1.
  CHECK_THAT(f[0].real(), WithinAbs(2.0, 1e-12));

  const auto kernel = SmoothingKernel::modified_daniell(4);
  const auto fij = smoothed_cross_spectrum(di, dj, kernel);
  const auto fji = smoothed_cross_spectrum(dj, di, kernel);
  for (std::size_t k = 0; k < fij.size(); ++k) REQUIRE(std::abs(fij[k] - std::conj(fji[k])) < 1e-12);
  const auto fii = smoothed_cross_spectrum(di, di, kernel);
  for (const auto& v : fii) REQUIRE(v.real() >= 0.0);

  CHECK_THROWS_AS(smoothed_cross_spectrum(powers, powers, SmoothingKernel::uniform(5)), Error);
}

TEST_CASE("smoothing kernels are validated", "[smoothing]") {
  CHECK_THROWS_AS(SmoothingKernel({0.5, 0.5}), Error);
  CHECK_THROWS_AS(SmoothingKernel({0.5, 0.6, -0.1}), Error);
  CHECK_THROWS_AS(SmoothingKernel({0.2, 0.2, 0.2}), Error);
  const auto md = SmoothingKernel::modified_daniell(2);
  CHECK(md.weights() == std::vector<double>{0.125, 0.25, 0.25, 0.25, 0.125});
}

TEST_CASE("squared coherence identities", "[coherence]") {
  std::mt19937_64 rng(9);
  const auto x = white(rng, 512), y = white(rng, 512);
  const auto dx = fourier_coefficients(x), dy = fourier_coefficients(y);

  const auto kernel = SmoothingKernel::modified_daniell(4);
  const auto fxx = real_part(smoothed_cross_spectrum(dx, dx, kernel));
  const auto same = squared_coherence(smoothed_cross_spectrum(dx, dx, kernel), fxx, fxx);
  for (double c : same) REQUIRE_THAT(c, WithinAbs(1.0, 1e-9));

  const auto id = SmoothingKernel::identity();
  const auto raw = squared_coherence(smoothed_cross_spectrum(dx, dy, id),
                                     real_part(smoothed_cross_spectrum(dx, dx, id)),
                                     real_part(smoothed_cross_spectrum(dy, dy, id)));
  for (double c : raw) REQUIRE_THAT(c, WithinAbs(1.0, 1e-9));

  const auto fyy = real_part(smoothed_cross_spectrum(dy, dy, kernel));
  for (double c : squared_coherence(smoothed_cross_spectrum(dx, dy, kernel), fxx, fyy)) {
    REQUIRE(c >= 0.0);
    REQUIRE(c <= 1.0);
  }
}

TEST_CASE("coherence of unpowered bins is zero", "[coherence]") {
  const Spectrum fij{{0.0, 0.0}, {1.0, 0.0}};
  const std::vector<double> fii{0.0, 1.0}, fjj{0.0, 1.0};
  const auto c = squared_coherence(fij, fii, fjj);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 1.0);
}

TEST_CASE("independent noise has coherence near 1/(2m+1)", "[coherence]") {
  std::mt19937_64 rng(21);
  const auto kernel = SmoothingKernel::uniform(9);
  double sum = 0.0;
  std::size_t count = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto dx = fourier_coefficients(white(rng, 7680));
    const auto dy = fourier_coefficients(white(rng, 7680));
    const auto c = squared_coherence(smoothed_cross_spectrum(dx, dy, kernel),
                                     real_part(smoothed_cross_spectrum(dx, dx, kernel)),
                                     real_part(smoothed_cross_spectrum(dy, dy, kernel)));
    for (double v : c) sum += v;
    count += c.size();
  }
  CHECK_THAT(sum / count, WithinRel(1.0 / 9.0, 0.5));
}

TEST_CASE("coherence distance examples", "[coherence]") {
  CHECK(coherence_distance(1.0) == 0.0);
  CHECK(coherence_distance(0.0) == 1.0);
  CHECK(coherence_distance(0.25) == 0.75);
}

TEST_CASE("band_average examples", "[bands]") {
  DistanceSpectrum spec;
  spec.channels = 2;
  spec.freqs_hz = {0.0, 1.0, 2.0, 5.0};
  auto pair = [](double d) {
    SquareMatrix m(2);
    m(0, 1) = m(1, 0) = d;
    return m;
  };
  spec.per_bin = {pair(0.9), pair(0.2), pair(0.4), pair(0.7)};
  const auto m = band_average(spec, 0.5, 4.0);
  CHECK_THAT(m(0, 1), WithinAbs(0.3, 1e-15));
  CHECK(m(0, 0) == 0.0);
  CHECK(m.is_symmetric());

  spec.per_bin = {pair(0.6), pair(0.6), pair(0.6), pair(0.6)};
  CHECK_THAT(band_average(spec, 0.5, 10.0)(1, 0), WithinAbs(0.6, 1e-15));

  try {
    band_average(spec, 2.5, 4.0);
    FAIL("expected an empty-band error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyBand);
  }
}

TEST_CASE("7-channel epoch yields five symmetric 7x7 band matrices", "[bands]") {
  std::mt19937_64 rng(4);
  std::vector<std::vector<double>> ch;
  const auto common = white(rng, 7680);
  for (int c = 0; c < 7; ++c) {
    auto x = white(rng, 7680);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.5 * c * common[t];
    ch.push_back(std::move(x));
  }
  const Epoch epoch{MultichannelSignal(ch, 256), 30.0, Stage::NREM2, 4};
  const auto mats = epoch_band_matrices(epoch, SmoothingKernel::modified_daniell(4));
  REQUIRE(mats.size() == 5);
  for (std::size_t b = 0; b < 5; ++b) {
    CHECK(mats[b].band == kAllBands[b]);
    CHECK(mats[b].values.size() == 7);
    CHECK(mats[b].values.is_symmetric());
    CHECK(mats[b].values.has_zero_diagonal());
    CHECK(mats[b].epoch_index == 4);
    CHECK(mats[b].stage == Stage::NREM2);
    for (double v : mats[b].values.data()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  // Channels 5 and 6 share much more of the common signal than 0 and 1.
  CHECK(mats[0].values(5, 6) < mats[0].values(0, 1));
}

TEST_CASE("band matrices are equivariant under channel permutation", "[bands]") {
  std::mt19937_64 rng(8);
  std::vector<std::vector<double>> ch;
  const auto common = white(rng, 2048);
  for (int c = 0; c < 5; ++c) {
    auto x = white(rng, 2048);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.3 * c * common[t];
    ch.push_back(std::move(x));
  }
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  std::vector<std::vector<double>> permuted;
  for (auto p : perm) permuted.push_back(ch[p]);
  const auto kernel = SmoothingKernel::modified_daniell(4);
  const auto a = distance_spectrum(MultichannelSignal(ch, 256), kernel, 50.0);
  const auto b = distance_spectrum(MultichannelSignal(permuted, 256), kernel, 50.0);
  for (Band band : kAllBands) {
    const auto ma = band_average(a, BandEdges{}, band).values;
    const auto mb = band_average(b, BandEdges{}, band).values;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) REQUIRE(mb(i, j) == ma(perm[i], perm[j]));
  }
}
