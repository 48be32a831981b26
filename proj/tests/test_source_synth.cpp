#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "leakwave/errors.hpp"
#include "leakwave/fft.hpp"
#include "leakwave/sigproc.hpp"
#include "leakwave/synth.hpp"

using namespace leakwave;

namespace {

double peak_of(const PressureTrace& t) {
  double p = 0.0;
  for (double v : t.samples) p = std::max(p, std::abs(v));
  return p;
}

// Mean PSD over [lo, hi).
double band_psd(const Spectrum& psd, double lo, double hi) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < psd.size(); ++i) {
    if (psd.frequencies[i] >= lo && psd.frequencies[i] < hi) {
      sum += psd.real_at(i);
      ++n;
    }
  }
  return sum / n;
}

}  // namespace

TEST_CASE("band layout") {
  const auto bands = band_layout(100, 1.01, 1e4);
  REQUIRE(bands.size() == 100);
  CHECK(bands[0].width == doctest::Approx(58.657431253905181).epsilon(1e-12));
  double total = 0.0;
  for (std::size_t j = 0; j < bands.size(); ++j) {
    total += bands[j].width;
    if (j > 0) CHECK(bands[j].width / bands[j - 1].width == doctest::Approx(1.01));
  }
  CHECK(total == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(bands[0].center == doctest::Approx(0.5 * bands[0].width));
  const auto uniform = band_layout(4, 1.0, 100.0, 50.0);
  CHECK(uniform[0].width == doctest::Approx(25.0));
  CHECK(uniform[3].center == doctest::Approx(137.5));
  CHECK_THROWS_AS(band_layout(0, 1.01, 1e4), DomainError);
  CHECK_THROWS_AS(band_layout(10, 0.9, 1e4), DomainError);
}

TEST_CASE("broadband presets") {
  const auto formula = broadband_preset(BroadbandPreset::geometric_10k, 120.0, 1);
  CHECK(formula.bands()[0].width == doctest::Approx(58.657431253905181).epsilon(1e-9));
  CHECK(formula.target_oispl() == doctest::Approx(120.0).epsilon(1e-12));
  const auto constants = broadband_preset(BroadbandPreset::first_band_500, 120.0, 1);
  CHECK(constants.bands()[0].width == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(constants.total_bandwidth == doctest::Approx(85240.691471076305).epsilon(1e-10));
  // The band set reaches ~85 kHz and cannot be sampled at 51.2 kHz.
  CHECK_THROWS_AS(synthesize_broadband(constants, kDefaultSampleRate, 0.1), ConfigurationError);
}

TEST_CASE("broadband level and flatness") {
  for (double target : {120.0, 150.0}) {
    const auto spec = broadband_preset(BroadbandPreset::geometric_10k, target, 7);
    for (double phase : spec.phases) CHECK((phase >= 0.0 && phase <= kPi));
    const PressureTrace t = synthesize_broadband(spec, kDefaultSampleRate, 4.0);
    CHECK(std::abs(ispl(t.rms()) - target) < 0.5);
    const Spectrum psd = welch_psd(t, WelchConfig{});
    const double level = spec.spectrum_levels[0];
    for (double lo = 1000.0; lo < 6000.0; lo += 1000.0) {
      CHECK(std::abs(10.0 * std::log10(band_psd(psd, lo, lo + 1000.0) / level)) < 1.0);
    }
  }
}

TEST_CASE("broadband determinism") {
  const auto a = synthesize_broadband(broadband_preset(BroadbandPreset::geometric_10k, 120.0, 3), 51200.0, 0.5);
  const auto b = synthesize_broadband(broadband_preset(BroadbandPreset::geometric_10k, 120.0, 3), 51200.0, 0.5);
  const auto c = synthesize_broadband(broadband_preset(BroadbandPreset::geometric_10k, 120.0, 4), 51200.0, 0.5);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("broadband spec validation") {
  auto spec = BroadbandSpec::flat(10, 1.0, 1000.0, 100.0, 1);
  CHECK_NOTHROW(spec.validate());
  spec.phases[0] = 4.0;
  CHECK_THROWS_AS(spec.validate(), ConfigurationError);
  spec = BroadbandSpec::flat(10, 1.0, 1000.0, 100.0, 1);
  spec.spectrum_levels.pop_back();
  CHECK_THROWS_AS(spec.validate(), ConfigurationError);
}

TEST_CASE("tone") {
  const PressureTrace t = synthesize_tone(1000.0, 94.0, kDefaultSampleRate, 1.0);
  CHECK(t.rms() == doctest::Approx(1.0023744672545446).epsilon(1e-9));
  CHECK(synthesize_tone(1000.0, 150.0, kDefaultSampleRate, 1.0).rms() ==
        doctest::Approx(632.45553203367587).epsilon(1e-9));
  CHECK_THROWS_AS(synthesize_tone(30000.0, 94.0, kDefaultSampleRate, 1.0), ConfigurationError);
}

TEST_CASE("impulse presets") {
  const double peaks[] = {140.0, 147.5, 159.9, 167.9};
  const int nominal[] = {120, 130, 140, 150};
  for (int i = 0; i < 4; ++i) {
    const auto spec = impulse_preset(nominal[i]);
    const PressureTrace t = synthesize_impulse(spec, kDefaultSampleRate, 0.02);
    CHECK(std::abs(20.0 * std::log10(peak_of(t) / kReferencePressure) - peaks[i]) < 1.0);
  }
  CHECK_THROWS_AS(impulse_preset(125), DomainError);
}

TEST_CASE("impulse shape") {
  ImpulseSpec spec = impulse_preset(120);
  const double fs = 512000.0;
  const PressureTrace t = synthesize_impulse(spec, fs, 0.01);
  // Peak sits on the snapped centre sample.
  const auto it = std::max_element(t.samples.begin(), t.samples.end());
  CHECK(t.time_at(static_cast<std::size_t>(it - t.samples.begin())) == doctest::Approx(spec.center_time).epsilon(1e-9));
  CHECK(*it == doctest::Approx(spec.peak_pressure));
  // Full width at half maximum.
  const std::size_t above = std::count_if(t.samples.begin(), t.samples.end(),
                                          [&](double v) { return v >= 0.5 * spec.peak_pressure; });
  CHECK(static_cast<double>(above) / fs == doctest::Approx(spec.width).epsilon(0.02));
  // Amplitude spectrum halves near 0.44 / width.
  const auto X = rfft(t.samples);
  const auto f = rfft_frequencies(t.size(), fs);
  const std::size_t bin = static_cast<std::size_t>(std::lround(0.44 / spec.width / (f[1] - f[0])));
  CHECK(std::abs(X[bin]) / std::abs(X[0]) == doctest::Approx(0.5).epsilon(0.02));

  spec.shape = ImpulseShape::hann_burst;
  const PressureTrace h = synthesize_impulse(spec, fs, 0.01);
  CHECK(peak_of(h) == doctest::Approx(spec.peak_pressure).epsilon(1e-9));
  spec.width = 1e-5;
  CHECK_THROWS_AS(synthesize_impulse(spec, kDefaultSampleRate, 0.01), ConfigurationError);
}

TEST_CASE("pulse train") {
  const auto spec = impulse_preset(120);
  const PressureTrace t = synthesize_pulse_train(spec, 5, 0.04, kDefaultSampleRate, 0.2);
  const PressureTrace one = synthesize_impulse(spec, kDefaultSampleRate, 0.2);
  CHECK(t.energy() == doctest::Approx(5.0 * one.energy()).epsilon(1e-9));
  const std::size_t shift = static_cast<std::size_t>(std::lround(0.04 * kDefaultSampleRate));
  CHECK(t.samples[2048 - 1 + 0] == doctest::Approx(t.samples[2048 - 1 + shift]));
  CHECK_THROWS_AS(synthesize_pulse_train(spec, 10, 0.04, kDefaultSampleRate, 0.2), ConfigurationError);
}

TEST_CASE("white noise") {
  const PressureTrace silent(std::vector<double>(200000, 0.0), kDefaultSampleRate);
  const PressureTrace n1 = add_white_noise(silent, 0.01, 1);
  const PressureTrace n2 = add_white_noise(silent, 0.01, 1);
  CHECK(n1.samples == n2.samples);
  CHECK(n1.rms() == doctest::Approx(0.01).epsilon(0.01));
  CHECK(add_white_noise(silent, 0.01, 2).samples != n1.samples);
  CHECK_THROWS_AS(add_white_noise(silent, -1.0, 1), ConfigurationError);
}
