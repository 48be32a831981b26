#include <doctest.h>

#include <cmath>
#include <random>

#include "leakwave/errors.hpp"
#include "leakwave/fft.hpp"
#include "leakwave/sigproc.hpp"
#include "leakwave/synth.hpp"
#include "leakwave/virtual_tube.hpp"

using namespace leakwave;

namespace {

PressureTrace noise(std::size_t n, double rms, std::uint64_t seed) {
  return add_white_noise(PressureTrace(std::vector<double>(n, 0.0), kDefaultSampleRate), rms, seed);
}

double variance(const PressureTrace& t) {
  double mean = 0.0;
  for (double v : t.samples) mean += v;
  mean /= static_cast<double>(t.size());
  double var = 0.0;
  for (double v : t.samples) var += (v - mean) * (v - mean);
  return var / static_cast<double>(t.size());
}

}  // namespace

TEST_CASE("fft round trip and windows") {
  const PressureTrace x = noise(1000, 1.0, 3);
  const auto X = rfft(x.samples);
  CHECK(X.size() == 501);
  const auto y = irfft(X, x.size());
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(x.samples[i]).epsilon(1e-12));
  const auto f = rfft_frequencies(1000, kDefaultSampleRate);
  CHECK(f[1] == 51.2);
  CHECK(f.back() == 25600.0);
  const auto hs = hann_symmetric(5);
  CHECK(hs[0] == 0.0);
  CHECK(hs[2] == doctest::Approx(1.0));
  CHECK(hs[4] == doctest::Approx(0.0));
  const auto hp = hann_periodic(4);
  CHECK(hp[2] == doctest::Approx(1.0));
  CHECK(hp[1] == doctest::Approx(0.5));
}

TEST_CASE("welch resolution and parseval") {
  const WelchConfig cfg;
  CHECK(cfg.resolution(kDefaultSampleRate) == 51.2);
  CHECK(cfg.hop() == 500);
  const PressureTrace x = noise(204800, 0.3, 11);
  const Spectrum psd = welch_psd(x, cfg);
  CHECK(psd.size() == 501);
  CHECK(psd.frequencies[1] - psd.frequencies[0] == 51.2);
  double power = 0.0;
  for (std::size_t i = 0; i < psd.size(); ++i) power += psd.real_at(i) * 51.2;
  CHECK(std::abs(power / variance(x) - 1.0) < 0.01);
}

TEST_CASE("welch of a tone") {
  const PressureTrace tone = synthesize_tone(1024.0, 94.0, kDefaultSampleRate, 2.0);
  const Spectrum psd = welch_psd(tone, WelchConfig{});
  std::size_t peak = 0;
  for (std::size_t i = 0; i < psd.size(); ++i) {
    if (psd.real_at(i) > psd.real_at(peak)) peak = i;
  }
  CHECK(psd.frequencies[peak] == doctest::Approx(1024.0));
  double power = 0.0;
  for (std::size_t i = 0; i < psd.size(); ++i) power += psd.real_at(i) * 51.2;
  CHECK(power == doctest::Approx(tone.rms() * tone.rms()).epsilon(0.01));
}

TEST_CASE("welch errors") {
  CHECK_THROWS_AS(welch_psd(noise(500, 1.0, 1), WelchConfig{}), ShapeError);
  CHECK_THROWS_AS(welch_psd(noise(5000, 1.0, 1), WelchConfig{8, 0.5}), ShapeError);
  CHECK_THROWS_AS(welch_psd(noise(5000, 1.0, 1), WelchConfig{1000, 0.99}), ShapeError);
  CHECK_THROWS_AS(welch_cross_spectrum(noise(5000, 1.0, 1), noise(4000, 1.0, 1), WelchConfig{}), ShapeError);
}

TEST_CASE("cross spectrum and transfer function") {
  const PressureTrace x = noise(102400, 1.0, 5);
  const Spectrum gxx = welch_cross_spectrum(x, x, WelchConfig{});
  const Spectrum psd = welch_psd(x, WelchConfig{});
  for (std::size_t i = 0; i < psd.size(); ++i) CHECK(gxx.values[i].real() == doctest::Approx(psd.real_at(i)));
  PressureTrace y = x;
  for (double& v : y.samples) v *= -2.0;
  const Spectrum h = transfer_function(x, y, WelchConfig{});
  for (std::size_t i = 1; i < h.size(); ++i) {
    CHECK(h.values[i].real() == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(std::abs(h.values[i].imag()) < 1e-9);
  }
}

TEST_CASE("gating") {
  const auto spec = impulse_preset(120);
  const PressureTrace t = synthesize_impulse(spec, kDefaultSampleRate, 0.02);
  const PressureTrace g = gate_pulse(t, GateSpec{0.0025, 0.0075, Taper::hann});
  CHECK(g.size() == t.size());
  CHECK(g.energy() == doctest::Approx(t.energy()).epsilon(1e-3));
  CHECK(g.samples.front() == 0.0);
  CHECK_THROWS_AS(gate_pulse(t, GateSpec{0.012, 0.018, Taper::hann}), GatingError);
  CHECK_THROWS_AS(gate_pulse(t, GateSpec{0.015, 0.03, Taper::hann}), GatingError);
  CHECK_THROWS_AS(gate_pulse(t, GateSpec{0.007, 0.006, Taper::hann}), GatingError);
  const PressureTrace c = crop(t, GateSpec{0.0025, 0.0075, Taper::rectangular});
  CHECK(c.start_time == doctest::Approx(0.0025).epsilon(1e-3));
  CHECK(c.energy() == doctest::Approx(t.energy()).epsilon(1e-6));
}

TEST_CASE("pulse separation and averaging") {
  const auto spec = impulse_preset(120);
  const PressureTrace clean = synthesize_pulse_train(spec, 20, 0.04, kDefaultSampleRate, 0.8);
  const PressureTrace noisy = add_white_noise(clean, 1.0, 9);
  const PulseTrain train{spec.center_time, 0.04, 20};
  const GateSpec gate{-0.0025, 0.0025, Taper::hann};
  const auto pulses = separate_pulses(noisy, train, gate);
  REQUIRE(pulses.size() == 20);
  for (const auto& p : pulses) CHECK(p.size() == pulses.front().size());
  const auto avg = ensemble_average(pulses);
  const auto clean_avg = ensemble_average(separate_pulses(clean, train, gate));
  double err = 0.0, single = 0.0;
  const auto one = ensemble_average(std::vector<PressureTrace>{pulses[0]});
  for (std::size_t i = 0; i < avg.size(); ++i) {
    err += std::pow(avg.samples[i] - clean_avg.samples[i], 2);
    single += std::pow(one.samples[i] - clean_avg.samples[i], 2);
  }
  // Averaging 20 pulses cuts noise power by ~20.
  CHECK(err < single / 10.0);
  CHECK_THROWS_AS(ensemble_average(std::vector<PressureTrace>{}), ShapeError);
  CHECK_THROWS_AS(separate_pulses(noisy, PulseTrain{spec.center_time, 0.04, 30}, gate), GatingError);

  const PressureTrace rec = embed_centered(avg, 1000);
  CHECK(rec.size() == 1000);
  CHECK_THROWS_AS(embed_centered(avg, 10), ShapeError);
}

TEST_CASE("tl from psd") {
  const Spectrum a = Spectrum::real({100.0, 200.0, 300.0}, std::vector<double>{1.0, 2.0, 4.0}, SpectrumKind::psd);
  const Spectrum b = Spectrum::real({100.0, 200.0, 300.0}, std::vector<double>{0.1, 2.0, 8.0}, SpectrumKind::psd);
  const Spectrum same = tl_from_psd(a, a);
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(same.real_at(i) == 0.0);
  const Spectrum ab = tl_from_psd(a, b), ba = tl_from_psd(b, a);
  CHECK(ab.real_at(0) == doctest::Approx(10.0));
  for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab.real_at(i) == -ba.real_at(i));
  const Spectrum floor = Spectrum::real(a.frequencies, std::vector<double>{0.05, 0.5, 0.1}, SpectrumKind::psd);
  const Spectrum masked = tl_from_psd(a, b, floor, 10.0);
  CHECK(masked.valid == std::vector<bool>{true, false, true});
  const Spectrum r = power_ratio(b, a, floor, 10.0);
  CHECK(r.real_at(2) == doctest::Approx(2.0));
  CHECK(r.valid[1] == false);
  const Spectrum other = Spectrum::real({1.0, 2.0}, std::vector<double>{1.0, 1.0}, SpectrumKind::psd);
  CHECK_THROWS_AS(tl_from_psd(a, other), ShapeError);
}

TEST_CASE("two-microphone inversion") {
  TwoMicLayout layout;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mag(0.0, 1.0), phase(-kPi, kPi), freq(200.0, 4500.0);
  int tested = 0;
  while (tested < 100) {
    const cdouble R = std::polar(mag(rng), phase(rng));
    const double f = freq(rng);
    const double k = 2.0 * kPi * f / layout.medium.sound_speed;
    if (std::abs(std::sin(k * layout.mic_spacing)) < layout.sin_floor) continue;
    const auto [p1, p2] = simulate_standing_wave(layout, R, f);
    const auto res = two_mic_decompose(p1, p2, layout);
    REQUIRE(res.reflection.valid[0]);
    CHECK(std::abs(res.reflection.values[0] - R) < 1e-6);
    CHECK(std::abs(res.incident.values[0] - cdouble(1.0)) < 1e-6);
    ++tested;
  }
}

TEST_CASE("two-microphone singular bins") {
  TwoMicLayout layout;
  // k s = pi at c0 / (2 s).
  const double f = layout.medium.sound_speed / (2.0 * layout.mic_spacing);
  const auto [p1, p2] = simulate_standing_wave(layout, cdouble(0.3, 0.1), f);
  const auto res = two_mic_decompose(p1, p2, layout);
  CHECK_FALSE(res.reflection.valid[0]);
  Spectrum zero = p1;
  zero.values[0] = 0.0;
  const auto [q1, q2] = simulate_standing_wave(layout, cdouble(0.3, 0.1), 1000.0);
  Spectrum z1 = q1;
  z1.values[0] = 0.0;
  CHECK_THROWS_AS(two_mic_decompose(z1, q2, layout), DecompositionError);
  TwoMicLayout bad = layout;
  bad.mic1_to_reference = 0.01;
  CHECK_THROWS_AS(two_mic_decompose(q1, q2, bad), ConfigurationError);
}

TEST_CASE("interpolation and absorption") {
  Spectrum r2 = Spectrum::real({1000.0, 1100.0, 1200.0}, std::vector<double>{0.2, 0.4, 0.5}, SpectrumKind::power_coefficient);
  CHECK(interpolate_power_coefficient(r2, 1050.0) == doctest::Approx(0.3));
  CHECK(interpolate_power_coefficient(r2, 1200.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(interpolate_power_coefficient(r2, 900.0), InterpolationError);
  r2.valid[1] = false;
  CHECK_THROWS_AS(interpolate_power_coefficient(r2, 1050.0), InterpolationError);
  r2.valid[1] = true;
  const Spectrum a = absorption_from_reflection(r2);
  CHECK(a.real_at(0) == doctest::Approx(0.8));
  const Spectrum t2 = Spectrum::real(r2.frequencies, std::vector<double>{0.1, 0.1, 0.1}, SpectrumKind::power_coefficient);
  CHECK(absorption_from_coefficients(r2, t2).real_at(2) == doctest::Approx(0.4));
  const Spectrum big = Spectrum::real(r2.frequencies, std::vector<double>{0.9, 0.9, 0.9}, SpectrumKind::power_coefficient);
  CHECK_THROWS_AS(absorption_from_coefficients(r2, big), EnergyViolation);
}
