#include "leakwave/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>

#include "leakwave/errors.hpp"

namespace leakwave {

namespace {

std::size_t sample_count(double sample_rate, double duration) {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ConfigurationError("sample_rate must be positive");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigurationError("duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  if (n == 0) throw ConfigurationError("duration shorter than one sample");
  return n;
}

// Adds one pulse to `samples`. u is the offset from the centre in half-widths
// (+-1 at half maximum); the gaussian underflows to exactly zero beyond
// |u| ~ 33, so evaluation stops at |u| = 40.
void add_pulse(std::vector<double>& samples, const ImpulseSpec& spec, double sample_rate) {
  const double center = std::round(spec.center_time * sample_rate);
  const double half_width_samples = 0.5 * spec.width * sample_rate;
  const double reach = 40.0 * half_width_samples;
  const auto lo = static_cast<std::ptrdiff_t>(std::max(0.0, std::floor(center - reach)));
  const auto hi = static_cast<std::ptrdiff_t>(
      std::min(static_cast<double>(samples.size()) - 1.0, std::ceil(center + reach)));
  for (std::ptrdiff_t i = lo; i <= hi; ++i) {
    const double u = (static_cast<double>(i) - center) / half_width_samples;
    switch (spec.shape) {
      case ImpulseShape::gaussian:
        samples[static_cast<std::size_t>(i)] += spec.peak_pressure * std::exp(-std::log(2.0) * u * u);
        break;
      case ImpulseShape::hann_burst:
        // Raised cosine spanning two widths.
        if (std::abs(u) < 2.0) {
          samples[static_cast<std::size_t>(i)] += spec.peak_pressure * 0.5 * (1.0 + std::cos(kPi * u / 2.0));
        }
        break;
    }
  }
}

}  // namespace

std::vector<Band> band_layout(int band_count, double growth_ratio, double total_bandwidth, double base_frequency) {
  if (band_count < 1) throw DomainError("band_layout: band_count must be >= 1");
  if (!(growth_ratio >= 1.0) || !std::isfinite(growth_ratio)) {
    throw DomainError("band_layout: growth_ratio must be >= 1");
  }
  if (!(total_bandwidth > 0.0) || !std::isfinite(total_bandwidth)) {
    throw DomainError("band_layout: total_bandwidth must be positive");
  }
  if (!(base_frequency >= 0.0)) throw DomainError("band_layout: base_frequency must be non-negative");

  const double first = growth_ratio == 1.0
                           ? total_bandwidth / band_count
                           : total_bandwidth * (growth_ratio - 1.0) / (std::pow(growth_ratio, band_count) - 1.0);
  std::vector<Band> bands(static_cast<std::size_t>(band_count));
  double width = first;
  double edge = base_frequency;
  for (auto& b : bands) {
    b.width = width;
    b.center = edge + 0.5 * width;
    edge += width;
    width *= growth_ratio;
  }
  return bands;
}

double BroadbandSpec::target_mean_square() const {
  const auto layout = bands();
  double sum = 0.0;
  for (std::size_t j = 0; j < layout.size(); ++j) sum += layout[j].width * spectrum_levels.at(j);
  return sum;
}

void BroadbandSpec::validate() const {
  if (band_count < 1) throw ConfigurationError("broadband: band_count must be >= 1");
  if (!(growth_ratio >= 1.0)) throw ConfigurationError("broadband: growth_ratio must be >= 1");
  const auto n = static_cast<std::size_t>(band_count);
  if (spectrum_levels.size() != n || phases.size() != n) {
    throw ConfigurationError("broadband: need " + std::to_string(n) + " spectrum levels and phases");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!(spectrum_levels[j] >= 0.0) || !std::isfinite(spectrum_levels[j])) {
      throw ConfigurationError("broadband: spectrum level " + std::to_string(j) + " must be non-negative");
    }
    if (!(phases[j] >= 0.0 && phases[j] <= kPi)) {
      throw ConfigurationError("broadband: phase " + std::to_string(j) + " outside [0, pi]");
    }
  }
}

BroadbandSpec BroadbandSpec::flat(int band_count, double growth_ratio, double total_bandwidth, double oispl_db,
                                  std::uint64_t seed, double base_frequency) {
  BroadbandSpec spec;
  spec.band_count = band_count;
  spec.growth_ratio = growth_ratio;
  spec.total_bandwidth = total_bandwidth;
  spec.base_frequency = base_frequency;
  spec.seed = seed;
  const double p = pressure_from_level(oispl_db);
  spec.spectrum_levels.assign(static_cast<std::size_t>(band_count), p * p / total_bandwidth);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, kPi);
  spec.phases.resize(static_cast<std::size_t>(band_count));
  for (auto& chi : spec.phases) chi = phase(rng);
  spec.validate();
  return spec;
}

BroadbandSpec broadband_preset(BroadbandPreset preset, double oispl_db, std::uint64_t seed) {
  constexpr int kBands = 100;
  constexpr double kRatio = 1.01;
  switch (preset) {
    case BroadbandPreset::geometric_10k:
      return BroadbandSpec::flat(kBands, kRatio, 1e4, oispl_db, seed);
    case BroadbandPreset::first_band_500: {
      const double bandwidth = 500.0 * (std::pow(kRatio, kBands) - 1.0) / (kRatio - 1.0);
      return BroadbandSpec::flat(kBands, kRatio, bandwidth, oispl_db, seed);
    }
  }
  throw DomainError("unknown broadband preset");
}

PressureTrace synthesize_broadband(const BroadbandSpec& spec, double sample_rate, double duration) {
  spec.validate();
  const std::size_t n = sample_count(sample_rate, duration);
  const auto layout = spec.bands();
  for (const auto& b : layout) {
    if (!(b.center < 0.5 * sample_rate)) {
      throw ConfigurationError("broadband: band centre " + std::to_string(b.center) +
                               " Hz is at or above Nyquist for " + std::to_string(sample_rate) + " Hz");
    }
  }
  std::vector<double> samples(n, 0.0);
  for (std::size_t j = 0; j < layout.size(); ++j) {
    const double amplitude = std::sqrt(2.0 * layout[j].width * spec.spectrum_levels[j]);
    const double omega = 2.0 * kPi * layout[j].center;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      samples[i] += amplitude * std::cos(omega * t + spec.phases[j]);
    }
  }
  return PressureTrace(std::move(samples), sample_rate);
}

ImpulseSpec impulse_preset(int nominal_oispl_db) {
  double peak_db = 0.0;
  switch (nominal_oispl_db) {
    case 120: peak_db = 140.0; break;
    case 130: peak_db = 147.5; break;
    case 140: peak_db = 159.9; break;
    case 150: peak_db = 167.9; break;
    default:
      throw DomainError("impulse_preset: no measured peak for nominal " + std::to_string(nominal_oispl_db) + " dB");
  }
  ImpulseSpec spec;
  spec.peak_pressure = pressure_from_level(peak_db);
  return spec;
}

PressureTrace synthesize_impulse(const ImpulseSpec& spec, double sample_rate, double duration) {
  const std::size_t n = sample_count(sample_rate, duration);
  if (!(spec.peak_pressure > 0.0) || !(spec.width > 0.0)) {
    throw ConfigurationError("impulse: peak pressure and width must be positive");
  }
  if (spec.width < 4.0 / sample_rate) {
    throw ConfigurationError("impulse: width " + std::to_string(spec.width) + " s is shorter than 4 samples");
  }
  if (!(spec.center_time >= 0.0) || spec.center_time > duration) {
    throw ConfigurationError("impulse: centre time outside the trace");
  }
  std::vector<double> samples(n, 0.0);
  add_pulse(samples, spec, sample_rate);
  return PressureTrace(std::move(samples), sample_rate);
}

PressureTrace synthesize_tone(double frequency, double level_db, double sample_rate, double duration) {
  const std::size_t n = sample_count(sample_rate, duration);
  if (!(frequency > 0.0) || !(frequency < 0.5 * sample_rate)) {
    throw ConfigurationError("tone: frequency " + std::to_string(frequency) + " Hz must lie in (0, Nyquist)");
  }
  const double amplitude = std::sqrt(2.0) * pressure_from_level(level_db);
  const double omega = 2.0 * kPi * frequency;
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = amplitude * std::sin(omega * static_cast<double>(i) / sample_rate);
  return PressureTrace(std::move(samples), sample_rate);
}

PressureTrace synthesize_pulse_train(const ImpulseSpec& spec, int count, double period, double sample_rate,
                                     double duration) {
  if (count < 1) throw ConfigurationError("pulse train: count must be >= 1");
  if (!(period > 0.0)) throw ConfigurationError("pulse train: period must be positive");
  const double last_center = spec.center_time + (count - 1) * period;
  if (last_center > duration) {
    throw ConfigurationError("pulse train: pulse " + std::to_string(count - 1) + " falls outside the trace");
  }
  PressureTrace train = synthesize_impulse(spec, sample_rate, duration);
  for (int p = 1; p < count; ++p) {
    ImpulseSpec shifted = spec;
    shifted.center_time = spec.center_time + p * period;
    add_pulse(train.samples, shifted, sample_rate);
  }
  return train;
}

PressureTrace add_white_noise(PressureTrace trace, double rms, std::uint64_t seed) {
  if (!(rms >= 0.0) || !std::isfinite(rms)) throw ConfigurationError("noise RMS must be non-negative");
  if (rms == 0.0) return trace;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, rms);
  for (auto& s : trace.samples) s += noise(rng);
  return trace;
}

}  // namespace leakwave
