#include "leakwave/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "leakwave/errors.hpp"
#include "leakwave/fft.hpp"

namespace leakwave {

namespace {

struct SampleRange {
  std::size_t first;
  std::size_t last;  // inclusive
  std::size_t size() const { return last - first + 1; }
};

// Gate [start, end] in seconds relative to sample index `origin`.
SampleRange gate_range(std::size_t length, double sample_rate, long long origin, double start, double end) {
  const long long n0 = origin + std::llround(start * sample_rate);
  long long n1 = origin + std::llround(end * sample_rate);
  const auto n = static_cast<long long>(length);
  if (n1 == n) n1 = n - 1;  // gate ending at the trace's end time
  if (n0 < 0 || n1 >= n) {
    throw GatingError("gate [" + std::to_string(start) + ", " + std::to_string(end) +
                      "] s extends beyond the trace");
  }
  if (n1 < n0) throw GatingError("gate holds no samples");
  return {static_cast<std::size_t>(n0), static_cast<std::size_t>(n1)};
}

std::vector<double> taper_weights(std::size_t n, Taper taper) {
  if (taper == Taper::hann) return hann_symmetric(n);
  return std::vector<double>(n, 1.0);
}

void require_same_grid(const Spectrum& a, const Spectrum& b, const char* op) {
  if (a.frequencies.size() != b.frequencies.size()) {
    throw ShapeError(std::string(op) + ": spectra have " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()) + " bins");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double fa = a.frequencies[i], fb = b.frequencies[i];
    if (std::abs(fa - fb) > 1e-12 * std::max({1.0, std::abs(fa), std::abs(fb)})) {
      throw ShapeError(std::string(op) + ": frequency grids differ at bin " + std::to_string(i));
    }
  }
}

bool passes_floor(const std::optional<Spectrum>& floor, std::size_t i, double level, double snr_db) {
  if (!floor) return true;
  if (!floor->valid[i]) return false;
  return level > floor->real_at(i) * std::pow(10.0, snr_db / 10.0);
}

// Blocks of a Welch estimate as windowed spectra.
template <typename PerBlock>
void for_each_block(std::size_t n, const WelchConfig& cfg, PerBlock&& per_block) {
  const std::size_t hop = cfg.hop();
  for (std::size_t start = 0; start + cfg.block_size <= n; start += hop) per_block(start);
}

double one_sided_factor(std::size_t k, std::size_t block) {
  const bool nyquist = block % 2 == 0 && k == block / 2;
  return (k == 0 || nyquist) ? 1.0 : 2.0;
}

}  // namespace

void GateSpec::validate() const {
  if (!std::isfinite(window_start) || !std::isfinite(window_end) || !(window_end > window_start)) {
    throw GatingError("gate: window_end must exceed window_start");
  }
}

std::size_t WelchConfig::hop() const {
  const auto overlap = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(block_size)));
  return std::max<std::size_t>(1, block_size - overlap);
}

void WelchConfig::validate() const {
  if (block_size < 16) throw ShapeError("welch: block_size must be >= 16");
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.95)) {
    throw ShapeError("welch: overlap_fraction must lie in [0, 0.95]");
  }
}

void TwoMicLayout::validate() const {
  if (!(mic_spacing > 0.0)) throw ConfigurationError("two-mic layout: spacing must be positive");
  if (!(mic1_to_reference >= mic_spacing)) {
    throw ConfigurationError("two-mic layout: mic 1 must be at least one spacing from the reference plane");
  }
  if (!(sin_floor >= 0.0 && sin_floor < 1.0)) throw ConfigurationError("two-mic layout: sin_floor in [0, 1)");
  medium.validate();
}

void PulseTrain::validate() const {
  if (count < 1) throw GatingError("pulse train: count must be >= 1");
  if (!(period > 0.0)) throw GatingError("pulse train: period must be positive");
}

PressureTrace gate_pulse(const PressureTrace& trace, const GateSpec& gate, double energy_floor) {
  gate.validate();
  const double t0 = trace.start_time;
  const SampleRange range =
      gate_range(trace.size(), trace.sample_rate, 0, gate.window_start - t0, gate.window_end - t0);
  const auto w = taper_weights(range.size(), gate.taper);
  std::vector<double> out(trace.size(), 0.0);
  for (std::size_t i = 0; i < range.size(); ++i) out[range.first + i] = w[i] * trace.samples[range.first + i];
  PressureTrace gated(std::move(out), trace.sample_rate, trace.start_time);
  const double total = trace.energy();
  if (!(gated.energy() > 0.0) || !(gated.energy() > energy_floor * total)) {
    throw GatingError("gate keeps " + std::to_string(total > 0.0 ? gated.energy() / total : 0.0) +
                      " of the trace energy, below the floor " + std::to_string(energy_floor));
  }
  return gated;
}

PressureTrace crop(const PressureTrace& trace, const GateSpec& gate) {
  gate.validate();
  const double t0 = trace.start_time;
  const SampleRange range =
      gate_range(trace.size(), trace.sample_rate, 0, gate.window_start - t0, gate.window_end - t0);
  const auto first = trace.samples.begin() + static_cast<std::ptrdiff_t>(range.first);
  return PressureTrace({first, first + static_cast<std::ptrdiff_t>(range.size())}, trace.sample_rate,
                       trace.time_at(range.first));
}

std::vector<PressureTrace> separate_pulses(const PressureTrace& recording, const PulseTrain& train,
                                           const GateSpec& gate) {
  train.validate();
  gate.validate();
  std::vector<PressureTrace> pulses;
  pulses.reserve(static_cast<std::size_t>(train.count));
  for (int p = 0; p < train.count; ++p) {
    const double pulse_time = train.first_pulse_time + p * train.period;
    const long long origin = std::llround((pulse_time - recording.start_time) * recording.sample_rate);
    const SampleRange range =
        gate_range(recording.size(), recording.sample_rate, origin, gate.window_start, gate.window_end);
    const auto first = recording.samples.begin() + static_cast<std::ptrdiff_t>(range.first);
    // Segments share a pulse-relative time axis so they can be averaged.
    pulses.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(range.size())),
                        recording.sample_rate, gate.window_start);
  }
  return pulses;
}

PressureTrace ensemble_average(std::span<const PressureTrace> pulses, Taper taper) {
  if (pulses.empty()) throw ShapeError("ensemble_average: no pulses");
  const std::size_t n = pulses.front().size();
  const double fs = pulses.front().sample_rate;
  for (std::size_t p = 1; p < pulses.size(); ++p) {
    if (pulses[p].size() != n || pulses[p].sample_rate != fs) {
      throw ShapeError("ensemble_average: pulse " + std::to_string(p) + " differs in length or sample rate");
    }
  }
  const auto w = taper_weights(n, taper);
  std::vector<double> mean(n, 0.0);
  for (const auto& pulse : pulses) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += w[i] * pulse.samples[i];
  }
  const double scale = 1.0 / static_cast<double>(pulses.size());
  for (auto& v : mean) v *= scale;
  return PressureTrace(std::move(mean), fs, pulses.front().start_time);
}

PressureTrace embed_centered(const PressureTrace& segment, std::size_t record_length) {
  if (segment.size() > record_length) {
    throw ShapeError("embed_centered: segment of " + std::to_string(segment.size()) +
                     " samples does not fit a record of " + std::to_string(record_length));
  }
  const std::size_t offset = record_length / 2 - segment.size() / 2;
  std::vector<double> record(record_length, 0.0);
  std::copy(segment.samples.begin(), segment.samples.end(), record.begin() + static_cast<std::ptrdiff_t>(offset));
  return PressureTrace(std::move(record), segment.sample_rate,
                       segment.start_time - static_cast<double>(offset) / segment.sample_rate);
}

Spectrum welch_cross_spectrum(const PressureTrace& x, const PressureTrace& y, const WelchConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size() || x.sample_rate != y.sample_rate) {
    throw ShapeError("welch: traces differ in length or sample rate");
  }
  if (x.size() < cfg.block_size) {
    throw ShapeError("welch: trace of " + std::to_string(x.size()) + " samples is shorter than one block of " +
                     std::to_string(cfg.block_size));
  }
  const std::size_t block = cfg.block_size;
  const auto w = hann_periodic(block);
  double window_power = 0.0;
  for (double v : w) window_power += v * v;

  const bool same = &x == &y;
  std::vector<cdouble> acc(block / 2 + 1, 0.0);
  std::vector<double> bx(block), by(block);
  std::size_t blocks = 0;
  for_each_block(x.size(), cfg, [&](std::size_t start) {
    for (std::size_t i = 0; i < block; ++i) bx[i] = w[i] * x.samples[start + i];
    const auto X = rfft(bx);
    if (same) {
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(X[k]);
    } else {
      for (std::size_t i = 0; i < block; ++i) by[i] = w[i] * y.samples[start + i];
      const auto Y = rfft(by);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::conj(X[k]) * Y[k];
    }
    ++blocks;
  });
  const double scale = 1.0 / (x.sample_rate * window_power * static_cast<double>(blocks));
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] *= scale * one_sided_factor(k, block);
  return Spectrum(rfft_frequencies(block, x.sample_rate), std::move(acc),
                  same ? SpectrumKind::psd : SpectrumKind::pressure_amplitude);
}

Spectrum welch_psd(const PressureTrace& trace, const WelchConfig& cfg) {
  return welch_cross_spectrum(trace, trace, cfg);
}

Spectrum transfer_function(const PressureTrace& x, const PressureTrace& y, const WelchConfig& cfg) {
  const Spectrum gxx = welch_psd(x, cfg);
  Spectrum gxy = welch_cross_spectrum(x, y, cfg);
  for (std::size_t k = 0; k < gxy.size(); ++k) {
    if (gxx.real_at(k) > 0.0) {
      gxy.values[k] /= gxx.real_at(k);
    } else {
      gxy.values[k] = 0.0;
      gxy.valid[k] = false;
    }
  }
  return gxy;
}

Spectrum pulse_psd(const PressureTrace& recording, const PulseTrain& train, const GateSpec& gate,
                   const WelchConfig& cfg, std::size_t record_length) {
  cfg.validate();
  const auto pulses = separate_pulses(recording, train, gate);
  const PressureTrace averaged = ensemble_average(pulses, gate.taper);
  const PressureTrace record = embed_centered(averaged, record_length == 0 ? cfg.block_size : record_length);
  return welch_psd(record, cfg);
}

Spectrum power_ratio(const Spectrum& numerator, const Spectrum& denominator,
                     const std::optional<Spectrum>& noise_floor, double snr_db) {
  require_same_grid(numerator, denominator, "power_ratio");
  if (noise_floor) require_same_grid(denominator, *noise_floor, "power_ratio (noise floor)");
  Spectrum out(numerator.frequencies, std::vector<cdouble>(numerator.size(), 0.0), SpectrumKind::power_coefficient);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double num = numerator.real_at(i), den = denominator.real_at(i);
    out.valid[i] = numerator.valid[i] && denominator.valid[i] && den > 0.0 && num >= 0.0 &&
                   passes_floor(noise_floor, i, den, snr_db);
    if (out.valid[i]) out.values[i] = num / den;
  }
  return out;
}

Spectrum tl_from_psd(const Spectrum& incident, const Spectrum& transmitted, const std::optional<Spectrum>& noise_floor,
                     double snr_db) {
  require_same_grid(incident, transmitted, "tl_from_psd");
  if (noise_floor) require_same_grid(incident, *noise_floor, "tl_from_psd (noise floor)");
  Spectrum out(incident.frequencies, std::vector<cdouble>(incident.size(), 0.0), SpectrumKind::decibel);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double in = incident.real_at(i), tr = transmitted.real_at(i);
    out.valid[i] = incident.valid[i] && transmitted.valid[i] && in > 0.0 && tr > 0.0 &&
                   passes_floor(noise_floor, i, in, snr_db);
    if (out.valid[i]) out.values[i] = 10.0 * (std::log10(in) - std::log10(tr));
  }
  return out;
}

TwoMicResult two_mic_decompose(const Spectrum& p1, const Spectrum& p2, const TwoMicLayout& layout) {
  layout.validate();
  require_same_grid(p1, p2, "two_mic_decompose");
  const std::size_t n = p1.size();
  const cdouble i1{0.0, 1.0};
  const std::vector<cdouble> zeros(n, 0.0);
  TwoMicResult r{Spectrum(p1.frequencies, zeros, SpectrumKind::pressure_amplitude),
                 Spectrum(p1.frequencies, zeros, SpectrumKind::pressure_amplitude),
                 Spectrum(p1.frequencies, zeros, SpectrumKind::pressure_amplitude),
                 Spectrum(p1.frequencies, zeros, SpectrumKind::power_coefficient)};
  const double s = layout.mic_spacing, l1 = layout.mic1_to_reference;
  for (std::size_t b = 0; b < n; ++b) {
    bool ok = p1.valid[b] && p2.valid[b] && p1.frequencies[b] > 0.0;
    const double k = 2.0 * kPi * p1.frequencies[b] / layout.medium.sound_speed;
    ok = ok && std::abs(std::sin(k * s)) >= layout.sin_floor;
    if (ok && p1.values[b] == cdouble(0.0)) {
      throw DecompositionError("two_mic_decompose: zero pressure at mic 1, bin " + std::to_string(b));
    }
    cdouble R = 0.0, incident = 0.0;
    if (ok) {
      const cdouble h12 = p2.values[b] / p1.values[b];
      const cdouble den = std::exp(i1 * k * s) - h12;
      ok = std::abs(den) > 0.0;
      if (ok) {
        R = std::exp(2.0 * i1 * k * l1) * (h12 - std::exp(-i1 * k * s)) / den;
        const cdouble field = std::exp(i1 * k * l1) + R * std::exp(-i1 * k * l1);
        ok = std::abs(field) > 1e-12 * std::max(1.0, std::abs(R)) && std::isfinite(std::abs(R));
        if (ok) incident = p1.values[b] / field;
      }
    }
    for (Spectrum* sp : {&r.incident, &r.reflected, &r.reflection, &r.power_reflection}) sp->valid[b] = ok;
    if (!ok) continue;
    r.reflection.values[b] = R;
    r.power_reflection.values[b] = std::norm(R);
    r.incident.values[b] = incident;
    r.reflected.values[b] = R * incident;
  }
  return r;
}

double interpolate_power_coefficient(const Spectrum& spectrum, double frequency) {
  const auto& f = spectrum.frequencies;
  if (f.empty() || !(frequency >= f.front() && frequency <= f.back())) {
    throw InterpolationError("interpolate: " + std::to_string(frequency) + " Hz outside the spectrum");
  }
  const auto hi_it = std::lower_bound(f.begin(), f.end(), frequency);
  const auto hi = static_cast<std::size_t>(hi_it - f.begin());
  if (f[hi] == frequency) {
    if (!spectrum.valid[hi]) throw InterpolationError("interpolate: bin at " + std::to_string(frequency) + " Hz is invalid");
    return spectrum.real_at(hi);
  }
  const std::size_t lo = hi - 1;
  if (!spectrum.valid[lo] || !spectrum.valid[hi]) {
    throw InterpolationError("interpolate: a bin bracketing " + std::to_string(frequency) + " Hz is invalid");
  }
  const double t = (frequency - f[lo]) / (f[hi] - f[lo]);
  return (1.0 - t) * spectrum.real_at(lo) + t * spectrum.real_at(hi);
}

Spectrum absorption_from_reflection(const Spectrum& power_reflection, double tolerance) {
  Spectrum out(power_reflection.frequencies, std::vector<cdouble>(power_reflection.size(), 0.0),
               SpectrumKind::power_coefficient);
  out.valid = power_reflection.valid;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.valid[i]) out.values[i] = absorption_coefficient(power_reflection.real_at(i), 0.0, tolerance);
  }
  return out;
}

Spectrum absorption_from_coefficients(const Spectrum& power_reflection, const Spectrum& power_transmission,
                                      double tolerance) {
  require_same_grid(power_reflection, power_transmission, "absorption_from_coefficients");
  Spectrum out(power_reflection.frequencies, std::vector<cdouble>(power_reflection.size(), 0.0),
               SpectrumKind::power_coefficient);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.valid[i] = power_reflection.valid[i] && power_transmission.valid[i];
    if (out.valid[i]) {
      out.values[i] =
          absorption_coefficient(power_reflection.real_at(i), power_transmission.real_at(i), tolerance);
    }
  }
  return out;
}

}  // namespace leakwave
