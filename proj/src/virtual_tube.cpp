#include "leakwave/virtual_tube.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "leakwave/errors.hpp"
#include "leakwave/fft.hpp"

namespace leakwave {

namespace {

const cdouble kI{0.0, 1.0};

void require_port_grid(const TwoPort& port, const std::vector<double>& freqs) {
  if (port.frequencies.size() != freqs.size()) {
    throw ShapeError("two-port has " + std::to_string(port.frequencies.size()) + " bins, the source spectrum " +
                     std::to_string(freqs.size()));
  }
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (std::abs(port.frequencies[i] - freqs[i]) > 1e-9 * std::max(1.0, freqs[i])) {
      throw ShapeError("two-port frequency grid differs from the source spectrum at bin " + std::to_string(i));
    }
  }
}

}  // namespace

cdouble Termination::coefficient() const {
  switch (kind) {
    case TerminationKind::anechoic: return 0.0;
    case TerminationKind::rigid: return 1.0;
    case TerminationKind::reflection: return reflection;
  }
  return 0.0;
}

void TubeLayout::validate() const {
  for (double v : {bore_diameter, source_to_mic1, mic1_to_sample, sample_to_mic2, mic2_to_termination}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError("tube layout: lengths must be positive");
  }
  medium.validate();
  if (std::abs(termination.coefficient()) > 1.0 + 1e-12) {
    throw ConfigurationError("tube layout: termination reflection magnitude exceeds 1");
  }
  if (!(std::abs(source_reflection) < 1.0)) {
    throw ConfigurationError("tube layout: source reflection must be below 1 in magnitude");
  }
}

cdouble TubeLayout::duct_wavenumber(double frequency) const {
  if (frequency <= 0.0) return 0.0;
  if (include_duct_losses) return blackstock_wavenumber(medium, bore_diameter / 2.0, frequency);
  return 2.0 * kPi * frequency / medium.sound_speed;
}

double TubeLayout::max_path_delay() const {
  double path = std::max(source_to_mic1 + 2.0 * mic1_to_sample, source_to_mic1 + mic1_to_sample + sample_to_mic2);
  if (termination.coefficient() != cdouble(0.0)) {
    path = std::max(path, source_to_mic1 + mic1_to_sample + sample_to_mic2 + 2.0 * mic2_to_termination);
  }
  if (model == ReflectionModel::multi_bounce) {
    // At least one further round trip between source and termination.
    path += 2.0 * (source_to_mic1 + mic1_to_sample + sample_to_mic2 + mic2_to_termination);
  }
  return path / medium.sound_speed;
}

TwoPort TwoPort::constant(std::vector<double> frequencies, cdouble r, cdouble t) {
  TwoPort p;
  p.reflection.assign(frequencies.size(), r);
  p.transmission.assign(frequencies.size(), t);
  p.frequencies = std::move(frequencies);
  return p;
}

TwoPort TwoPort::identity(std::vector<double> frequencies) { return constant(std::move(frequencies), 0.0, 1.0); }

TwoPort TwoPort::rigid(std::vector<double> frequencies) { return constant(std::move(frequencies), 1.0, 0.0); }

cdouble TwoPort::reverse_reflection(std::size_t bin, cdouble k) const {
  return reflection[bin] * std::exp(2.0 * kI * k * length);
}

double TwoPort::max_power_sum() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    worst = std::max(worst, std::norm(reflection[i]) + area_ratio * std::norm(transmission[i]));
  }
  return worst;
}

void TwoPort::check_passive(double tolerance) const {
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double sum = std::norm(reflection[i]) + area_ratio * std::norm(transmission[i]);
    if (sum > 1.0 + tolerance) {
      throw EnergyViolation("two-port is active at " + std::to_string(frequencies[i]) +
                            " Hz: |r|^2 + (S3/S1)|t|^2 = " + std::to_string(sum));
    }
  }
}

TwoPort two_port_from_tmm(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
                          const TmmOptions& options) {
  geom.validate();
  medium.validate();
  TwoPort port;
  port.frequencies.assign(frequencies.begin(), frequencies.end());
  port.reflection.resize(frequencies.size());
  port.transmission.resize(frequencies.size());
  port.area_ratio = geom.area_inner / geom.area_outer;
  port.length = geom.effective_length();
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double f = frequencies[i];
    if (!(f >= 0.0) || !std::isfinite(f)) throw DomainError("two_port_from_tmm: negative frequency at bin " + std::to_string(i));
    if (i > 0 && !(f > frequencies[i - 1])) throw DomainError("two_port_from_tmm: frequencies must increase");
    cdouble k = 0.0;
    if (f > 0.0) k = options.viscous ? blackstock_wavenumber(medium, geom.radius, f) : 2.0 * kPi * f / medium.sound_speed;
    try {
      const WaveAmplitudes a = solve_amplitudes(geom, k);
      port.reflection[i] = a.B / a.A;
      port.transmission[i] = a.E / a.A;
    } catch (const Error& e) {
      throw BinError(i, e.what());
    }
  }
  return port;
}

MicResponses mic_responses(const TubeLayout& layout, const TwoPort& port) {
  layout.validate();
  const std::size_t n = port.frequencies.size();
  MicResponses out;
  out.frequencies = port.frequencies;
  out.mic1.resize(n);
  out.mic2.resize(n);
  out.incident_at_sample.resize(n);
  out.reflected_at_sample.resize(n);
  out.transmitted_at_sample.resize(n);

  // Sample plane at x = 0, mic 1 at -l1, mic 2 at +l2.
  const double l1 = layout.mic1_to_sample, l2 = layout.sample_to_mic2;
  const double to_source = layout.source_to_mic1 + l1;
  const double to_termination = l2 + layout.mic2_to_termination;
  const cdouble rt = layout.termination.coefficient();
  for (std::size_t b = 0; b < n; ++b) {
    const cdouble k = layout.duct_wavenumber(port.frequencies[b]);
    const cdouble r = port.reflection[b], t = port.transmission[b];
    const cdouble rho_t = rt * std::exp(-2.0 * kI * k * to_termination);
    cdouble P = std::exp(-kI * k * to_source);
    cdouble Q, U;
    if (layout.model == ReflectionModel::first_order) {
      Q = r * P;
      U = t * P;
    } else {
      const cdouble r_rev = port.reverse_reflection(b, k);
      const cdouble gamma = r + t * t * rho_t / (1.0 - r_rev * rho_t);
      const cdouble rho_s = layout.source_reflection * std::exp(-2.0 * kI * k * to_source);
      P /= (1.0 - rho_s * gamma);
      Q = gamma * P;
      U = t * P / (1.0 - r_rev * rho_t);
    }
    const cdouble V = rho_t * U;
    out.mic1[b] = P * std::exp(kI * k * l1) + Q * std::exp(-kI * k * l1);
    out.mic2[b] = U * std::exp(-kI * k * l2) + V * std::exp(kI * k * l2);
    out.incident_at_sample[b] = P;
    out.reflected_at_sample[b] = Q;
    out.transmitted_at_sample[b] = U;
  }
  return out;
}

MicTraces simulate_mic_traces(const TubeLayout& layout, const TwoPort& port, const PressureTrace& source) {
  layout.validate();
  source.validate();
  const std::size_t n = source.size();
  if (n < 2) throw ConfigurationError("simulate: source trace too short");
  if (!(layout.max_path_delay() < 0.5 * source.duration())) {
    throw ConfigurationError("simulate: modelled path delay " + std::to_string(layout.max_path_delay()) +
                             " s is not below half the trace duration " + std::to_string(0.5 * source.duration()) +
                             " s; arrivals would wrap around");
  }
  const auto freqs = rfft_frequencies(n, source.sample_rate);
  require_port_grid(port, freqs);
  const auto spectrum = rfft(source.samples);
  const MicResponses h = mic_responses(layout, port);
  std::vector<cdouble> s1(spectrum.size()), s2(spectrum.size());
  for (std::size_t b = 0; b < spectrum.size(); ++b) {
    s1[b] = spectrum[b] * h.mic1[b];
    s2[b] = spectrum[b] * h.mic2[b];
  }
  return {PressureTrace(irfft(s1, n), source.sample_rate, source.start_time),
          PressureTrace(irfft(s2, n), source.sample_rate, source.start_time)};
}

std::vector<cdouble> effective_reflection(const TubeLayout& layout, const TwoPort& port) {
  layout.validate();
  const double to_termination = layout.sample_to_mic2 + layout.mic2_to_termination;
  const cdouble rt = layout.termination.coefficient();
  std::vector<cdouble> gamma(port.frequencies.size());
  for (std::size_t b = 0; b < gamma.size(); ++b) {
    const cdouble k = layout.duct_wavenumber(port.frequencies[b]);
    const cdouble rho_t = rt * std::exp(-2.0 * kI * k * to_termination);
    const cdouble r = port.reflection[b], t = port.transmission[b];
    gamma[b] = r + t * t * rho_t / (1.0 - port.reverse_reflection(b, k) * rho_t);
  }
  return gamma;
}

std::pair<Spectrum, Spectrum> simulate_standing_wave(const TwoMicLayout& mics, cdouble reflection, double frequency) {
  mics.validate();
  if (!(frequency > 0.0)) throw ConfigurationError("standing wave: frequency must be positive");
  const double k = 2.0 * kPi * frequency / mics.medium.sound_speed;
  const auto field = [&](double x) { return std::exp(-kI * k * x) + reflection * std::exp(kI * k * x); };
  const double x1 = -mics.mic1_to_reference;
  const double x2 = -(mics.mic1_to_reference - mics.mic_spacing);
  return {Spectrum({frequency}, {field(x1)}, SpectrumKind::pressure_amplitude),
          Spectrum({frequency}, {field(x2)}, SpectrumKind::pressure_amplitude)};
}

std::pair<Spectrum, Spectrum> simulate_standing_wave(const TwoMicLayout& mics, cdouble reflection,
                                                     const PressureTrace& tone) {
  tone.validate();
  if (tone.size() < 4) throw ConfigurationError("standing wave: tone trace too short");
  const auto spectrum = rfft(tone.samples);
  std::size_t peak = 1;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (std::abs(spectrum[k]) > std::abs(spectrum[peak])) peak = k;
  }
  const double frequency = static_cast<double>(peak) * tone.sample_rate / static_cast<double>(tone.size());
  return simulate_standing_wave(mics, reflection, frequency);
}

}  // namespace leakwave
