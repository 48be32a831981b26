#include "leakwave/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "leakwave/errors.hpp"

namespace leakwave {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(v));
  }
}

}  // namespace

Medium Medium::air_standard() { return Medium{343.0, 1.204, 1.825e-5, 1.4, 0.71}; }

void Medium::validate() const {
  require_positive(sound_speed, "sound_speed");
  require_positive(density, "density");
  require_positive(prandtl, "prandtl");
  if (!(dynamic_viscosity >= 0.0) || !std::isfinite(dynamic_viscosity)) {
    throw DomainError("dynamic_viscosity must be non-negative");
  }
  if (!(specific_heat_ratio > 1.0) || !std::isfinite(specific_heat_ratio)) {
    throw DomainError("specific_heat_ratio must exceed 1");
  }
}

const char* to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::pressure_amplitude: return "pressure_amplitude";
    case SpectrumKind::psd: return "psd";
    case SpectrumKind::power_coefficient: return "power_coefficient";
    case SpectrumKind::decibel: return "decibel";
  }
  return "unknown";
}

Spectrum::Spectrum(std::vector<double> freqs, std::vector<cdouble> vals, SpectrumKind k)
    : frequencies(std::move(freqs)), values(std::move(vals)), valid(frequencies.size(), true), kind(k) {
  if (frequencies.size() != values.size()) {
    throw ShapeError("spectrum: " + std::to_string(frequencies.size()) + " frequencies but " +
                     std::to_string(values.size()) + " values");
  }
}

Spectrum Spectrum::real(std::vector<double> freqs, std::span<const double> vals, SpectrumKind k) {
  std::vector<cdouble> c(vals.begin(), vals.end());
  return Spectrum(std::move(freqs), std::move(c), k);
}

std::vector<double> Spectrum::real_values() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](cdouble v) { return v.real(); });
  return out;
}

std::size_t Spectrum::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

void Spectrum::validate(double tolerance) const {
  if (frequencies.size() != values.size() || valid.size() != values.size()) {
    throw ShapeError("spectrum: frequencies, values and flags differ in length");
  }
  for (std::size_t i = 1; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > frequencies[i - 1])) {
      throw ShapeError("spectrum: frequencies not strictly increasing at bin " + std::to_string(i));
    }
  }
  if (kind != SpectrumKind::psd && kind != SpectrumKind::power_coefficient) return;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!valid[i]) continue;
    const cdouble v = values[i];
    if (v.imag() != 0.0 || v.real() < 0.0) {
      throw DomainError("spectrum: bin " + std::to_string(i) + " of a " + to_string(kind) +
                        " spectrum must be real and non-negative");
    }
    if (kind == SpectrumKind::power_coefficient && v.real() > 1.0 + tolerance) {
      throw EnergyViolation("spectrum: power coefficient " + std::to_string(v.real()) + " at bin " +
                            std::to_string(i) + " exceeds 1 + " + std::to_string(tolerance));
    }
  }
}

PressureTrace::PressureTrace(std::vector<double> s, double fs, double t0)
    : samples(std::move(s)), sample_rate(fs), start_time(t0) {
  validate();
}

double PressureTrace::energy() const {
  return std::inner_product(samples.begin(), samples.end(), samples.begin(), 0.0);
}

double PressureTrace::rms() const {
  if (samples.empty()) return 0.0;
  return std::sqrt(energy() / static_cast<double>(samples.size()));
}

void PressureTrace::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw DomainError("trace: sample_rate must be positive");
  }
  if (!std::isfinite(start_time)) throw DomainError("trace: start_time must be finite");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw DomainError("trace: non-finite sample at index " + std::to_string(i));
    }
  }
}

double ispl(double p_rms) {
  require_positive(p_rms, "ispl: p_rms");
  return 20.0 * std::log10(p_rms / kReferencePressure);
}

double oispl(std::span<const double> band_rms) {
  if (band_rms.empty()) throw DomainError("oispl: empty band list");
  double sum = 0.0;
  for (double p : band_rms) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("oispl: band RMS must be non-negative");
    sum += p * p;
  }
  if (!(sum > 0.0)) throw DomainError("oispl: all bands are zero");
  return 10.0 * std::log10(sum / (kReferencePressure * kReferencePressure));
}

double transmission_loss(double tau) {
  require_positive(tau, "transmission_loss: tau");
  return 10.0 * std::log10(1.0 / tau);
}

double absorption_coefficient(double reflection_power, double transmission_power, double tolerance) {
  if (!(tolerance >= 0.0)) throw DomainError("absorption_coefficient: tolerance must be non-negative");
  const auto check = [tolerance](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError(std::string("absorption_coefficient: ") + name + " = " + std::to_string(v) +
                        " must be finite and non-negative");
    }
  };
  check(reflection_power, "R2");
  check(transmission_power, "T2");
  if (reflection_power + transmission_power > 1.0 + tolerance) {
    throw EnergyViolation("absorption_coefficient: R2 + T2 = " +
                          std::to_string(reflection_power + transmission_power) + " exceeds 1 + " +
                          std::to_string(tolerance));
  }
  const double alpha = 1.0 - reflection_power - transmission_power;
  return std::clamp(alpha, -tolerance, 1.0);
}

double strouhal(double frequency, double length, double sound_speed) {
  require_positive(frequency, "strouhal: frequency");
  require_positive(length, "strouhal: length");
  require_positive(sound_speed, "strouhal: sound_speed");
  return frequency * length / sound_speed;
}

double stokes_wavelength(double kinematic_viscosity, double frequency) {
  require_positive(kinematic_viscosity, "stokes_wavelength: nu");
  require_positive(frequency, "stokes_wavelength: frequency");
  return 2.0 * std::sqrt(kPi * kinematic_viscosity / frequency);
}

double circular_duct_cutoff(double diameter, double sound_speed) {
  // First zero of J1' for the (1,0) azimuthal mode of a rigid circular duct.
  constexpr double kBesselPrimeRoot = 1.8412;
  require_positive(diameter, "circular_duct_cutoff: diameter");
  require_positive(sound_speed, "circular_duct_cutoff: sound_speed");
  return kBesselPrimeRoot * sound_speed / (kPi * diameter);
}

double pressure_from_level(double level_db) {
  if (!std::isfinite(level_db)) throw DomainError("pressure_from_level: non-finite level");
  return kReferencePressure * std::pow(10.0, level_db / 20.0);
}

}  // namespace leakwave
