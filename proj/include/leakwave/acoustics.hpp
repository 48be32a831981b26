#pragma once

#include <complex>
#include <span>
#include <vector>

namespace leakwave {

using cdouble = std::complex<double>;

inline constexpr double kReferencePressure = 20e-6;  // Pa
inline constexpr double kPi = 3.14159265358979323846;

/// Energy tolerances for power coefficients: analytical inputs vs coefficients
/// estimated from measured or simulated traces.
inline constexpr double kAnalyticalEnergyTolerance = 1e-6;
inline constexpr double kPipelineEnergyTolerance = 0.02;

/// Thermophysical state of the gas.
struct Medium {
  double sound_speed;        // m/s
  double density;            // kg/m^3
  double dynamic_viscosity;  // Pa s
  double specific_heat_ratio;
  double prandtl;

  /// 20 C air: c0 = 343 m/s, rho0 = 1.204 kg/m^3, mu = 1.825e-5 Pa s, gamma = 1.4, Pr = 0.71.
  static Medium air_standard();

  /// Checks the invariants (positive fields, gamma > 1). Viscosity may be zero
  /// to model an inviscid gas. Throws DomainError.
  void validate() const;

  double kinematic_viscosity() const { return dynamic_viscosity / density; }
  Medium with_viscosity(double mu) const {
    Medium m = *this;
    m.dynamic_viscosity = mu;
    return m;
  }
};

enum class SpectrumKind { pressure_amplitude, psd, power_coefficient, decibel };

const char* to_string(SpectrumKind kind);

/// Frequency-indexed values. Real-valued kinds store a zero imaginary part.
/// Bins can be marked invalid (failed SNR mask, singular decomposition) and
/// carry no meaningful value then.
struct Spectrum {
  std::vector<double> frequencies;  // Hz, strictly increasing
  std::vector<cdouble> values;
  std::vector<bool> valid;
  SpectrumKind kind = SpectrumKind::decibel;

  Spectrum() = default;
  Spectrum(std::vector<double> freqs, std::vector<cdouble> vals, SpectrumKind k);
  static Spectrum real(std::vector<double> freqs, std::span<const double> vals, SpectrumKind k);

  std::size_t size() const { return frequencies.size(); }
  double real_at(std::size_t i) const { return values[i].real(); }
  std::vector<double> real_values() const;
  std::size_t valid_count() const;

  /// Throws ShapeError / DomainError when the invariants are broken. `tolerance`
  /// bounds power coefficients to [0, 1 + tolerance].
  void validate(double tolerance = kAnalyticalEnergyTolerance) const;
};

/// Uniformly sampled acoustic pressure.
struct PressureTrace {
  std::vector<double> samples;  // Pa
  double sample_rate = 0.0;     // Hz
  double start_time = 0.0;      // s

  PressureTrace() = default;
  PressureTrace(std::vector<double> s, double fs, double t0 = 0.0);

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double time_at(std::size_t n) const { return start_time + static_cast<double>(n) / sample_rate; }
  double rms() const;
  double energy() const;  // sum of squares
  void validate() const;
};

/// 20 log10(p_rms / 20 uPa).
double ispl(double p_rms);
/// 10 log10(sum p_i^2 / p_ref^2) over band RMS pressures.
double oispl(std::span<const double> band_rms);
/// 10 log10(1 / tau). Gains (tau > 1) give negative values.
double transmission_loss(double tau);
/// 1 - R2 - T2, clamped to [-tolerance, 1].
double absorption_coefficient(double reflection_power, double transmission_power,
                              double tolerance = kAnalyticalEnergyTolerance);
double strouhal(double frequency, double length, double sound_speed);
/// 2 sqrt(pi nu / f).
double stokes_wavelength(double kinematic_viscosity, double frequency);
/// Cut-on of the first azimuthal mode of a rigid circular duct, 1.8412 c0 / (pi D).
double circular_duct_cutoff(double diameter, double sound_speed);

/// RMS pressure for a given level, inverse of ispl().
double pressure_from_level(double level_db);

}  // namespace leakwave
