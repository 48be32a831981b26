#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "leakwave/acoustics.hpp"

namespace leakwave {

enum class Taper { hann, rectangular };

/// Time window [window_start, window_end] in seconds. Absolute trace time for
/// gate_pulse(); relative to each pulse time inside a PulseTrain.
struct GateSpec {
  double window_start = 0.0;
  double window_end = 0.0;
  Taper taper = Taper::hann;

  double center() const { return 0.5 * (window_start + window_end); }
  void validate() const;
};

struct WelchConfig {
  std::size_t block_size = 1000;
  double overlap_fraction = 0.5;

  double resolution(double sample_rate) const { return sample_rate / static_cast<double>(block_size); }
  std::size_t hop() const;
  void validate() const;
};

/// Two microphones upstream of a reference plane: mic 1 at `mic1_to_reference`,
/// mic 2 closer to the plane by `mic_spacing`.
struct TwoMicLayout {
  double mic_spacing = 0.035;       // s, m
  double mic1_to_reference = 0.1;   // l1, m
  Medium medium = Medium::air_standard();
  double sin_floor = 0.05;          // bins with |sin(k s)| below this are flagged

  void validate() const;
};

/// Regularly repeated pulses in one recording.
struct PulseTrain {
  double first_pulse_time = 0.0;  // s, absolute
  double period = 0.04;           // s
  int count = 100;

  void validate() const;
};

inline constexpr double kDefaultGateEnergyFloor = 1e-6;
inline constexpr double kDefaultSnrDb = 10.0;

/// Keeps the samples inside the gate, tapered, and zeroes everything else;
/// the result has the input's length and timing. Throws GatingError when the
/// gate leaves the trace, holds no samples, or keeps less than `energy_floor`
/// of the trace energy.
PressureTrace gate_pulse(const PressureTrace& trace, const GateSpec& gate,
                         double energy_floor = kDefaultGateEnergyFloor);

/// Untapered copy of the samples inside the gate.
PressureTrace crop(const PressureTrace& trace, const GateSpec& gate);

/// One cropped segment per pulse of the train (gate relative to each pulse time).
std::vector<PressureTrace> separate_pulses(const PressureTrace& recording, const PulseTrain& train,
                                           const GateSpec& gate);

/// Pointwise mean of the pulses after applying `taper` (symmetric Hann by default) to each.
PressureTrace ensemble_average(std::span<const PressureTrace> pulses, Taper taper = Taper::hann);

/// Zero-padded record of `record_length` samples with the segment's centre
/// sample at index record_length / 2.
PressureTrace embed_centered(const PressureTrace& segment, std::size_t record_length);

/// One-sided Welch PSD in Pa^2/Hz with periodic-Hann blocks; Sum PSD * df equals
/// the mean windowed power (the variance for zero-mean stationary input).
Spectrum welch_psd(const PressureTrace& trace, const WelchConfig& cfg);

/// Averaged cross spectrum G_xy = <conj(X) Y> with the same blocks and scaling
/// as welch_psd(); G_xx equals welch_psd().
Spectrum welch_cross_spectrum(const PressureTrace& x, const PressureTrace& y, const WelchConfig& cfg);

/// H1 transfer function G_xy / G_xx.
Spectrum transfer_function(const PressureTrace& x, const PressureTrace& y, const WelchConfig& cfg);

/// Gate -> Hann-windowed ensemble average -> centred record -> Welch PSD.
/// `record_length` 0 means one Welch block.
Spectrum pulse_psd(const PressureTrace& recording, const PulseTrain& train, const GateSpec& gate,
                   const WelchConfig& cfg, std::size_t record_length = 0);

/// TL = 10 log10(incident / transmitted) per bin. With a noise floor, a bin
/// is valid only when the incident PSD exceeds it by `snr_db`.
Spectrum tl_from_psd(const Spectrum& incident, const Spectrum& transmitted,
                     const std::optional<Spectrum>& noise_floor = std::nullopt, double snr_db = kDefaultSnrDb);

/// Power ratio numerator / denominator per bin (|R|^2 or |T|^2 from PSDs),
/// with the same masking as tl_from_psd().
Spectrum power_ratio(const Spectrum& numerator, const Spectrum& denominator,
                     const std::optional<Spectrum>& noise_floor = std::nullopt, double snr_db = kDefaultSnrDb);

struct TwoMicResult {
  Spectrum incident;     // complex incident amplitude at the reference plane
  Spectrum reflected;    // complex reflected amplitude at the reference plane
  Spectrum reflection;   // complex R
  Spectrum power_reflection;  // |R|^2
};

/// Transfer-function decomposition of a plane-wave field from two mic
/// spectra. R = e^{2ik l1} (H12 - e^{-iks}) / (e^{iks} - H12), H12 = p2 / p1.
TwoMicResult two_mic_decompose(const Spectrum& p1, const Spectrum& p2, const TwoMicLayout& layout);

/// Linear interpolation of a real coefficient between the bins bracketing f.
double interpolate_power_coefficient(const Spectrum& spectrum, double frequency);

/// alpha = 1 - R2, valid for a rigidly terminated sample.
Spectrum absorption_from_reflection(const Spectrum& power_reflection,
                                    double tolerance = kPipelineEnergyTolerance);

/// alpha = 1 - R2 - T2 per bin, clamped as absorption_coefficient().
Spectrum absorption_from_coefficients(const Spectrum& power_reflection, const Spectrum& power_transmission,
                                      double tolerance = kPipelineEnergyTolerance);

}  // namespace leakwave
