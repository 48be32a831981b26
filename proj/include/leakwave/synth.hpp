#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "leakwave/acoustics.hpp"

namespace leakwave {

inline constexpr double kDefaultSampleRate = 51200.0;  // Hz

struct Band {
  double center;  // Hz
  double width;   // Hz
};

/// Geometric band layout: widths grow by `growth_ratio` from
/// B (r - 1) / (r^N - 1) so that they sum to `total_bandwidth`; centres are
/// cumulative midpoints starting at `base_frequency`. r = 1 gives N equal bands.
std::vector<Band> band_layout(int band_count, double growth_ratio, double total_bandwidth,
                              double base_frequency = 0.0);

/// Random-phase sum of cosines, one per band.
struct BroadbandSpec {
  int band_count = 100;
  double growth_ratio = 1.01;
  double total_bandwidth = 1e4;  // Hz
  double base_frequency = 0.0;   // Hz
  std::vector<double> spectrum_levels;  // S_j, Pa^2/Hz
  std::vector<double> phases;           // chi_j in [0, pi]
  std::uint64_t seed = 0;

  std::vector<Band> bands() const { return band_layout(band_count, growth_ratio, total_bandwidth, base_frequency); }
  /// Sum of Delta f_j S_j, the mean-square pressure the synthesis targets.
  double target_mean_square() const;
  double target_oispl() const { return 10.0 * std::log10(target_mean_square() / (kReferencePressure * kReferencePressure)); }
  void validate() const;

  /// Flat spectrum level hitting `oispl_db`, phases drawn uniformly on [0, pi] from `seed`.
  static BroadbandSpec flat(int band_count, double growth_ratio, double total_bandwidth, double oispl_db,
                            std::uint64_t seed, double base_frequency = 0.0);
};

enum class BroadbandPreset {
  geometric_10k,    // B = 1e4 Hz, N = 100, r = 1.01
  first_band_500,  // Delta f_1 = 500 Hz, N = 100, r = 1.01 (B ~ 8.524e4 Hz)
};

BroadbandSpec broadband_preset(BroadbandPreset preset, double oispl_db, std::uint64_t seed);

/// f(t) = sum_j sqrt(2 df_j S_j) cos(2 pi f_j t + chi_j). Throws
/// ConfigurationError when a band centre is at or above Nyquist.
PressureTrace synthesize_broadband(const BroadbandSpec& spec, double sample_rate, double duration);

enum class ImpulseShape { gaussian, hann_burst };

/// `width` is the full width at half maximum of the pressure pulse. The
/// gaussian's amplitude spectrum halves near 0.44 / width.
struct ImpulseSpec {
  double peak_pressure = 200.0;  // Pa
  double center_time = 5e-3;     // s
  double width = 1e-4;           // s
  ImpulseShape shape = ImpulseShape::gaussian;
};

/// Peak pressure for the nominal 120/130/140/150 dB OISPL impulse conditions
/// (measured peaks 140.0, 147.5, 159.9, 167.9 dB). Throws DomainError for other levels.
ImpulseSpec impulse_preset(int nominal_oispl_db);

/// Single pulse with its centre snapped to the nearest sample.
PressureTrace synthesize_impulse(const ImpulseSpec& spec, double sample_rate, double duration);

/// Sine of RMS 20 uPa 10^(level/20).
PressureTrace synthesize_tone(double frequency, double level_db, double sample_rate, double duration);

/// `count` copies of the pulse, the p-th centred at center_time + p * period.
PressureTrace synthesize_pulse_train(const ImpulseSpec& spec, int count, double period, double sample_rate,
                                     double duration);

/// Adds seeded white gaussian noise of the given RMS.
PressureTrace add_white_noise(PressureTrace trace, double rms, std::uint64_t seed);

}  // namespace leakwave
