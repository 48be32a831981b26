#pragma once

#include <span>
#include <utility>
#include <vector>

#include "leakwave/acoustics.hpp"
#include "leakwave/sigproc.hpp"
#include "leakwave/tmm.hpp"

namespace leakwave {

enum class TerminationKind { anechoic, rigid, reflection };

struct Termination {
  TerminationKind kind = TerminationKind::anechoic;
  cdouble reflection{0.0, 0.0};  // used when kind == reflection

  cdouble coefficient() const;
};

enum class ReflectionModel {
  first_order,  // direct + one reflection per discontinuity
  multi_bounce  // steady-state geometric-series closure between source, sample and termination
};

/// Two-sided tube: source, mic 1, sample plane, mic 2, termination, in that order.
/// Default lengths separate the arrivals by more than 2.9 ms at 343 m/s.
struct TubeLayout {
  double bore_diameter = kTubeBoreDiameter;  // m
  double source_to_mic1 = 1.0;               // m
  double mic1_to_sample = 0.5;               // m
  double sample_to_mic2 = 0.5;               // m
  double mic2_to_termination = 0.5;          // m
  Termination termination;
  Medium medium = Medium::air_standard();
  bool include_duct_losses = false;
  ReflectionModel model = ReflectionModel::first_order;
  double source_reflection = 0.0;  // real, used by multi_bounce only

  void validate() const;
  double bore_area() const { return kPi * bore_diameter * bore_diameter / 4.0; }
  /// Highest frequency with plane waves only in the bore.
  double plane_wave_limit() const { return circular_duct_cutoff(bore_diameter, medium.sound_speed); }
  /// Wavenumber in the tube at f (Blackstock with the bore radius when duct losses are on).
  cdouble duct_wavenumber(double frequency) const;

  /// Arrival delays after emission at the source.
  double incident_delay() const { return source_to_mic1 / medium.sound_speed; }
  double reflected_delay() const { return (source_to_mic1 + 2.0 * mic1_to_sample) / medium.sound_speed; }
  double transmitted_delay() const {
    return (source_to_mic1 + mic1_to_sample + sample_to_mic2) / medium.sound_speed;
  }
  /// Longest first-order path delay the simulation models.
  double max_path_delay() const;
};

/// Reflection r = B/A and transmission t = E/A of a sample, per frequency, seen
/// from the source side, with both waves referenced to the sample plane x = 0.
/// The element is taken as mirror symmetric (equal bores), so the reverse
/// transmission is t and the reverse reflection is r e^{2ik length}, the phase
/// moving its reference from x = length back to x = 0.
struct TwoPort {
  std::vector<double> frequencies;
  std::vector<cdouble> reflection;
  std::vector<cdouble> transmission;
  double area_ratio = 1.0;  // S3 / S1
  double length = 0.0;      // acoustic length of the element, m

  /// Reflection of a wave arriving from the termination side, tube wavenumber k.
  cdouble reverse_reflection(std::size_t bin, cdouble k) const;

  static TwoPort identity(std::vector<double> frequencies);
  static TwoPort rigid(std::vector<double> frequencies);
  static TwoPort constant(std::vector<double> frequencies, cdouble r, cdouble t);

  /// Largest |r|^2 + (S3/S1)|t|^2 over the bins.
  double max_power_sum() const;
  /// Throws EnergyViolation when a bin exceeds 1 + tolerance.
  void check_passive(double tolerance = 1e-9) const;
};

/// r(f), t(f) from the conservation system. f = 0 is solved with k = 0.
TwoPort two_port_from_tmm(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
                          const TmmOptions& options = {});

struct MicTraces {
  PressureTrace mic1;
  PressureTrace mic2;
};

/// Complex mic pressures per rfft bin for a unit source spectrum.
struct MicResponses {
  std::vector<double> frequencies;
  std::vector<cdouble> mic1;
  std::vector<cdouble> mic2;
  std::vector<cdouble> incident_at_sample;  // right-going amplitude at the sample plane
  std::vector<cdouble> reflected_at_sample;
  std::vector<cdouble> transmitted_at_sample;
};

MicResponses mic_responses(const TubeLayout& layout, const TwoPort& port);

/// Frequency-domain propagation of `source` (pressure emitted at the source
/// plane) to the two mics. The port must be sampled on rfft_frequencies() of
/// the source length. Throws ConfigurationError when the longest modelled path
/// delay is not below half the trace duration.
MicTraces simulate_mic_traces(const TubeLayout& layout, const TwoPort& port, const PressureTrace& source);

/// Reflection seen upstream of the sample including the termination: r + t^2 rho / (1 - r_rev rho),
/// rho = R_t e^{-2ik d} with d the sample-to-termination distance.
std::vector<cdouble> effective_reflection(const TubeLayout& layout, const TwoPort& port);

/// Exact two-wave field e^{-ikx} + R e^{ikx} at the two mics of `mics`
/// (x negative upstream of the reference plane), as single-bin spectra.
std::pair<Spectrum, Spectrum> simulate_standing_wave(const TwoMicLayout& mics, cdouble reflection, double frequency);

/// As above, at the dominant rfft bin of a tone trace.
std::pair<Spectrum, Spectrum> simulate_standing_wave(const TwoMicLayout& mics, cdouble reflection,
                                                     const PressureTrace& tone);

}  // namespace leakwave
