#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "leakwave/acoustics.hpp"

namespace leakwave {

/// Flanged end correction applied to the leak length, as a multiple of the radius.
inline constexpr double kEndCorrectionFactor = 0.821;

/// Outer duct (S1), leak (S2), inner duct (S3) and the leak's length and radius.
struct LeakGeometry {
  double area_outer;  // S1, m^2
  double area_leak;   // S2, m^2
  double area_inner;  // S3, m^2
  double length;      // L, m
  double radius;      // r, m

  /// Circular leak of the given radius between two ducts.
  static LeakGeometry circular(double outer_area, double leak_radius, double inner_area, double length);

  double effective_length() const { return length + kEndCorrectionFactor * radius; }
  double area_ratio() const { return area_leak / area_outer; }

  /// Throws DegenerateGeometry for non-positive or non-finite fields and
  /// DomainError when the leak is wider than either duct.
  void validate() const;
};

/// One row of the orifice plate catalogue used on the 25.4 mm tube.
struct OrificePlateSpec {
  std::string label;
  double inner_diameter;  // m
  double thickness;       // m
  double area_ratio;      // (inner / bore)^2

  static OrificePlateSpec from_ratios(std::string label, double diameter_ratio, double thickness_ratio,
                                      double bore_diameter);
  /// Equal-bore geometry with the plate between two tubes of the given bore.
  LeakGeometry geometry(double bore_diameter) const;
};

inline constexpr double kTubeBoreDiameter = 0.0254;  // m

/// Test articles #1-#5: 0.5 %, 1 %, 5 %, 10 % and 100 % open plates, 0.125 D thick.
std::vector<OrificePlateSpec> orifice_plates(double bore_diameter = kTubeBoreDiameter);

/// Complex amplitudes of the five plane waves, normalised to A = 1.
/// A, B: incident and reflected in the outer duct; C, D: forward and backward
/// in the leak; E: transmitted into the inner duct.
struct WaveAmplitudes {
  cdouble A{1.0, 0.0};
  cdouble B, C, D, E;

  std::array<cdouble, 5> as_array() const { return {A, B, C, D, E}; }
};

using CouplingMatrix = std::array<std::array<cdouble, 5>, 4>;

/// Viscothermal wavenumber of a circular duct of radius r. Returns omega/c0
/// exactly for an inviscid medium. Im(k) < 0 with the e^{-ikx} forward-wave
/// convention used throughout.
cdouble blackstock_wavenumber(const Medium& medium, double radius, double frequency);

/// Pressure and volume-velocity continuity at x = 0 (rows 0, 1) and x = L (rows 2, 3)
/// acting on [A, B, C, D, E], with L_eff in the exponentials.
CouplingMatrix assemble_coupling_matrix(const LeakGeometry& geom, cdouble wavenumber);

/// Residual norm |M p| / |M| (Frobenius) of a solution.
double relative_residual(const CouplingMatrix& m, const WaveAmplitudes& amps);

/// Solves M p = 0 with A = 1. Throws DegenerateGeometry when the 4x4 system for
/// [B, C, D, E] has a condition number above 1e12.
WaveAmplitudes solve_amplitudes(const LeakGeometry& geom, cdouble wavenumber);

/// Power transmission (S3/S1) |E/A|^2.
double transmission_coefficient(const WaveAmplitudes& amps, const LeakGeometry& geom);
/// Power reflection |B/A|^2.
double reflection_coefficient(const WaveAmplitudes& amps);

/// Switches for the analytical sweep.
struct TmmOptions {
  bool viscous = true;          // Blackstock wavenumber in the leak; plane-wave k otherwise
  bool area_weighted = true;    // tau = (S3/S1)|E|^2; plain |E|^2 when false
};

/// TL(f) = 10 log10(1/tau) in dB for each frequency.
Spectrum tl_spectrum(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
                     const TmmOptions& options = {});

/// alpha(f) = 1 - |B|^2 - (S3/S1)|E|^2 as a power coefficient spectrum.
Spectrum alpha_spectrum(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
                        const TmmOptions& options = {});

/// Number of worker threads for frequency sweeps: LEAKWAVE_THREADS if set
/// (minimum 1), otherwise the hardware concurrency.
unsigned sweep_threads();

}  // namespace leakwave
