#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leakwave/acoustics.hpp"

namespace leakwave {

inline constexpr double kMinCellsPerStokesWavelength = 5.0;
inline constexpr double kMinCellsPerAcousticWavelength = 20.0;
inline constexpr double kDomainAspect = 12.0;  // axial extent in units of L
inline constexpr int kGridRounding = 20;
inline constexpr double kAcousticCfl = 0.7;
inline constexpr std::int64_t kBroadbandSteps = 5'000'000;

enum class SourceKind { tone, broadband };
enum class TimeStepSource { reference_table, acoustic_cfl };

const char* to_string(SourceKind kind);
const char* to_string(TimeStepSource source);

/// Uniform-grid case for the external compressible-flow solver. Lengths are in
/// units of L; dt is in units of L / c0.
struct CasePlan {
  int dimensionality = 3;
  double length_scale = 0.025;          // L, m
  std::vector<double> domain_extents;   // multiples of L, axial first
  std::vector<std::int64_t> grid_counts;
  double dt = 0.0;
  TimeStepSource dt_source = TimeStepSource::acoustic_cfl;
  std::int64_t n_steps = 0;
  SourceKind source = SourceKind::tone;
  double frequency = 0.0;      // Hz; tone frequency, or the highest resolved frequency for broadband
  double target_level = 120.0; // dB, ISPL for tones and OISPL for broadband
  double source_offset = 0.5;  // source plane distance from the inlet boundary, in L

  /// Cell size in metres along `axis`.
  double spacing(std::size_t axis) const;
  bool operator==(const CasePlan&) const = default;
};

/// Plans a case resolving f_max: transverse cells = 5 L / lambda_s(f_max) (or
/// 20 per acoustic wavelength if larger) rounded up to a multiple of 20; axial
/// cells scale with the 12 L domain. dt and step count come from the published
/// table when (dims, f_max, source) match one of its rows at L = 25 mm, and
/// from an acoustic CFL of 0.7 otherwise.
CasePlan plan_case(double length_scale, double f_max, const Medium& medium, int dims, int duration_cycles,
                   SourceKind source = SourceKind::tone, double target_level = 120.0);

/// The five published cases (2D broadband, 2D tones, 3D 1/2/3 kHz), verbatim.
std::vector<CasePlan> reference_table_plans();

struct RuleCheck {
  std::string rule;
  bool passed;
  double value;
  double threshold;
  double margin() const { return value - threshold; }
};

struct ValidationReport {
  std::vector<RuleCheck> checks;
  bool passed() const;
  std::string to_text() const;
};

/// Stokes-layer resolution, acoustic resolution, 12:1 domain aspect and uniform
/// spacing, each with its margin.
ValidationReport validate_plan(const CasePlan& plan, const Medium& medium);

/// Key-value case text with a fixed field order.
std::string format_case(const CasePlan& plan);
/// Inverse of format_case(). Throws ConfigurationError naming the offending line.
CasePlan parse_case(const std::string& text);
/// Writes format_case() to `path` via a temporary file and rename. Throws IoError.
void emit_case(const CasePlan& plan, const std::filesystem::path& path);

}  // namespace leakwave
