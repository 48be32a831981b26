#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "leakwave/acoustics.hpp"
#include "leakwave/casegen.hpp"
#include "leakwave/errors.hpp"
#include "leakwave/sigproc.hpp"
#include "leakwave/synth.hpp"
#include "leakwave/tmm.hpp"
#include "leakwave/virtual_tube.hpp"

namespace leakwave::cli {

inline constexpr int kConfigSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kPhysicsError = 4 };

/// Maps a library exception onto the exit-code contract.
int exit_code_for(const std::exception& e);

/// Raised for schema problems; the message carries "file:line: ".
class ConfigError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

struct GeometryConfig {
  std::vector<int> plates;                  // 1-based catalogue indices
  std::optional<LeakGeometry> raw;          // used when no plate is given
  double bore_diameter = kTubeBoreDiameter;
  /// One geometry per plate, or the raw geometry.
  std::vector<std::pair<std::string, LeakGeometry>> geometries() const;
};

struct TmmConfig {
  TmmOptions options;
  std::vector<double> frequencies;  // default 1-5 kHz in 51.2 Hz steps
};

enum class SourceType { impulse, tone, broadband };

struct SourceConfig {
  SourceType type = SourceType::impulse;
  double sample_rate = kDefaultSampleRate;
  double duration = 4.0;
  ImpulseSpec impulse = impulse_preset(120);
  int pulse_count = 100;
  double pulse_period = 0.04;
  double tone_frequency = 1000.0;
  double tone_level = 94.0;
  BroadbandPreset preset = BroadbandPreset::geometric_10k;
  std::optional<int> bands;
  std::optional<double> growth_ratio;
  std::optional<double> total_bandwidth;
  double base_frequency = 0.0;
  double broadband_level = 120.0;
};

enum class PortType { tmm, identity, rigid };

struct TubeConfig {
  TubeLayout layout;
  PortType port = PortType::tmm;
  double noise_rms = 0.0;
};

enum class ProcessMode { impulse, two_mic };

struct ProcessingConfig {
  ProcessMode mode = ProcessMode::impulse;
  WelchConfig welch;
  double gate_half_width = 2.5e-3;
  std::optional<GateSpec> incident_gate, reflected_gate, transmitted_gate, noise_gate;
  Taper taper = Taper::hann;
  double snr_db = kDefaultSnrDb;
  std::optional<double> noise_floor_psd;  // declared, Pa^2/Hz
  double band_low = 1000.0;
  double band_high = 5000.0;
  TwoMicLayout two_mic;
  std::vector<double> tones;  // interpolation frequencies for two_mic mode
  std::optional<std::filesystem::path> mic1, mic2;
};

struct CasegenConfig {
  double length_scale = 0.025;
  double f_max = 1000.0;
  int dims = 3;
  int duration_cycles = 10;
  SourceKind source = SourceKind::tone;
  double level_db = 120.0;
  std::optional<std::string> table_row;               // 2d_broadband, 2d_tone, 3d_1000, 3d_2000 or 3d_3000
  std::optional<std::int64_t> transverse_override;    // replaces the planned transverse count
};

struct RunConfig {
  std::uint64_t seed = 0;
  Medium medium = Medium::air_standard();
  GeometryConfig geometry;
  TmmConfig tmm;
  SourceConfig source;
  TubeConfig tube;
  ProcessingConfig processing;
  CasegenConfig casegen;
  std::filesystem::path out_dir = ".";
  std::string hash;  // FNV-1a of the config bytes (and seed override)
};

/// Parses and schema-checks the YAML text. Unknown keys are rejected.
RunConfig parse_config(const std::string& text, const std::string& source_name = "config");
RunConfig load_config(const std::filesystem::path& path);

enum class OutputFormat { csv, json };

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  OutputFormat format = OutputFormat::csv;
};

/// Applies command-line overrides to a parsed config.
void apply_overrides(RunConfig& cfg, const CommandOptions& opts);

/// Each command writes its files into cfg.out_dir and returns an exit code.
/// Library errors propagate as exceptions.
int cmd_tl(const RunConfig& cfg, OutputFormat format);
int cmd_synth(const RunConfig& cfg, OutputFormat format);
int cmd_simulate(const RunConfig& cfg, OutputFormat format);
int cmd_process(const RunConfig& cfg, OutputFormat format);
int cmd_casegen(const RunConfig& cfg, OutputFormat format);

/// Full entry point used by the executable: parses argv, runs, maps errors to exit codes.
int run(int argc, char** argv);

/// Synthesized source trace for the configured source block.
PressureTrace build_source(const RunConfig& cfg);

/// Gates relative to each pulse time: explicit ones, else centred on the layout's arrivals.
GateSpec incident_gate(const RunConfig& cfg);
GateSpec reflected_gate(const RunConfig& cfg);
GateSpec transmitted_gate(const RunConfig& cfg);
GateSpec noise_gate(const RunConfig& cfg);

}  // namespace leakwave::cli
