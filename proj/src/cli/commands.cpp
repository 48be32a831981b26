#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "leakwave/cli.hpp"
#include "leakwave/errors.hpp"
#include "leakwave/fft.hpp"
#include "leakwave/io.hpp"

namespace leakwave::cli {

namespace {

using nlohmann::ordered_json;

OutputHeader header_for(const RunConfig& cfg, std::vector<std::string> notes = {}) {
  return OutputHeader{cfg.hash, std::move(notes)};
}

ordered_json json_header(const RunConfig& cfg) {
  ordered_json j;
  j["tool"] = "leakwave";
  j["tool_version"] = kToolVersion;
  j["config_hash"] = cfg.hash;
  return j;
}

// NaN and infinities have no JSON spelling.
ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void write_json(const std::filesystem::path& path, const ordered_json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void write_spectrum(const RunConfig& cfg, OutputFormat format, const std::filesystem::path& stem,
                    const Spectrum& spectrum, const std::string& value_name) {
  if (format == OutputFormat::csv) {
    write_file_atomic(stem.string() + ".csv", format_spectrum_csv(spectrum, value_name, header_for(cfg)));
    return;
  }
  ordered_json j = json_header(cfg);
  ordered_json f = ordered_json::array(), v = ordered_json::array(), ok = ordered_json::array();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    f.push_back(spectrum.frequencies[i]);
    v.push_back(spectrum.valid[i] ? number_or_null(spectrum.real_at(i)) : ordered_json(nullptr));
    ok.push_back(static_cast<bool>(spectrum.valid[i]));
  }
  j["frequency_hz"] = f;
  j[value_name] = v;
  j["valid"] = ok;
  write_json(stem.string() + ".json", j);
}

void write_trace(const RunConfig& cfg, OutputFormat format, const std::filesystem::path& stem,
                 const PressureTrace& trace) {
  if (format == OutputFormat::csv) {
    write_file_atomic(stem.string() + ".csv", format_trace_csv(trace, header_for(cfg)));
    return;
  }
  ordered_json j = json_header(cfg);
  j["sample_rate_hz"] = trace.sample_rate;
  j["start_time_s"] = trace.start_time;
  j["pressure_pa"] = trace.samples;
  write_json(stem.string() + ".json", j);
}

PressureTrace read_trace(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    try {
      const auto j = nlohmann::json::parse(text);
      return PressureTrace(j.at("pressure_pa").get<std::vector<double>>(), j.at("sample_rate_hz").get<double>(),
                           j.value("start_time_s", 0.0));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }
  try {
    return parse_trace_csv(text);
  } catch (const IoError& e) {
    throw IoError(path.string() + ":" + e.what());
  }
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
}

GateSpec around(double center, double half_width, Taper taper) {
  return GateSpec{center - half_width, center + half_width, taper};
}

PulseTrain pulse_train(const RunConfig& cfg) {
  return PulseTrain{cfg.source.impulse.center_time, cfg.source.pulse_period, cfg.source.pulse_count};
}

// Pulses of the train whose gate still ends inside the recording.
PulseTrain fitting_train(const RunConfig& cfg, const PressureTrace& recording, const GateSpec& gate) {
  PulseTrain train = pulse_train(cfg);
  const double end = recording.start_time + recording.duration();
  while (train.count > 0 &&
         train.first_pulse_time + (train.count - 1) * train.period + gate.window_end > end + 0.5 / recording.sample_rate) {
    --train.count;
  }
  if (train.count == 0) throw GatingError("no pulse of the train fits gate [" + format_double(gate.window_start) + ", " +
                                          format_double(gate.window_end) + "] s inside the recording");
  return train;
}

TwoPort build_port(const RunConfig& cfg, const std::vector<double>& freqs) {
  switch (cfg.tube.port) {
    case PortType::identity:
      return TwoPort::identity(freqs);
    case PortType::rigid:
      return TwoPort::rigid(freqs);
    case PortType::tmm:
      break;
  }
  const auto geoms = cfg.geometry.geometries();
  if (geoms.size() != 1) throw ConfigError("simulate: the tmm port needs exactly one geometry");
  TwoPort port = two_port_from_tmm(geoms.front().second, cfg.medium, freqs, cfg.tmm.options);
  port.check_passive();
  return port;
}

double band_mean(const Spectrum& s, double lo, double hi, std::size_t* used = nullptr) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.valid[i] && s.frequencies[i] >= lo && s.frequencies[i] <= hi) {
      sum += s.real_at(i);
      ++n;
    }
  }
  if (used) *used = n;
  return n ? sum / static_cast<double>(n) : std::nan("");
}

// Level of the ensemble-averaged gated pulse, from the PSD integral.
double psd_level(const Spectrum& psd) {
  double df = psd.size() > 1 ? psd.frequencies[1] - psd.frequencies[0] : 0.0;
  double ms = 0.0;
  for (std::size_t i = 0; i < psd.size(); ++i) ms += psd.real_at(i) * df;
  return ms > 0.0 ? 10.0 * std::log10(ms / (kReferencePressure * kReferencePressure)) : -INFINITY;
}

Spectrum constant_floor(const Spectrum& like, double level) {
  return Spectrum::real(like.frequencies, std::vector<double>(like.size(), level), SpectrumKind::psd);
}

// Only plane waves propagate in the bore below the first cut-on; higher bins carry no usable estimate.
void mask_above(Spectrum& s, double limit) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.frequencies[i] > limit) s.valid[i] = false;
  }
}

int warn_if_empty(const Spectrum& s, const std::string& what) {
  if (s.valid_count() == 0) {
    std::cerr << "warning: every " << what << " bin failed the SNR mask\n";
    return kDataError;
  }
  return kOk;
}

int process_impulse(const RunConfig& cfg, OutputFormat format, const PressureTrace& mic1, const PressureTrace& mic2) {
  const ProcessingConfig& p = cfg.processing;
  const GateSpec gi = incident_gate(cfg), gr = reflected_gate(cfg), gt = transmitted_gate(cfg);
  Spectrum in = pulse_psd(mic1, fitting_train(cfg, mic1, gi), gi, p.welch);
  const Spectrum re = pulse_psd(mic1, fitting_train(cfg, mic1, gr), gr, p.welch);
  const Spectrum tr = pulse_psd(mic2, fitting_train(cfg, mic2, gt), gt, p.welch);
  mask_above(in, cfg.tube.layout.plane_wave_limit());

  std::optional<Spectrum> floor;
  if (p.noise_floor_psd) {
    floor = constant_floor(in, *p.noise_floor_psd);
  } else {
    const GateSpec gn = noise_gate(cfg);
    floor = pulse_psd(mic1, fitting_train(cfg, mic1, gn), gn, p.welch);
  }

  const Spectrum tl = tl_from_psd(in, tr, floor, p.snr_db);
  const Spectrum r2 = power_ratio(re, in, floor, p.snr_db);
  const Spectrum t2 = power_ratio(tr, in, floor, p.snr_db);
  // Bins breaking energy closure are flagged rather than aborting the other outputs.
  Spectrum alpha(r2.frequencies, std::vector<cdouble>(r2.size(), 0.0), SpectrumKind::power_coefficient);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    alpha.valid[i] = r2.valid[i] && t2.valid[i];
    if (!alpha.valid[i]) continue;
    try {
      alpha.values[i] = absorption_coefficient(r2.real_at(i), t2.real_at(i), kPipelineEnergyTolerance);
    } catch (const EnergyViolation&) {
      alpha.valid[i] = false;
      ++violations;
    }
  }

  write_spectrum(cfg, format, cfg.out_dir / "tl", tl, "tl_db");
  write_spectrum(cfg, format, cfg.out_dir / "reflection_power", r2, "r2");
  write_spectrum(cfg, format, cfg.out_dir / "transmission_power", t2, "t2");
  write_spectrum(cfg, format, cfg.out_dir / "alpha", alpha, "alpha");

  std::size_t used = 0;
  ordered_json j = json_header(cfg);
  j["mode"] = "impulse";
  j["oispl_in_db"] = number_or_null(psd_level(in));
  j["oispl_out_db"] = number_or_null(psd_level(tr));
  j["band_hz"] = {p.band_low, p.band_high};
  j["mean_tl_db"] = number_or_null(band_mean(tl, p.band_low, p.band_high, &used));
  j["mean_alpha"] = number_or_null(band_mean(alpha, p.band_low, p.band_high));
  j["valid_bins_in_band"] = used;
  j["valid_bins"] = tl.valid_count();
  j["total_bins"] = tl.size();
  j["energy_violations"] = violations;
  write_json(cfg.out_dir / "process_summary.json", j);
  if (violations > 0) {
    std::cerr << "error: R2 + T2 exceeds 1 + " << kPipelineEnergyTolerance << " at " << violations
              << " bins; alpha is flagged invalid there\n";
    return kPhysicsError;
  }
  return warn_if_empty(tl, "TL");
}

int process_two_mic(const RunConfig& cfg, OutputFormat format, const PressureTrace& mic1, const PressureTrace& mic2) {
  const ProcessingConfig& p = cfg.processing;
  const Spectrum h = transfer_function(mic1, mic2, p.welch);
  // Decompose the transfer function against a unit reference spectrum on mic 1.
  Spectrum unit(h.frequencies, std::vector<cdouble>(h.size(), cdouble(1.0)), SpectrumKind::pressure_amplitude);
  unit.valid = h.valid;
  Spectrum p2 = h;
  p2.kind = SpectrumKind::pressure_amplitude;
  TwoMicResult d = two_mic_decompose(unit, p2, p.two_mic);
  mask_above(d.power_reflection, circular_duct_cutoff(cfg.geometry.bore_diameter, cfg.medium.sound_speed));
  if (p.noise_floor_psd) {
    const Spectrum g11 = welch_psd(mic1, p.welch);
    const double ratio = std::pow(10.0, p.snr_db / 10.0);
    for (std::size_t i = 0; i < g11.size(); ++i) {
      if (!(g11.real_at(i) > ratio * *p.noise_floor_psd)) d.power_reflection.valid[i] = false;
    }
  }
  const Spectrum alpha = absorption_from_reflection(d.power_reflection);
  write_spectrum(cfg, format, cfg.out_dir / "reflection_power", d.power_reflection, "r2");
  write_spectrum(cfg, format, cfg.out_dir / "alpha", alpha, "alpha");

  ordered_json j = json_header(cfg);
  j["mode"] = "two_mic";
  j["oispl_mic1_db"] = number_or_null(ispl(mic1.rms()));
  j["oispl_mic2_db"] = number_or_null(ispl(mic2.rms()));
  j["band_hz"] = {p.band_low, p.band_high};
  j["mean_alpha"] = number_or_null(band_mean(alpha, p.band_low, p.band_high));
  j["valid_bins"] = alpha.valid_count();
  j["total_bins"] = alpha.size();
  ordered_json tones = ordered_json::array();
  for (double f : p.tones) {
    const double r2 = interpolate_power_coefficient(d.power_reflection, f);
    tones.push_back({{"frequency_hz", f}, {"r2", r2}, {"alpha", absorption_coefficient(r2, 0.0, kPipelineEnergyTolerance)}});
  }
  j["tones"] = tones;
  write_json(cfg.out_dir / "process_summary.json", j);
  return warn_if_empty(alpha, "alpha");
}

std::optional<CasePlan> table_row(const std::string& name) {
  static const char* names[] = {"2d_broadband", "2d_tone", "3d_1000", "3d_2000", "3d_3000"};
  const auto plans = reference_table_plans();
  for (std::size_t i = 0; i < plans.size() && i < std::size(names); ++i) {
    if (name == names[i]) return plans[i];
  }
  return std::nullopt;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigurationError*>(&e) || dynamic_cast<const CLI::Error*>(&e)) return kConfigError;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const EnergyViolation*>(&e) ||
      dynamic_cast<const DegenerateGeometry*>(&e)) {
    return kPhysicsError;
  }
  return kDataError;
}

PressureTrace build_source(const RunConfig& cfg) {
  const SourceConfig& s = cfg.source;
  switch (s.type) {
    case SourceType::impulse:
      return synthesize_pulse_train(s.impulse, s.pulse_count, s.pulse_period, s.sample_rate, s.duration);
    case SourceType::tone:
      return synthesize_tone(s.tone_frequency, s.tone_level, s.sample_rate, s.duration);
    case SourceType::broadband:
      break;
  }
  BroadbandSpec spec = broadband_preset(s.preset, s.broadband_level, cfg.seed);
  if (s.bands || s.growth_ratio || s.total_bandwidth || s.base_frequency != 0.0) {
    spec = BroadbandSpec::flat(s.bands.value_or(spec.band_count), s.growth_ratio.value_or(spec.growth_ratio),
                               s.total_bandwidth.value_or(spec.total_bandwidth), s.broadband_level, cfg.seed,
                               s.base_frequency);
  }
  return synthesize_broadband(spec, s.sample_rate, s.duration);
}

GateSpec incident_gate(const RunConfig& cfg) {
  const auto& p = cfg.processing;
  return p.incident_gate.value_or(around(cfg.tube.layout.incident_delay(), p.gate_half_width, p.taper));
}

GateSpec reflected_gate(const RunConfig& cfg) {
  const auto& p = cfg.processing;
  return p.reflected_gate.value_or(around(cfg.tube.layout.reflected_delay(), p.gate_half_width, p.taper));
}

GateSpec transmitted_gate(const RunConfig& cfg) {
  const auto& p = cfg.processing;
  return p.transmitted_gate.value_or(around(cfg.tube.layout.transmitted_delay(), p.gate_half_width, p.taper));
}

GateSpec noise_gate(const RunConfig& cfg) {
  const auto& p = cfg.processing;
  if (p.noise_gate) return *p.noise_gate;
  // Centre of the quiet stretch between the last arrival and the next pulse's first one.
  const double quiet_start = cfg.tube.layout.max_path_delay() + p.gate_half_width;
  const double quiet_end = cfg.source.pulse_period + cfg.tube.layout.incident_delay() - p.gate_half_width;
  if (!(quiet_end - quiet_start > 2.0 * p.gate_half_width)) {
    throw GatingError("no quiet interval of " + format_double(2.0 * p.gate_half_width) +
                      " s between pulses; set processing.gates.noise or processing.noise_floor_psd");
  }
  return around(0.5 * (quiet_start + quiet_end), p.gate_half_width, p.taper);
}

int cmd_tl(const RunConfig& cfg, OutputFormat format) {
  ensure_out_dir(cfg);
  const auto geoms = cfg.geometry.geometries();
  for (const auto& [label, geom] : geoms) {
    const Spectrum tl = tl_spectrum(geom, cfg.medium, cfg.tmm.frequencies, cfg.tmm.options);
    const std::string stem = geoms.size() == 1 ? "tl" : "tl_" + label;
    write_spectrum(cfg, format, cfg.out_dir / stem, tl, "tl_db");
  }
  return kOk;
}

int cmd_synth(const RunConfig& cfg, OutputFormat format) {
  ensure_out_dir(cfg);
  const PressureTrace trace = build_source(cfg);
  write_trace(cfg, format, cfg.out_dir / "trace", trace);
  double peak = 0.0;
  for (double v : trace.samples) peak = std::max(peak, std::abs(v));
  ordered_json j = json_header(cfg);
  j["samples"] = trace.size();
  j["sample_rate_hz"] = trace.sample_rate;
  j["rms_pa"] = trace.rms();
  j["oispl_db"] = number_or_null(ispl(trace.rms()));
  j["peak_pa"] = peak;
  j["peak_spl_db"] = number_or_null(peak > 0.0 ? 20.0 * std::log10(peak / kReferencePressure) : -INFINITY);
  write_json(cfg.out_dir / "synth_summary.json", j);
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, OutputFormat format) {
  ensure_out_dir(cfg);
  cfg.tube.layout.validate();
  const PressureTrace source = build_source(cfg);
  const auto freqs = rfft_frequencies(source.size(), source.sample_rate);
  const TwoPort port = build_port(cfg, freqs);
  MicTraces mics = simulate_mic_traces(cfg.tube.layout, port, source);
  if (cfg.tube.noise_rms > 0.0) {
    mics.mic1 = add_white_noise(std::move(mics.mic1), cfg.tube.noise_rms, cfg.seed);
    mics.mic2 = add_white_noise(std::move(mics.mic2), cfg.tube.noise_rms, cfg.seed + 1);
  }
  write_trace(cfg, format, cfg.out_dir / "mic1", mics.mic1);
  write_trace(cfg, format, cfg.out_dir / "mic2", mics.mic2);
  ordered_json j = json_header(cfg);
  j["samples"] = source.size();
  j["sample_rate_hz"] = source.sample_rate;
  j["incident_delay_s"] = cfg.tube.layout.incident_delay();
  j["reflected_delay_s"] = cfg.tube.layout.reflected_delay();
  j["transmitted_delay_s"] = cfg.tube.layout.transmitted_delay();
  j["plane_wave_limit_hz"] = cfg.tube.layout.plane_wave_limit();
  j["mic1_rms_pa"] = mics.mic1.rms();
  j["mic2_rms_pa"] = mics.mic2.rms();
  j["max_power_sum"] = port.max_power_sum();
  write_json(cfg.out_dir / "simulate_summary.json", j);
  return kOk;
}

int cmd_process(const RunConfig& cfg, OutputFormat format) {
  ensure_out_dir(cfg);
  const std::string ext = format == OutputFormat::json ? ".json" : ".csv";
  const auto mic1_path = cfg.processing.mic1.value_or(cfg.out_dir / ("mic1" + ext));
  const auto mic2_path = cfg.processing.mic2.value_or(cfg.out_dir / ("mic2" + ext));
  const PressureTrace mic1 = read_trace(mic1_path);
  const PressureTrace mic2 = read_trace(mic2_path);
  if (mic1.sample_rate != mic2.sample_rate || mic1.size() != mic2.size()) {
    throw ShapeError("process: mic traces differ in sample rate or length");
  }
  if (cfg.processing.mode == ProcessMode::two_mic) return process_two_mic(cfg, format, mic1, mic2);
  return process_impulse(cfg, format, mic1, mic2);
}

int cmd_casegen(const RunConfig& cfg, OutputFormat) {
  ensure_out_dir(cfg);
  const CasegenConfig& c = cfg.casegen;
  CasePlan plan;
  if (c.table_row) {
    auto row = table_row(*c.table_row);
    if (!row) {
      throw ConfigError("casegen.table_row: unknown row '" + *c.table_row +
                        "' (expected 2d_broadband, 2d_tone, 3d_1000, 3d_2000 or 3d_3000)");
    }
    plan = *row;
  } else {
    plan = plan_case(c.length_scale, c.f_max, cfg.medium, c.dims, c.duration_cycles, c.source, c.level_db);
  }
  if (c.transverse_override) {
    for (std::size_t a = 1; a < plan.grid_counts.size(); ++a) plan.grid_counts[a] = *c.transverse_override;
  }
  write_file_atomic(cfg.out_dir / "case.txt", header_for(cfg).to_text() + format_case(plan));
  const ValidationReport report = validate_plan(plan, cfg.medium);
  write_file_atomic(cfg.out_dir / "validation.txt", header_for(cfg).to_text() + report.to_text());
  if (!report.passed()) {
    for (const auto& check : report.checks) {
      if (!check.passed) std::cerr << "casegen: rule violated: " << check.rule << '\n';
    }
    return kPhysicsError;
  }
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Earplug leak transmission modelling and impedance-tube processing"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string format = "csv";
  app.add_option("--config", config_path, "YAML config file")->required();
  app.add_option("--seed", seed, "Overrides the config seed");
  app.add_option("--out-dir", out_dir, "Overrides the output directory");
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, OutputFormat);
  };
  const Entry entries[] = {
      {"tl", "Analytical transmission loss spectrum", cmd_tl},
      {"synth", "Synthesize the configured source trace", cmd_synth},
      {"simulate", "Virtual impedance tube mic traces", cmd_simulate},
      {"process", "TL and absorption from mic traces", cmd_process},
      {"casegen", "Plan and validate a DNS case", cmd_casegen},
  };
  for (const auto& e : entries) app.add_subcommand(e.name, e.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    RunConfig cfg = load_config(config_path);
    CommandOptions opts;
    opts.seed = seed;
    if (out_dir) opts.out_dir = *out_dir;
    opts.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    apply_overrides(cfg, opts);
    for (const auto& e : entries) {
      if (app.got_subcommand(e.name)) return e.fn(cfg, opts.format);
    }
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace leakwave::cli
