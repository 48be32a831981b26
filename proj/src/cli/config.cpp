#include <yaml-cpp/yaml.h>

#include <cmath>
#include <set>

#include "leakwave/cli.hpp"
#include "leakwave/errors.hpp"
#include "leakwave/io.hpp"

namespace leakwave::cli {

namespace {

// Walks one YAML mapping, remembering which keys were consumed so that
// finish() can reject the rest.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string* file)
      : node_(std::move(node)), path_(std::move(path)), file_(file) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw error(node_, "'" + path_ + "' must be a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && lookup(key); }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return lookup(key);
  }

  // Const lookup so that missing keys are not inserted.
  YAML::Node lookup(const std::string& key) const {
    const YAML::Node& n = node_;
    return n[key];
  }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    const YAML::Node n = raw(key);
    if (!n) return std::nullopt;
    return convert<T>(n, key);
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    if (auto v = get<T>(key)) target = *v;
  }

  void positive(const std::string& key, double& target) {
    if (auto v = get<double>(key)) {
      if (!(*v > 0.0) || !std::isfinite(*v)) throw error(lookup(key), qualified(key) + " must be positive");
      target = *v;
    }
  }

  Section child(const std::string& key) { return Section(raw(key), qualified(key), file_); }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  ConfigError error(const YAML::Node& at, const std::string& what) const {
    const int line = at ? at.Mark().line + 1 : 0;
    return ConfigError(*file_ + ":" + std::to_string(line) + ": " + what);
  }

  template <typename T>
  T convert(const YAML::Node& n, const std::string& key) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw error(n, "invalid value for " + qualified(key));
    }
  }

  std::vector<double> numbers(const std::string& key) {
    const YAML::Node n = raw(key);
    std::vector<double> out;
    if (!n) return out;
    if (!n.IsSequence()) throw error(n, qualified(key) + " must be a list");
    for (const auto& item : n) out.push_back(convert<double>(item, key));
    return out;
  }

  /// [start, end] pair.
  std::optional<GateSpec> gate(const std::string& key, Taper taper) {
    const auto v = numbers(key);
    if (v.empty()) return std::nullopt;
    if (v.size() != 2 || !(v[1] > v[0])) throw error(lookup(key), qualified(key) + " must be [start, end] with end > start");
    return GateSpec{v[0], v[1], taper};
  }

  template <typename E>
  std::optional<E> choice(const std::string& key, std::initializer_list<std::pair<const char*, E>> options) {
    const auto v = get<std::string>(key);
    if (!v) return std::nullopt;
    for (const auto& [name, value] : options) {
      if (*v == name) return value;
    }
    std::string allowed;
    for (const auto& [name, value] : options) allowed += std::string(allowed.empty() ? "" : ", ") + name;
    throw error(lookup(key), "unknown value '" + *v + "' for " + qualified(key) + " (expected " + allowed + ")");
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw error(kv.first, "unknown key '" + qualified(key) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string* file_;
  std::set<std::string> seen_;
};

void parse_medium(Section s, Medium& m) {
  s.positive("sound_speed", m.sound_speed);
  s.positive("density", m.density);
  s.read("dynamic_viscosity", m.dynamic_viscosity);
  s.read("specific_heat_ratio", m.specific_heat_ratio);
  s.positive("prandtl", m.prandtl);
  s.finish();
}

void parse_geometry(Section s, GeometryConfig& g) {
  s.positive("bore_diameter", g.bore_diameter);
  if (s.has("plate")) {
    const YAML::Node n = s.raw("plate");
    if (n.IsSequence()) {
      for (const auto& item : n) g.plates.push_back(s.convert<int>(item, "plate"));
    } else {
      g.plates.push_back(s.convert<int>(n, "plate"));
    }
    for (int p : g.plates) {
      if (p < 1 || p > 5) throw s.error(n, "geometry.plate must be between 1 and 5");
    }
  }
  if (s.has("raw")) {
    Section r = s.child("raw");
    LeakGeometry geom{0, 0, 0, 0, 0};
    r.positive("area_outer", geom.area_outer);
    r.positive("area_leak", geom.area_leak);
    r.positive("area_inner", geom.area_inner);
    r.positive("length", geom.length);
    r.positive("radius", geom.radius);
    r.finish();
    g.raw = geom;
  }
  if (g.plates.empty() && !g.raw) g.plates.push_back(1);
  s.finish();
}

std::vector<double> frequency_grid(Section& s, const std::string& key) {
  const YAML::Node n = s.raw(key);
  std::vector<double> out;
  if (!n) return out;
  if (n.IsSequence()) {
    for (const auto& item : n) out.push_back(s.convert<double>(item, key));
  } else {
    if (!n.IsMap()) throw s.error(n, s.qualified(key) + " must be a list or {start, stop, step}");
    const auto start = s.convert<double>(n["start"], key + ".start");
    const auto stop = s.convert<double>(n["stop"], key + ".stop");
    const auto step = s.convert<double>(n["step"], key + ".step");
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      if (k != "start" && k != "stop" && k != "step") throw s.error(kv.first, "unknown key '" + s.qualified(key) + "." + k + "'");
    }
    if (!(start > 0.0) || !(stop >= start) || !(step > 0.0)) {
      throw s.error(n, s.qualified(key) + " needs 0 < start <= stop and step > 0");
    }
    for (long i = 0;; ++i) {
      const double f = start + static_cast<double>(i) * step;
      if (f > stop * (1.0 + 1e-12)) break;
      out.push_back(f);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0) || (i > 0 && !(out[i] > out[i - 1]))) {
      throw s.error(n, s.qualified(key) + " must be positive and strictly increasing");
    }
  }
  return out;
}

void parse_tmm(Section s, TmmConfig& t) {
  s.read("viscous", t.options.viscous);
  s.read("area_weighted", t.options.area_weighted);
  if (s.has("frequencies")) t.frequencies = frequency_grid(s, "frequencies");
  s.finish();
}

void parse_source(Section s, SourceConfig& src) {
  if (auto t = s.choice<SourceType>("kind", {{"impulse", SourceType::impulse},
                                              {"tone", SourceType::tone},
                                              {"broadband", SourceType::broadband}})) {
    src.type = *t;
  }
  s.positive("sample_rate", src.sample_rate);
  s.positive("duration", src.duration);
  if (s.has("impulse")) {
    Section i = s.child("impulse");
    if (auto nominal = i.get<int>("nominal_oispl")) {
      try {
        src.impulse.peak_pressure = impulse_preset(*nominal).peak_pressure;
      } catch (const DomainError&) {
        throw i.error(s.raw("impulse")["nominal_oispl"], "impulse.nominal_oispl must be 120, 130, 140 or 150");
      }
    }
    i.positive("peak_pressure", src.impulse.peak_pressure);
    i.positive("width", src.impulse.width);
    i.read("center_time", src.impulse.center_time);
    if (auto shape = i.choice<ImpulseShape>("shape", {{"gaussian", ImpulseShape::gaussian},
                                                       {"hann_burst", ImpulseShape::hann_burst}})) {
      src.impulse.shape = *shape;
    }
    i.read("count", src.pulse_count);
    i.positive("period", src.pulse_period);
    i.finish();
  }
  if (s.has("tone")) {
    Section t = s.child("tone");
    t.positive("frequency", src.tone_frequency);
    t.read("level_db", src.tone_level);
    t.finish();
  }
  if (s.has("broadband")) {
    Section b = s.child("broadband");
    if (auto p = b.choice<BroadbandPreset>("preset", {{"geometric_10k", BroadbandPreset::geometric_10k},
                                                      {"first_band_500", BroadbandPreset::first_band_500}})) {
      src.preset = *p;
    }
    b.read("oispl_db", src.broadband_level);
    if (auto v = b.get<int>("bands")) src.bands = *v;
    if (auto v = b.get<double>("growth_ratio")) src.growth_ratio = *v;
    if (auto v = b.get<double>("total_bandwidth")) src.total_bandwidth = *v;
    b.read("base_frequency", src.base_frequency);
    b.finish();
  }
  s.finish();
}

void parse_tube(Section s, TubeConfig& t, const Medium& medium) {
  TubeLayout& l = t.layout;
  l.medium = medium;
  s.positive("source_to_mic1", l.source_to_mic1);
  s.positive("mic1_to_sample", l.mic1_to_sample);
  s.positive("sample_to_mic2", l.sample_to_mic2);
  s.positive("mic2_to_termination", l.mic2_to_termination);
  s.read("duct_losses", l.include_duct_losses);
  s.read("source_reflection", l.source_reflection);
  if (auto m = s.choice<ReflectionModel>("model", {{"first_order", ReflectionModel::first_order},
                                                    {"multi_bounce", ReflectionModel::multi_bounce}})) {
    l.model = *m;
  }
  if (s.has("termination")) {
    const YAML::Node n = s.raw("termination");
    if (n.IsScalar()) {
      const auto v = n.as<std::string>();
      if (v == "anechoic") l.termination.kind = TerminationKind::anechoic;
      else if (v == "rigid") l.termination.kind = TerminationKind::rigid;
      else throw s.error(n, "tube.termination must be anechoic, rigid or {reflection: [re, im]}");
    } else {
      if (!n.IsMap() || !n["reflection"] || !n["reflection"].IsSequence() || n["reflection"].size() != 2 || n.size() != 1) {
        throw s.error(n, "tube.termination must be anechoic, rigid or {reflection: [re, im]}");
      }
      l.termination.kind = TerminationKind::reflection;
      l.termination.reflection = {s.convert<double>(n["reflection"][0], "termination.reflection"),
                                  s.convert<double>(n["reflection"][1], "termination.reflection")};
    }
  }
  if (auto p = s.choice<PortType>("port", {{"tmm", PortType::tmm}, {"identity", PortType::identity}, {"rigid", PortType::rigid}})) {
    t.port = *p;
  }
  s.read("noise_rms", t.noise_rms);
  if (!(t.noise_rms >= 0.0)) throw s.error(s.raw("noise_rms"), "tube.noise_rms must be non-negative");
  s.finish();
}

void parse_processing(Section s, ProcessingConfig& p, const Medium& medium) {
  if (auto m = s.choice<ProcessMode>("mode", {{"impulse", ProcessMode::impulse}, {"two_mic", ProcessMode::two_mic}})) {
    p.mode = *m;
  }
  if (s.has("welch")) {
    Section w = s.child("welch");
    if (auto b = w.get<int>("block_size")) {
      if (*b < 16) throw w.error(s.raw("welch")["block_size"], "processing.welch.block_size must be >= 16");
      p.welch.block_size = static_cast<std::size_t>(*b);
    }
    w.read("overlap", p.welch.overlap_fraction);
    if (!(p.welch.overlap_fraction >= 0.0 && p.welch.overlap_fraction <= 0.95)) {
      throw w.error(s.raw("welch")["overlap"], "processing.welch.overlap must lie in [0, 0.95]");
    }
    w.finish();
  }
  if (auto t = s.choice<Taper>("taper", {{"hann", Taper::hann}, {"rectangular", Taper::rectangular}})) p.taper = *t;
  s.positive("gate_half_width", p.gate_half_width);
  if (s.has("gates")) {
    Section g = s.child("gates");
    p.incident_gate = g.gate("incident", p.taper);
    p.reflected_gate = g.gate("reflected", p.taper);
    p.transmitted_gate = g.gate("transmitted", p.taper);
    p.noise_gate = g.gate("noise", p.taper);
    g.finish();
  }
  s.read("snr_db", p.snr_db);
  if (auto v = s.get<double>("noise_floor_psd")) {
    if (!(*v >= 0.0)) throw s.error(s.raw("noise_floor_psd"), "processing.noise_floor_psd must be non-negative");
    p.noise_floor_psd = *v;
  }
  if (s.has("band")) {
    const auto band = s.numbers("band");
    if (band.size() != 2 || !(band[1] > band[0])) throw s.error(s.raw("band"), "processing.band must be [low, high]");
    p.band_low = band[0];
    p.band_high = band[1];
  }
  p.two_mic.medium = medium;
  if (s.has("two_mic")) {
    Section t = s.child("two_mic");
    t.positive("spacing", p.two_mic.mic_spacing);
    t.positive("mic1_to_reference", p.two_mic.mic1_to_reference);
    t.read("sin_floor", p.two_mic.sin_floor);
    p.tones = t.numbers("tones");
    t.finish();
  }
  if (s.has("inputs")) {
    Section in = s.child("inputs");
    if (auto v = in.get<std::string>("mic1")) p.mic1 = *v;
    if (auto v = in.get<std::string>("mic2")) p.mic2 = *v;
    in.finish();
  }
  s.finish();
}

void parse_casegen(Section s, CasegenConfig& c) {
  s.positive("length_scale", c.length_scale);
  s.positive("f_max", c.f_max);
  s.read("dims", c.dims);
  if (c.dims != 2 && c.dims != 3) throw s.error(s.raw("dims"), "casegen.dims must be 2 or 3");
  s.read("duration_cycles", c.duration_cycles);
  if (auto k = s.choice<SourceKind>("source", {{"tone", SourceKind::tone}, {"broadband", SourceKind::broadband}})) {
    c.source = *k;
  }
  s.read("level_db", c.level_db);
  if (auto row = s.get<std::string>("table_row")) c.table_row = *row;
  if (auto n = s.get<std::int64_t>("transverse_cells")) {
    if (*n < 1) throw s.error(s.raw("transverse_cells"), "casegen.transverse_cells must be positive");
    c.transverse_override = *n;
  }
  s.finish();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(source_name + ":1: empty config");
  Section top(root, "", &source_name);
  RunConfig cfg;
  const auto version = top.get<int>("schema_version");
  if (!version) throw ConfigError(source_name + ":1: missing schema_version");
  if (*version != kConfigSchemaVersion) {
    throw top.error(root["schema_version"], "unsupported schema_version " + std::to_string(*version));
  }
  if (auto seed = top.get<std::uint64_t>("seed")) cfg.seed = *seed;
  if (top.has("medium")) parse_medium(top.child("medium"), cfg.medium);
  try {
    cfg.medium.validate();
  } catch (const DomainError& e) {
    throw top.error(root["medium"], e.what());
  }
  if (top.has("geometry")) parse_geometry(top.child("geometry"), cfg.geometry);
  else cfg.geometry.plates = {1};
  if (top.has("tmm")) parse_tmm(top.child("tmm"), cfg.tmm);
  if (cfg.tmm.frequencies.empty()) {
    for (int i = 0;; ++i) {
      const double f = 1000.0 + 51.2 * i;
      if (f > 5000.0) break;
      cfg.tmm.frequencies.push_back(f);
    }
  }
  if (top.has("source")) parse_source(top.child("source"), cfg.source);
  parse_tube(top.child("tube"), cfg.tube, cfg.medium);
  cfg.tube.layout.bore_diameter = cfg.geometry.bore_diameter;
  parse_processing(top.child("processing"), cfg.processing, cfg.medium);
  if (top.has("casegen")) parse_casegen(top.child("casegen"), cfg.casegen);
  if (top.has("output")) {
    Section out = top.child("output");
    if (auto dir = out.get<std::string>("dir")) cfg.out_dir = *dir;
    out.finish();
  }
  top.finish();
  cfg.hash = hash_hex(fnv1a64(text));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(path.string() + ":0: " + e.what());
  }
  return parse_config(text, path.string());
}

void apply_overrides(RunConfig& cfg, const CommandOptions& opts) {
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.hash = hash_hex(fnv1a64(cfg.hash + " seed=" + std::to_string(*opts.seed)));
  }
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
}

std::vector<std::pair<std::string, LeakGeometry>> GeometryConfig::geometries() const {
  std::vector<std::pair<std::string, LeakGeometry>> out;
  if (!plates.empty()) {
    const auto catalogue = orifice_plates(bore_diameter);
    for (int p : plates) {
      out.emplace_back("plate" + std::to_string(p), catalogue[static_cast<std::size_t>(p - 1)].geometry(bore_diameter));
    }
  } else if (raw) {
    out.emplace_back("raw", *raw);
  }
  return out;
}

}  // namespace leakwave::cli
