#include "leakwave/casegen.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "leakwave/errors.hpp"
#include "leakwave/io.hpp"

namespace leakwave {

namespace {

constexpr int kCaseSchemaVersion = 1;

struct TableRow {
  int dims;
  SourceKind source;
  double frequency;
  std::int64_t axial, transverse;
  double dt;
  std::int64_t steps;
};

// Published rows. Tonal 2D runs and broadband runs resolve up to 6 kHz.
constexpr TableRow kTable[] = {
    {2, SourceKind::broadband, 6000.0, 14400, 1200, 2.5e-8, 5'000'000},
    {2, SourceKind::tone, 6000.0, 14400, 1200, 2.5e-8, 1'600'000},
    {3, SourceKind::tone, 1000.0, 3600, 300, 1e-7, 400'000},
    {3, SourceKind::tone, 2000.0, 5040, 420, 7.5e-8, 540'000},
    {3, SourceKind::tone, 3000.0, 6240, 520, 7.5e-8, 540'000},
};
constexpr double kTableLength = 0.025;

CasePlan plan_from_row(const TableRow& row) {
  CasePlan plan;
  plan.dimensionality = row.dims;
  plan.length_scale = kTableLength;
  plan.domain_extents.assign(static_cast<std::size_t>(row.dims), 1.0);
  plan.domain_extents[0] = kDomainAspect;
  plan.grid_counts.assign(static_cast<std::size_t>(row.dims), row.transverse);
  plan.grid_counts[0] = row.axial;
  plan.dt = row.dt;
  plan.dt_source = TimeStepSource::reference_table;
  plan.n_steps = row.steps;
  plan.source = row.source;
  plan.frequency = row.frequency;
  return plan;
}

std::int64_t round_up(double cells, int multiple) {
  const auto n = static_cast<std::int64_t>(std::ceil(cells - 1e-9));
  return ((n + multiple - 1) / multiple) * multiple;
}


template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

const char* to_string(SourceKind kind) { return kind == SourceKind::tone ? "tone" : "broadband"; }

const char* to_string(TimeStepSource source) {
  return source == TimeStepSource::reference_table ? "reference_table" : "acoustic_cfl";
}

double CasePlan::spacing(std::size_t axis) const {
  return domain_extents.at(axis) * length_scale / static_cast<double>(grid_counts.at(axis));
}

CasePlan plan_case(double length_scale, double f_max, const Medium& medium, int dims, int duration_cycles,
                   SourceKind source, double target_level) {
  if (!(length_scale > 0.0) || !(f_max > 0.0) || !std::isfinite(length_scale) || !std::isfinite(f_max)) {
    throw DomainError("plan_case: length scale and frequency must be positive");
  }
  if (dims != 2 && dims != 3) throw DomainError("plan_case: dimensionality must be 2 or 3");
  if (duration_cycles < 1) throw DomainError("plan_case: duration_cycles must be >= 1");
  medium.validate();
  if (!(medium.dynamic_viscosity > 0.0)) throw DomainError("plan_case: the Stokes rule needs a viscous medium");

  const double stokes = stokes_wavelength(medium.kinematic_viscosity(), f_max);
  const double acoustic = medium.sound_speed / f_max;
  const double cells = std::max(kMinCellsPerStokesWavelength * length_scale / stokes,
                                kMinCellsPerAcousticWavelength * length_scale / acoustic);
  const std::int64_t transverse = round_up(cells, kGridRounding);

  CasePlan plan;
  plan.dimensionality = dims;
  plan.length_scale = length_scale;
  plan.domain_extents.assign(static_cast<std::size_t>(dims), 1.0);
  plan.domain_extents[0] = kDomainAspect;
  plan.grid_counts.assign(static_cast<std::size_t>(dims), transverse);
  plan.grid_counts[0] = static_cast<std::int64_t>(kDomainAspect) * transverse;
  plan.source = source;
  plan.frequency = f_max;
  plan.target_level = target_level;

  for (const auto& row : kTable) {
    if (row.dims == dims && row.source == source && row.frequency == f_max &&
        std::abs(length_scale - kTableLength) < 1e-12) {
      plan.dt = row.dt;
      plan.dt_source = TimeStepSource::reference_table;
      plan.n_steps = row.steps;
      return plan;
    }
  }
  // Acoustic CFL c0 dt / dx <= 0.7 with dt in units of L / c0.
  plan.dt = kAcousticCfl / static_cast<double>(transverse);
  plan.dt_source = TimeStepSource::acoustic_cfl;
  if (source == SourceKind::broadband) {
    plan.n_steps = kBroadbandSteps;
  } else {
    const double steps_per_cycle = std::ceil(medium.sound_speed / (f_max * length_scale) / plan.dt);
    plan.n_steps = static_cast<std::int64_t>(duration_cycles) * static_cast<std::int64_t>(steps_per_cycle);
  }
  return plan;
}

std::vector<CasePlan> reference_table_plans() {
  std::vector<CasePlan> plans;
  for (const auto& row : kTable) plans.push_back(plan_from_row(row));
  return plans;
}

bool ValidationReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.rule << ": value " << format_double(c.value) << ", threshold "
       << format_double(c.threshold) << ", margin " << format_double(c.margin()) << '\n';
  }
  return os.str();
}

ValidationReport validate_plan(const CasePlan& plan, const Medium& medium) {
  const auto dims = static_cast<std::size_t>(plan.dimensionality);
  if ((dims != 2 && dims != 3) || plan.domain_extents.size() != dims || plan.grid_counts.size() != dims) {
    throw ConfigurationError("validate_plan: extents and grid counts must match the dimensionality");
  }
  for (std::size_t a = 0; a < dims; ++a) {
    if (!(plan.domain_extents[a] > 0.0) || plan.grid_counts[a] < 1) {
      throw ConfigurationError("validate_plan: extents and grid counts must be positive");
    }
  }
  ValidationReport report;
  double dx = 0.0, dx_min = 0.0, dx_max = 0.0;
  for (std::size_t a = 0; a < dims; ++a) {
    const double h = plan.spacing(a);
    dx = std::max(dx, h);
    dx_min = a == 0 ? h : std::min(dx_min, h);
    dx_max = a == 0 ? h : std::max(dx_max, h);
  }
  const double stokes = stokes_wavelength(medium.kinematic_viscosity(), plan.frequency);
  const double acoustic = medium.sound_speed / plan.frequency;
  report.checks.push_back({"cells per Stokes-layer wavelength", stokes / dx >= kMinCellsPerStokesWavelength,
                           stokes / dx, kMinCellsPerStokesWavelength});
  report.checks.push_back({"cells per acoustic wavelength", acoustic / dx >= kMinCellsPerAcousticWavelength,
                           acoustic / dx, kMinCellsPerAcousticWavelength});
  double aspect = plan.domain_extents[0];
  for (std::size_t a = 1; a < dims; ++a) aspect = std::min(aspect, plan.domain_extents[0] / plan.domain_extents[a]);
  const bool aspect_ok = std::abs(aspect - kDomainAspect) <= 1e-9 * kDomainAspect;
  report.checks.push_back({"domain aspect (axial : transverse)", aspect_ok, aspect, kDomainAspect});
  const double spread = (dx_max - dx_min) / dx_max;
  report.checks.push_back({"uniform spacing (relative spread)", spread <= 1e-9, spread, 1e-9});
  return report;
}

std::string format_case(const CasePlan& plan) {
  std::ostringstream os;
  os << "# leakwave DNS case\n";
  os << "schema_version = " << kCaseSchemaVersion << '\n';
  os << "dimensionality = " << plan.dimensionality << '\n';
  os << "length_scale_m = " << format_double(plan.length_scale) << '\n';
  os << "domain = " << join(plan.domain_extents) << '\n';
  os << "grid = " << join(plan.grid_counts) << '\n';
  os << "dt = " << format_double(plan.dt) << '\n';
  os << "dt_units = L/c0\n";
  os << "dt_source = " << to_string(plan.dt_source) << '\n';
  os << "steps = " << plan.n_steps << '\n';
  os << "source.kind = " << to_string(plan.source) << '\n';
  os << "source.frequency_hz = " << format_double(plan.frequency) << '\n';
  os << "source.level_db = " << format_double(plan.target_level) << '\n';
  os << "source.offset = " << format_double(plan.source_offset) << '\n';
  return os.str();
}

CasePlan parse_case(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> fields;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("case line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (fields.count(key)) throw ConfigurationError("case line " + std::to_string(line_no) + ": duplicate key " + key);
    fields[key] = {trim(line.substr(eq + 1)), line_no};
  }
  const auto take = [&](const std::string& key) -> std::pair<std::string, int> {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigurationError("case: missing key " + key);
    auto v = it->second;
    fields.erase(it);
    return v;
  };
  const auto fail = [](int line_no, const std::string& what) {
    return ConfigurationError("case line " + std::to_string(line_no) + ": " + what);
  };
  const auto number = [&](const std::string& key) {
    const auto [v, ln] = take(key);
    try {
      return parse_double(v);
    } catch (const Error&) {
      throw fail(ln, "invalid number for " + key);
    }
  };
  const auto integer = [&](const std::string& key) {
    const auto [v, ln] = take(key);
    try {
      return parse_int64(v);
    } catch (const Error&) {
      throw fail(ln, "invalid integer for " + key);
    }
  };

  CasePlan plan;
  if (integer("schema_version") != kCaseSchemaVersion) throw ConfigurationError("case: unsupported schema_version");
  plan.dimensionality = static_cast<int>(integer("dimensionality"));
  plan.length_scale = number("length_scale_m");
  {
    const auto [v, ln] = take("domain");
    for (const auto& tok : split_whitespace(v)) plan.domain_extents.push_back(parse_double(tok));
  }
  {
    const auto [v, ln] = take("grid");
    for (const auto& tok : split_whitespace(v)) plan.grid_counts.push_back(parse_int64(tok));
  }
  plan.dt = number("dt");
  if (const auto [v, ln] = take("dt_units"); v != "L/c0") throw fail(ln, "dt_units must be L/c0");
  {
    const auto [v, ln] = take("dt_source");
    if (v == "reference_table") plan.dt_source = TimeStepSource::reference_table;
    else if (v == "acoustic_cfl") plan.dt_source = TimeStepSource::acoustic_cfl;
    else throw fail(ln, "unknown dt_source " + v);
  }
  plan.n_steps = integer("steps");
  {
    const auto [v, ln] = take("source.kind");
    if (v == "tone") plan.source = SourceKind::tone;
    else if (v == "broadband") plan.source = SourceKind::broadband;
    else throw fail(ln, "unknown source.kind " + v);
  }
  plan.frequency = number("source.frequency_hz");
  plan.target_level = number("source.level_db");
  plan.source_offset = number("source.offset");
  if (!fields.empty()) {
    const auto& [key, val] = *fields.begin();
    throw fail(val.second, "unknown key " + key);
  }
  if (plan.domain_extents.size() != static_cast<std::size_t>(plan.dimensionality) ||
      plan.grid_counts.size() != static_cast<std::size_t>(plan.dimensionality)) {
    throw ConfigurationError("case: domain and grid must list one entry per dimension");
  }
  return plan;
}

void emit_case(const CasePlan& plan, const std::filesystem::path& path) { write_file_atomic(path, format_case(plan)); }

}  // namespace leakwave
