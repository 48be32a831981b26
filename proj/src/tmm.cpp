#include "leakwave/tmm.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "leakwave/errors.hpp"
#include "parallel.hpp"

namespace leakwave {

namespace {

constexpr double kMaxCondition = 1e12;

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void check_frequencies(std::span<const double> frequencies) {
  if (frequencies.empty()) throw DomainError("frequency grid is empty");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!positive_finite(frequencies[i])) {
      throw DomainError("frequency at bin " + std::to_string(i) + " must be positive");
    }
    if (i > 0 && !(frequencies[i] > frequencies[i - 1])) {
      throw DomainError("frequencies must be strictly increasing (bin " + std::to_string(i) + ")");
    }
  }
}

cdouble leak_wavenumber(const LeakGeometry& geom, const Medium& medium, double f, bool viscous) {
  if (viscous) return blackstock_wavenumber(medium, geom.radius, f);
  return {2.0 * kPi * f / medium.sound_speed, 0.0};
}

template <typename PerBin>
Spectrum sweep(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
               const TmmOptions& options, SpectrumKind kind, PerBin&& per_bin) {
  geom.validate();
  medium.validate();
  check_frequencies(frequencies);
  std::vector<cdouble> values(frequencies.size());
  detail::parallel_for(frequencies.size(), sweep_threads(), [&](std::size_t i) {
    try {
      const cdouble k = leak_wavenumber(geom, medium, frequencies[i], options.viscous);
      values[i] = per_bin(solve_amplitudes(geom, k));
    } catch (const Error& e) {
      throw BinError(i, e.what());
    }
  });
  return Spectrum({frequencies.begin(), frequencies.end()}, std::move(values), kind);
}

}  // namespace

LeakGeometry LeakGeometry::circular(double outer_area, double leak_radius, double inner_area, double length) {
  LeakGeometry g{outer_area, kPi * leak_radius * leak_radius, inner_area, length, leak_radius};
  g.validate();
  return g;
}

void LeakGeometry::validate() const {
  if (!positive_finite(area_outer) || !positive_finite(area_leak) || !positive_finite(area_inner) ||
      !positive_finite(length) || !positive_finite(radius)) {
    throw DegenerateGeometry("leak geometry: areas, length and radius must be positive");
  }
  if (area_leak > std::min(area_outer, area_inner) * (1.0 + 1e-12)) {
    throw DomainError("leak geometry: leak area exceeds the smaller duct area");
  }
}

OrificePlateSpec OrificePlateSpec::from_ratios(std::string label, double diameter_ratio, double thickness_ratio,
                                               double bore_diameter) {
  if (!positive_finite(diameter_ratio) || diameter_ratio > 1.0) {
    throw DomainError("orifice plate: diameter ratio must be in (0, 1]");
  }
  if (!positive_finite(thickness_ratio) || !positive_finite(bore_diameter)) {
    throw DomainError("orifice plate: thickness and bore must be positive");
  }
  return {std::move(label), diameter_ratio * bore_diameter, thickness_ratio * bore_diameter,
          diameter_ratio * diameter_ratio};
}

LeakGeometry OrificePlateSpec::geometry(double bore_diameter) const {
  const double bore_area = kPi * bore_diameter * bore_diameter / 4.0;
  return LeakGeometry::circular(bore_area, inner_diameter / 2.0, bore_area, thickness);
}

std::vector<OrificePlateSpec> orifice_plates(double bore_diameter) {
  constexpr double kThickness = 0.125;
  return {
      OrificePlateSpec::from_ratios("#1 0.5% orifice plate", 0.071, kThickness, bore_diameter),
      OrificePlateSpec::from_ratios("#2 1% orifice plate", 0.100, kThickness, bore_diameter),
      OrificePlateSpec::from_ratios("#3 5% orifice plate", 0.224, kThickness, bore_diameter),
      OrificePlateSpec::from_ratios("#4 10% orifice plate", 0.316, kThickness, bore_diameter),
      OrificePlateSpec::from_ratios("#5 100% orifice plate", 1.0, kThickness, bore_diameter),
  };
}

cdouble blackstock_wavenumber(const Medium& medium, double radius, double frequency) {
  if (!positive_finite(radius)) throw DomainError("blackstock_wavenumber: radius must be positive");
  if (!positive_finite(frequency)) throw DomainError("blackstock_wavenumber: frequency must be positive");
  medium.validate();
  const double omega = 2.0 * kPi * frequency;
  const double k0 = omega / medium.sound_speed;
  const double boundary_layer = std::sqrt(medium.dynamic_viscosity / (2.0 * medium.density * omega));
  const double thermal = 1.0 + (medium.specific_heat_ratio - 1.0) / std::sqrt(medium.prandtl);
  const cdouble loss = cdouble(1.0, -1.0) / radius * boundary_layer * thermal;
  return k0 * (1.0 + loss);
}

CouplingMatrix assemble_coupling_matrix(const LeakGeometry& geom, cdouble wavenumber) {
  const double s1 = geom.area_outer, s2 = geom.area_leak, s3 = geom.area_inner;
  const cdouble i{0.0, 1.0};
  const double leff = geom.effective_length();
  const cdouble fwd = std::exp(-i * wavenumber * leff);
  const cdouble bwd = std::exp(i * wavenumber * leff);
  return {{
      {1.0, 1.0, -1.0, -1.0, 0.0},
      {s1, -s1, -s2, s2, 0.0},
      {0.0, 0.0, fwd, bwd, -fwd},
      {0.0, 0.0, s2 * fwd, -s2 * bwd, -s3 * fwd},
  }};
}

double relative_residual(const CouplingMatrix& m, const WaveAmplitudes& amps) {
  const auto p = amps.as_array();
  double res2 = 0.0, norm2 = 0.0;
  for (const auto& row : m) {
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      acc += row[j] * p[j];
      norm2 += std::norm(row[j]);
    }
    res2 += std::norm(acc);
  }
  return std::sqrt(res2 / norm2);
}

WaveAmplitudes solve_amplitudes(const LeakGeometry& geom, cdouble wavenumber) {
  geom.validate();
  if (!std::isfinite(wavenumber.real()) || !std::isfinite(wavenumber.imag())) {
    throw DomainError("solve_amplitudes: wavenumber must be finite");
  }
  const CouplingMatrix m = assemble_coupling_matrix(geom, wavenumber);

  // A = 1 moves column 0 to the right-hand side. Rows are equilibrated so the
  // condition number reflects geometry rather than the units of area.
  Eigen::Matrix4cd sub;
  Eigen::Vector4cd rhs;
  for (int r = 0; r < 4; ++r) {
    double scale = 0.0;
    for (int c = 0; c < 5; ++c) scale = std::max(scale, std::abs(m[r][c]));
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw DegenerateGeometry("solve_amplitudes: row " + std::to_string(r) + " is zero or non-finite");
    }
    for (int c = 0; c < 4; ++c) sub(r, c) = m[r][c + 1] / scale;
    rhs(r) = -m[r][0] / scale;
  }
  const Eigen::JacobiSVD<Eigen::Matrix4cd> svd(sub);
  const auto& sv = svd.singularValues();
  const double cond = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition)) {
    throw DegenerateGeometry("solve_amplitudes: conservation system is singular (condition number " +
                             std::to_string(cond) + ")");
  }
  const Eigen::Vector4cd x = sub.partialPivLu().solve(rhs);
  WaveAmplitudes amps;
  amps.B = x(0);
  amps.C = x(1);
  amps.D = x(2);
  amps.E = x(3);
  return amps;
}

double transmission_coefficient(const WaveAmplitudes& amps, const LeakGeometry& geom) {
  return geom.area_inner / geom.area_outer * std::norm(amps.E / amps.A);
}

double reflection_coefficient(const WaveAmplitudes& amps) { return std::norm(amps.B / amps.A); }

Spectrum tl_spectrum(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
                     const TmmOptions& options) {
  return sweep(geom, medium, frequencies, options, SpectrumKind::decibel, [&](const WaveAmplitudes& a) {
    const double tau = options.area_weighted ? transmission_coefficient(a, geom) : std::norm(a.E / a.A);
    return cdouble(transmission_loss(tau), 0.0);
  });
}

Spectrum alpha_spectrum(const LeakGeometry& geom, const Medium& medium, std::span<const double> frequencies,
                        const TmmOptions& options) {
  return sweep(geom, medium, frequencies, options, SpectrumKind::power_coefficient, [&](const WaveAmplitudes& a) {
    const double tau = options.area_weighted ? transmission_coefficient(a, geom) : std::norm(a.E / a.A);
    return cdouble(absorption_coefficient(reflection_coefficient(a), tau), 0.0);
  });
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("LEAKWAVE_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n >= 1) return static_cast<unsigned>(n);
    return 1;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace leakwave
