#include <doctest.h>

#include <cmath>
#include <vector>

#include "leakwave/errors.hpp"
#include "leakwave/tmm.hpp"

using namespace leakwave;

namespace {

const Medium kAir = Medium::air_standard();
const Medium kInviscid = kAir.with_viscosity(0.0);

LeakGeometry plate(int index) { return orifice_plates()[static_cast<std::size_t>(index)].geometry(kTubeBoreDiameter); }

double inv_tau_closed_form(double sigma, double kl) {
  const double c = std::cos(kl), s = std::sin(kl);
  return c * c + 0.25 * (sigma + 1.0 / sigma) * (sigma + 1.0 / sigma) * s * s;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> f;
  for (double v = lo; v <= hi + 1e-9; v += step) f.push_back(v);
  return f;
}

}  // namespace

TEST_CASE("plate catalogue") {
  const auto plates = orifice_plates();
  REQUIRE(plates.size() == 5);
  CHECK(plate(0).effective_length() == doctest::Approx(0.0039152957).epsilon(1e-9));
  CHECK(plates[0].area_ratio == doctest::Approx(0.071 * 0.071));
  CHECK(plates[4].area_ratio == doctest::Approx(1.0));
  for (const auto& p : plates) CHECK(p.thickness == doctest::Approx(0.125 * kTubeBoreDiameter));
}

TEST_CASE("geometry validation") {
  LeakGeometry g = plate(0);
  CHECK_NOTHROW(g.validate());
  g.area_leak = 0.0;
  CHECK_THROWS_AS(g.validate(), DegenerateGeometry);
  g = plate(0);
  g.area_leak = 2.0 * g.area_outer;
  CHECK_THROWS_AS(g.validate(), DomainError);
  g = plate(0);
  g.radius = -1.0;
  CHECK_THROWS_AS(g.validate(), DegenerateGeometry);
  CHECK_THROWS_AS(OrificePlateSpec::from_ratios("x", 1.5, 0.125, kTubeBoreDiameter), DomainError);
}

TEST_CASE("blackstock wavenumber oracle") {
  const cdouble k = blackstock_wavenumber(kAir, 1e-3, 1000.0);
  CHECK(k.real() == doctest::Approx(19.256548248581759).epsilon(1e-12));
  CHECK(k.imag() == doctest::Approx(-0.93822373785410193).epsilon(1e-12));
  const cdouble k0 = blackstock_wavenumber(kInviscid, 1e-3, 1000.0);
  CHECK(k0.real() == doctest::Approx(2.0 * kPi * 1000.0 / 343.0).epsilon(1e-15));
  CHECK(k0.imag() == 0.0);
  CHECK_THROWS_AS(blackstock_wavenumber(kAir, 0.0, 1000.0), DomainError);
  CHECK_THROWS_AS(blackstock_wavenumber(kAir, 1e-3, 0.0), DomainError);
}

TEST_CASE("closed-form oracle values") {
  // sigma = 0.005 exactly, plate 1 effective length, 2 kHz.
  const LeakGeometry base = plate(0);
  const double s1 = 1.0;
  LeakGeometry g{s1, 0.005 * s1, s1, base.length, base.radius};
  const double f = 2000.0;
  const Spectrum tl = tl_spectrum(g, kInviscid, std::vector<double>{f}, TmmOptions{false, true});
  CHECK(tl.real_at(0) == doctest::Approx(23.124783286203502).epsilon(1e-10));
  const cdouble k = blackstock_wavenumber(kInviscid, g.radius, f);
  const auto amps = solve_amplitudes(g, k);
  CHECK(1.0 / transmission_coefficient(amps, g) == doctest::Approx(205.34225577130235).epsilon(1e-10));
}

TEST_CASE("inviscid system matches expansion-chamber formula") {
  const auto freqs = grid(1000.0, 6000.0, 100.0);
  for (double sigma : {0.005, 0.01, 0.05, 0.1, 1.0}) {
    LeakGeometry g{1e-3, sigma * 1e-3, 1e-3, 3.175e-3, std::sqrt(sigma * 1e-3 / kPi)};
    const Spectrum tl = tl_spectrum(g, kInviscid, freqs, TmmOptions{false, true});
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const double kl = 2.0 * kPi * freqs[i] / kAir.sound_speed * g.effective_length();
      const double expected = inv_tau_closed_form(sigma, kl);
      const double got = std::pow(10.0, tl.real_at(i) / 10.0);
      CHECK(std::abs(got - expected) / expected < 1e-9);
    }
  }
}

TEST_CASE("amplitudes satisfy the conservation rows") {
  for (int p = 0; p < 5; ++p) {
    const LeakGeometry g = plate(p);
    for (double f : {500.0, 2000.0, 5500.0}) {
      const cdouble k = blackstock_wavenumber(kAir, g.radius, f);
      const auto amps = solve_amplitudes(g, k);
      CHECK(relative_residual(assemble_coupling_matrix(g, k), amps) < 1e-12);
    }
  }
}

TEST_CASE("plate sweep oracle") {
  struct Row {
    int plate;
    double f, tl_viscous, tl_inviscid, alpha;
  };
  const Row rows[] = {
      {0, 1000.0, 17.627211, 17.119533, 0.013704}, {0, 2000.0, 23.371259, 23.054194, 0.0051463},
      {0, 5000.0, 30.97574, 30.837862, 0.0014032}, {1, 1000.0, 12.390612, 12.01134, 0.017502},
      {2, 1000.0, 3.1571404, 3.017551, 0.015738},  {3, 1000.0, 1.3467989, 1.2825926, 0.0089736},
      {3, 5000.0, 9.4041614, 9.3779501, 0.0031268},
  };
  for (const auto& r : rows) {
    const LeakGeometry g = plate(r.plate);
    const std::vector<double> f{r.f};
    CHECK(tl_spectrum(g, kAir, f).real_at(0) == doctest::Approx(r.tl_viscous).epsilon(1e-6));
    CHECK(tl_spectrum(g, kAir, f, TmmOptions{false, true}).real_at(0) == doctest::Approx(r.tl_inviscid).epsilon(1e-6));
    CHECK(alpha_spectrum(g, kAir, f).real_at(0) == doctest::Approx(r.alpha).epsilon(1e-4));
  }
}

TEST_CASE("limiting cases") {
  const auto freqs = grid(1000.0, 5000.0, 50.0);
  const Spectrum open = tl_spectrum(plate(4), kAir, freqs);
  for (std::size_t i = 0; i < open.size(); ++i) CHECK(std::abs(open.real_at(i)) < 0.05);
  for (int p = 0; p < 5; ++p) {
    const Spectrum low = tl_spectrum(plate(p), kAir, std::vector<double>{0.01, 0.1, 1.0, 10.0});
    for (std::size_t i = 1; i < low.size(); ++i) CHECK(low.real_at(i - 1) <= low.real_at(i) + 1e-12);
    CHECK(low.real_at(0) < 0.05);
    const Spectrum a = alpha_spectrum(plate(p), kInviscid, freqs);
    const Spectrum tv = tl_spectrum(plate(p), kAir, freqs);
    const Spectrum ti = tl_spectrum(plate(p), kAir, freqs, TmmOptions{false, true});
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      CHECK(std::abs(a.real_at(i)) < 1e-9);
      CHECK(tv.real_at(i) >= ti.real_at(i));
    }
  }
}

TEST_CASE("plate ordering") {
  const auto freqs = grid(1000.0, 5000.0, 51.2);
  std::vector<Spectrum> tl;
  for (int p = 0; p < 5; ++p) tl.push_back(tl_spectrum(plate(p), kAir, freqs));
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    for (int p = 1; p < 5; ++p) CHECK(tl[p - 1].real_at(i) > tl[p].real_at(i));
  }
}

TEST_CASE("energy balance") {
  const auto freqs = grid(100.0, 6000.0, 100.0);
  for (int p = 0; p < 5; ++p) {
    const Spectrum a = alpha_spectrum(plate(p), kAir, freqs);
    CHECK_NOTHROW(a.validate());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.real_at(i) >= -1e-9);
  }
}

TEST_CASE("area weighting") {
  // Unequal ducts: the unweighted |E|^2 differs by S3/S1 in power.
  LeakGeometry g{2e-4, 1e-5, 1e-4, 3e-3, std::sqrt(1e-5 / kPi)};
  const std::vector<double> f{1500.0};
  const double weighted = tl_spectrum(g, kAir, f).real_at(0);
  const double raw = tl_spectrum(g, kAir, f, TmmOptions{true, false}).real_at(0);
  CHECK(weighted - raw == doctest::Approx(-10.0 * std::log10(0.5)));
}

TEST_CASE("sweep errors") {
  CHECK_THROWS_AS(tl_spectrum(plate(0), kAir, std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(tl_spectrum(plate(0), kAir, std::vector<double>{2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(tl_spectrum(plate(0), kAir, std::vector<double>{-5.0}), DomainError);
  LeakGeometry bad = plate(0);
  bad.length = 0.0;
  CHECK_THROWS_AS(tl_spectrum(bad, kAir, std::vector<double>{1000.0}), DegenerateGeometry);
}

TEST_CASE("sweep is independent of thread count") {
  const auto freqs = grid(1000.0, 6000.0, 10.0);
  setenv("LEAKWAVE_THREADS", "1", 1);
  const Spectrum one = tl_spectrum(plate(0), kAir, freqs);
  setenv("LEAKWAVE_THREADS", "4", 1);
  const Spectrum four = tl_spectrum(plate(0), kAir, freqs);
  unsetenv("LEAKWAVE_THREADS");
  CHECK(one.values == four.values);
}
