#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "leakwave/casegen.hpp"
#include "leakwave/errors.hpp"
#include "leakwave/io.hpp"

using namespace leakwave;

namespace {
const Medium kAir = Medium::air_standard();
}

TEST_CASE("3D transverse grid counts") {
  const std::int64_t published[] = {300, 420, 520};
  const double freqs[] = {1000.0, 2000.0, 3000.0};
  const std::int64_t planned[] = {300, 420, 500};
  for (int i = 0; i < 3; ++i) {
    const CasePlan plan = plan_case(0.025, freqs[i], kAir, 3, 10);
    REQUIRE(plan.grid_counts.size() == 3);
    CHECK(plan.grid_counts[1] == planned[i]);
    CHECK(plan.grid_counts[2] == planned[i]);
    CHECK(plan.grid_counts[0] == 12 * planned[i]);
    CHECK(std::abs(static_cast<double>(plan.grid_counts[1] - published[i])) / published[i] < 0.1);
    CHECK(plan.grid_counts[1] % kGridRounding == 0);
    CHECK(validate_plan(plan, kAir).passed());
  }
}

TEST_CASE("table time steps are reproduced") {
  const CasePlan p1 = plan_case(0.025, 1000.0, kAir, 3, 10);
  CHECK(p1.dt == 1e-7);
  CHECK(p1.n_steps == 400000);
  CHECK(p1.dt_source == TimeStepSource::reference_table);
  const CasePlan other = plan_case(0.02, 1000.0, kAir, 3, 10);
  CHECK(other.dt_source == TimeStepSource::acoustic_cfl);
  CHECK(other.dt == doctest::Approx(kAcousticCfl / static_cast<double>(other.grid_counts[1])));
  const CasePlan bb = plan_case(0.03, 4000.0, kAir, 2, 10, SourceKind::broadband);
  CHECK(bb.n_steps == kBroadbandSteps);
}

TEST_CASE("published rows") {
  const auto plans = reference_table_plans();
  REQUIRE(plans.size() == 5);
  CHECK(plans[0].grid_counts == std::vector<std::int64_t>{14400, 1200});
  CHECK(plans[0].n_steps == 5000000);
  CHECK(plans[2].grid_counts == std::vector<std::int64_t>{3600, 300, 300});
  CHECK(plans[3].grid_counts[1] == 420);
  CHECK(plans[4].grid_counts[1] == 520);
  for (const auto& p : plans) {
    const auto report = validate_plan(p, kAir);
    CHECK_MESSAGE(report.passed(), report.to_text());
  }
}

TEST_CASE("validation margins") {
  CasePlan plan = plan_case(0.025, 1000.0, kAir, 3, 10);
  plan.grid_counts = {1800, 150, 150};
  const auto report = validate_plan(plan, kAir);
  CHECK_FALSE(report.passed());
  bool stokes_failed = false;
  for (const auto& c : report.checks) {
    if (!c.passed && c.rule.find("Stokes") != std::string::npos) {
      stokes_failed = true;
      CHECK(c.value == doctest::Approx(2.61863141286).epsilon(1e-6));
      CHECK(c.margin() < 0.0);
    }
  }
  CHECK(stokes_failed);
  CHECK(report.to_text().find("FAIL") != std::string::npos);
  plan = plan_case(0.025, 1000.0, kAir, 3, 10);
  plan.domain_extents[0] = 20.0;
  CHECK_FALSE(validate_plan(plan, kAir).passed());
}

TEST_CASE("case file round trip") {
  for (const auto& plan : reference_table_plans()) {
    const std::string text = format_case(plan);
    CHECK(parse_case(text) == plan);
    CHECK(format_case(parse_case(text)) == text);
  }
  const CasePlan derived = plan_case(0.0213, 2345.6, kAir, 3, 7, SourceKind::tone, 133.3);
  CHECK(parse_case(format_case(derived)) == derived);
}

TEST_CASE("case file errors") {
  const std::string good = format_case(reference_table_plans()[2]);
  CHECK_THROWS_AS(parse_case(good + "bogus = 1\n"), ConfigurationError);
  CHECK_THROWS_AS(parse_case(good + "dt = 1\n"), ConfigurationError);
  std::string missing = good;
  missing.erase(missing.find("steps"), missing.find('\n', missing.find("steps")) - missing.find("steps") + 1);
  CHECK_THROWS_AS(parse_case(missing), ConfigurationError);
  try {
    parse_case("schema_version = 1\ndimensionality = x\n");
    FAIL("expected an error");
  } catch (const ConfigurationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("emit is byte identical") {
  const auto dir = std::filesystem::temp_directory_path() / "leakwave_casegen_test";
  std::filesystem::create_directories(dir);
  const CasePlan plan = reference_table_plans()[0];
  emit_case(plan, dir / "a.txt");
  emit_case(plan, dir / "b.txt");
  CHECK(read_file(dir / "a.txt") == read_file(dir / "b.txt"));
  CHECK(parse_case(read_file(dir / "a.txt")) == plan);
  std::filesystem::remove_all(dir);
}

TEST_CASE("plan input checks") {
  CHECK_THROWS(plan_case(0.025, 1000.0, kAir, 4, 10));
  CHECK_THROWS(plan_case(-1.0, 1000.0, kAir, 3, 10));
  CHECK_THROWS(plan_case(0.025, 0.0, kAir, 3, 10));
}
