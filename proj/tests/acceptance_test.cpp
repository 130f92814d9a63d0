// Acceptance suite: runs every validation criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <catch2/catch_amalgamated.hpp>

#include "renact/validate.hpp"

TEST_CASE("acceptance battery") {
  renact::validate::ValidateOptions opt;
  opt.seed = 42;
  opt.workers = 4;
  opt.samples_scale = 1.0;
  const auto report = renact::validate::run_acceptance(opt, /*print_lines=*/true);
  REQUIRE(report.results.size() == 12);
  for (const auto& r : report.results) {
    INFO("criterion " << r.id << " (" << r.name << "): " << r.details);
    CHECK(r.pass);
  }
}
