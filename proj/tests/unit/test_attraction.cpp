#include <cmath>

#include "doctest.h"
#include "roa/attraction.hpp"
#include "roa/errors.hpp"
#include "roa/models.hpp"
#include "roa/serialize.hpp"

using namespace roa;

namespace {

SimulationSettings uniform_settings() {
  SimulationSettings s;
  s.space = NormSpace::uniform();
  return s;
}

Verdict run(const Model& m, Shape shape, double p) {
  const SimulationSettings s = uniform_settings();
  const double par[] = {p};
  const Trajectory tr = simulate(m, instantiate(FamilySpec::scalar(shape), par, m.tau), s);
  return classify_detailed(tr, s.space, s.delta_num, s.trend_window, nullptr, s.min_trend_time).verdict;
}

ScanConfig scalar_scan(double radial_step = 0.1) {
  ScanConfig cfg;
  for (Shape s : {Shape::Constant, Shape::LinearIncreasing, Shape::Jump, Shape::LinearDecreasing}) {
    cfg.families.push_back(FamilySpec::scalar(s));
  }
  cfg.sim = uniform_settings();
  cfg.radial_step = radial_step;
  cfg.workers = 2;
  return cfg;
}

}  // namespace

TEST_CASE("scalar example verdicts") {
  CHECK(run(make_scalar_cubic(1.0), Shape::Constant, 1.0) == Verdict::Convergent);
  // Cross-checked with an independent method-of-steps integration (scipy,
  // rtol 1e-10): |p| = 0.4 still decays at tau = 5, |p| = 0.7 escapes.
  CHECK(run(make_scalar_cubic(5.0), Shape::LinearDecreasing, 0.4) == Verdict::Convergent);
  CHECK(run(make_scalar_cubic(5.0), Shape::LinearDecreasing, 0.7) == Verdict::NonConvergent);
  CHECK(run(make_scalar_cubic(5.0), Shape::LinearDecreasing, -0.7) == Verdict::NonConvergent);
  CHECK(run(make_scalar_cubic(1.0), Shape::Constant, 0.0) == Verdict::Convergent);
}

TEST_CASE("secondary bound of a monotone divergent run is its initial norm") {
  const Model m = make_scalar_cubic(1.0);
  const SimulationSettings s = uniform_settings();
  const double p[] = {2.0};
  std::vector<Trajectory> runs{simulate(m, instantiate(FamilySpec::scalar(Shape::Constant), p, 1.0), s)};
  CHECK(runs.front().termination() == Termination::Blowup);
  const SecondaryBound b = secondary_bound(runs, s.space);
  CHECK(b.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(secondary_bound({}, s.space).value == kInf);
}

TEST_CASE("scan invariants on the scalar example" * doctest::test_suite("slow")) {
  const Model m = make_scalar_cubic(5.0);
  const ScanResult r = star_scan(m, scalar_scan());
  CHECK(std::isfinite(r.merged_primary));
  bool strict = false;
  for (const auto& f : r.families) {
    CHECK(f.secondary <= f.primary + 1e-12);
    strict = strict || f.secondary < f.primary - 1e-6;
    for (const auto& d : f.directions) {
      for (const auto& smp : d.samples) {
        if (smp.modulus < d.modulus - 1e-12) CHECK(smp.verdict != Verdict::NonConvergent);
      }
    }
  }
  CHECK(strict);
  CHECK(r.merged_secondary <= r.merged_primary);
  REQUIRE(r.primary_witness.has_value());
  // re-integrating the witness reproduces the verdict
  const SimulationSettings s = uniform_settings();
  const Trajectory tr = simulate(m, *r.primary_witness, s);
  CHECK(classify(tr, s.space, s.delta_num) == Verdict::NonConvergent);
}

TEST_CASE("adding families never increases the merged bound" * doctest::test_suite("slow")) {
  const Model m = make_scalar_cubic(1.0);
  ScanConfig one = scalar_scan();
  one.families = {FamilySpec::scalar(Shape::Constant)};
  const ScanResult a = star_scan(m, one);
  const ScanResult b = star_scan(m, scalar_scan());
  CHECK(b.merged_primary <= a.merged_primary);
}

TEST_CASE("radial step sensitivity stays within one step" * doctest::test_suite("slow")) {
  const Model m = make_scalar_cubic(1.0);
  const double base = star_scan(m, scalar_scan(0.1)).merged_primary;
  for (double dr : {0.08, 0.12}) {
    CHECK(std::abs(star_scan(m, scalar_scan(dr)).merged_primary - base) <= 0.1 + 1e-9);
  }
}

TEST_CASE("no divergence below the search limit gives an infinite bound with a warning") {
  const Model m = make_scalar_cubic(1.0);
  ScanConfig cfg = scalar_scan();
  cfg.families = {FamilySpec::scalar(Shape::Constant)};
  cfg.max_radius = 0.3;
  const ScanResult r = star_scan(m, cfg);
  CHECK(r.merged_primary == kInf);
  CHECK_FALSE(r.families.front().warnings.empty());
  CHECK(to_json(r).find("\"merged_bound\": null") != std::string::npos);
}

TEST_CASE("scan output does not depend on the worker count") {
  const Model m = make_scalar_cubic(1.0);
  ScanConfig cfg = scalar_scan();
  cfg.families.resize(2);
  cfg.workers = 1;
  const std::string a = to_json(star_scan(m, cfg));
  cfg.workers = 4;
  CHECK(to_json(star_scan(m, cfg)) == a);
}

TEST_CASE("scan directions") {
  ScanConfig cfg;
  cfg.directions = 8;
  const auto d = scan_directions(2, cfg, true);
  CHECK(d.size() == 4);
  for (const auto& v : d) CHECK(std::hypot(v[0], v[1]) == doctest::Approx(1.0));
  CHECK(scan_directions(1, cfg, false).size() == 2);
  CHECK(scan_directions(1, cfg, true).size() == 1);
  cfg.directions = 16;
  const auto r = scan_directions(3, cfg, false);
  CHECK(r == scan_directions(3, cfg, false));
}

TEST_CASE("basin stability") {
  const Model m = make_swing(0.05, 0.125, 0.5, 20.0);
  BasinConfig cfg;
  cfg.family = FamilySpec::for_model(m, Shape::Constant);
  cfg.sim.space = NormSpace::quotient_for(m);
  cfg.radius = 0.01;
  cfg.samples = 100;
  cfg.workers = 2;
  const BasinResult tiny = basin_stability(m, cfg);
  CHECK(tiny.fraction == 1.0);
  CHECK(tiny.convergent == 100);

  cfg.radius = 10.0;
  cfg.samples = 1000;
  cfg.workers = 0;
  const BasinResult wide = basin_stability(m, cfg);
  CHECK(wide.fraction > 0.0);
  CHECK(wide.fraction < 1.0);
  CHECK(wide.lower <= wide.fraction);
  CHECK(wide.fraction <= wide.upper);
  CHECK(wide.convergent + wide.nonconvergent + wide.undecided == 1000);

  cfg.radius = 2.0;
  cfg.samples = 100;
  cfg.workers = 1;
  const BasinResult a = basin_stability(m, cfg);
  CHECK(to_json(basin_stability(m, cfg)) == to_json(a));
  cfg.workers = 4;
  CHECK(to_json(basin_stability(m, cfg)) == to_json(a));
}

TEST_CASE("Wilson interval and ball sampling") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto [l0, h0] = wilson_interval(0, 10);
  CHECK(l0 == doctest::Approx(0.0));
  CHECK(h0 > 0.0);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto v = sample_ball(3, 42, i);
    CHECK(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) <= 1.0);
    CHECK(v == sample_ball(3, 42, i));
  }
}

TEST_CASE("pixel map csv") {
  const Model m = make_scalar_cubic(1.0);
  FamilySpec f;
  f.name = "two";
  f.components = {{Shape::Legendre, 0}};
  f.degree = 1;
  const PixelMap pm = pixel_map(m, f, uniform_settings(), -0.5, 0.5, -0.5, 0.5, 3, 2);
  CHECK(pm.verdict.size() == 9);
  CHECK(pm.verdict[4] == Verdict::Convergent);
  CHECK(pixel_map_csv(pm).rfind("p1,p2,verdict\n", 0) == 0);
}

TEST_CASE("settings validation") {
  SimulationSettings s;
  s.delta_num = 0.0;
  CHECK_THROWS_AS(s.validate(1), ArgumentError);
  ScanConfig cfg;
  CHECK_THROWS_AS((void)star_scan(make_scalar_cubic(1.0), cfg), ArgumentError);
}
