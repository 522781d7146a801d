#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "roa/attraction.hpp"
#include "roa/dde_solver.hpp"
#include "roa/errors.hpp"
#include "roa/families.hpp"
#include "roa/models.hpp"

using namespace roa;

namespace {

Segment polynomial_history(double tau, const std::vector<double>& c) {
  // coefficients in θ; the piece is expanded around θ = −τ
  std::vector<double> shifted(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      shifted[j] += c[k] * binom * std::pow(-tau, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return make_piecewise_polynomial(tau, 1, {{-tau, 0.0, {shifted}}});
}

}  // namespace

TEST_CASE("method of steps: x' = -x(t-1) with unit history") {
  const Model m = make_linear_scalar(0.0, -1.0, 1.0);
  const Trajectory tr = integrate(m, Segment::constant(1.0, {1.0}), 2.0);
  CHECK(tr.at(1.0)[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(tr.at(2.0)[0] == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("polynomial history oracle agrees with its own closed form") {
  const std::vector<double> h{0.3, -1.0, 0.5};
  const Segment s = polynomial_history(1.5, h);
  testing::MethodOfSteps ex(-0.7, 1.1, 1.5, h, 1);
  for (double th : {-1.5, -1.0, -0.2, 0.0}) CHECK(s(th)[0] == doctest::Approx(ex(th)).epsilon(1e-12));
  // ODE residual of the oracle by central differences
  for (double t : {0.3, 1.1}) {
    const double d = (ex(t + 1e-5) - ex(t - 1e-5)) / 2e-5;
    CHECK(d == doctest::Approx(-0.7 * ex(t) + 1.1 * ex(t - 1.5)).epsilon(1e-6));
  }
}

TEST_CASE("random linear scalar models match the method of steps") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(-2.0, 0.5), ub(-2.0, 2.0), ut(0.5, 2.0), uc(-1.0, 1.0);
  const SolverOptions opts;
  for (int trial = 0; trial < 40; ++trial) {
    const double a = trial % 5 == 0 ? 0.0 : ua(rng);
    const double b = ub(rng), tau = ut(rng);
    const std::vector<double> h{uc(rng), uc(rng), uc(rng), uc(rng)};
    const testing::MethodOfSteps ex(a, b, tau, h, 5);
    const Trajectory tr = integrate(make_linear_scalar(a, b, tau), polynomial_history(tau, h), 5.0 * tau, opts);
    double err = 0.0, xmax = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double t = 5.0 * tau * k / 2000.0;
      err = std::max(err, std::abs(tr.at(t)[0] - ex(t)));
      xmax = std::max(xmax, std::abs(ex(t)));
    }
    CHECK(err <= 100.0 * (opts.atol + opts.rtol * xmax));
  }
}

TEST_CASE("fixed-step error decays at third order") {
  const double tau = 1.0;
  const std::vector<double> h{1.0};
  const testing::MethodOfSteps ex(-1.0, -1.0, tau, h, 3);
  std::vector<double> lh, le;
  for (int k = 2; k <= 7; ++k) {
    SolverOptions o;
    o.rtol = 1.0;
    o.atol = 1.0;
    o.max_step = std::ldexp(1.0, -k);
    o.initial_step = o.max_step;
    const Trajectory tr = integrate(make_linear_scalar(-1.0, -1.0, tau), polynomial_history(tau, h), 3.0, o);
    lh.push_back(std::log(o.max_step));
    le.push_back(std::log(std::abs(tr.at(3.0)[0] - ex(3.0))));
  }
  const double n = static_cast<double>(lh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sx += lh[i];
    sy += le[i];
    sxx += lh[i] * lh[i];
    sxy += lh[i] * le[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(le.front() - le.back() > 3.0 * std::log(10.0));
  CHECK(slope == doctest::Approx(3.0).epsilon(0.4 / 3.0));
}

TEST_CASE("jump history forces the propagated discontinuities into the mesh") {
  const Model m = make_swing(0.05, 0.125, 0.5, 20.0);
  const double p[] = {0.0, 0.3};
  const Segment phi = instantiate(FamilySpec::for_model(m, Shape::Jump), p, 20.0);
  const Trajectory tr = integrate(m, phi, 100.0);
  for (double t : {20.0, 40.0, 60.0, 80.0}) {
    CHECK(std::binary_search(tr.mesh().begin(), tr.mesh().end(), t));
  }
}

TEST_CASE("starting at the equilibrium converges immediately") {
  const Model m = make_swing(0.05, 0.125, 0.5, 20.0);
  SimulationSettings s;
  s.space = NormSpace::quotient_for(m);
  const Trajectory tr = simulate(m, Segment::zero(20.0, 2), s);
  CHECK(tr.termination() == Termination::ConvergedAt);
  CHECK(tr.termination_time() <= 20.0 / 16.0 + 1e-12);
}

TEST_CASE("x_0 is the initial function and x_t is a restriction of the solution") {
  const Model m = make_scalar_cubic(1.0);
  const double p[] = {0.5};
  const Segment phi = instantiate(FamilySpec::scalar(Shape::LinearIncreasing), p, 1.0);
  const Trajectory tr = integrate(m, phi, 6.0);
  const Segment x0 = segment_at(tr, 0.0);
  const Segment x4 = segment_at(tr, 4.0);
  for (double th : {-1.0, -0.6, -0.1, 0.0}) {
    CHECK(x0(th)[0] == doctest::Approx(phi(th)[0]));
    CHECK(x4(th)[0] == doctest::Approx(tr.at(4.0 + th)[0]));
  }
  CHECK_THROWS_AS((void)segment_at(tr, 7.0), RangeError);
}

TEST_CASE("semigroup: restarting from x_s reproduces x_t") {
  const Model m = make_swing(0.05, 0.125, 0.5, 20.0);
  const double p[] = {0.3, 0.3};
  const Segment phi = instantiate(FamilySpec::for_model(m, Shape::Constant), p, 20.0);
  SolverOptions o;
  o.rtol = 1e-9;
  o.atol = 1e-12;
  const Trajectory full = integrate(m, phi, 60.0, o);
  const Trajectory tail = integrate(m, segment_at(full, 30.0), 30.0, o);
  double err = 0.0, xmax = 0.0;
  for (double th : {-20.0, -10.0, -3.0, 0.0}) {
    const auto a = full.at(60.0 + th);
    const auto b = tail.at(30.0 + th);
    err = std::max({err, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
    xmax = std::max({xmax, std::abs(a[0]), std::abs(a[1])});
  }
  CHECK(err < 10.0 * (o.atol + o.rtol * xmax));
}

TEST_CASE("invalid solver arguments are rejected") {
  const Model m = make_scalar_cubic(1.0);
  const Segment phi = Segment::constant(1.0, {0.1});
  CHECK_THROWS_AS((void)integrate(m, phi, -1.0), ArgumentError);
  SolverOptions o;
  o.rtol = 0.0;
  CHECK_THROWS_AS((void)integrate(m, phi, 1.0, o), ArgumentError);
  CHECK_THROWS_AS((void)integrate(m, Segment::constant(2.0, {0.1}), 1.0), ArgumentError);
}

TEST_CASE("blowup terminates the run") {
  const Model m = make_scalar_cubic(1.0);
  const Trajectory tr = integrate(m, Segment::constant(1.0, {3.0}), 100.0);
  CHECK(tr.termination() == Termination::Blowup);
  CHECK(tr.t_end() < 100.0);
}

TEST_CASE("trajectory csv header and monotone time column") {
  const Model m = make_scalar_cubic(1.0);
  const Trajectory tr = integrate(m, Segment::constant(1.0, {0.2}), 3.0);
  const std::string csv = trajectory_csv(tr, 11);
  CHECK(csv.rfind("t,x_1\n", 0) == 0);
}
