#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "roa/errors.hpp"
#include "roa/models.hpp"
#include "roa/spectral.hpp"

using namespace roa;

namespace {

CharacteristicProblem scalar_problem(double a0, double a1, double tau) {
  CharacteristicProblem p;
  p.a0 = Eigen::MatrixXd::Constant(1, 1, a0);
  p.a1 = Eigen::MatrixXd::Constant(1, 1, a1);
  p.tau = tau;
  p.h = QuasiPolynomial{{-a0, 1.0}, {-a1}};
  return p;
}

}  // namespace

TEST_CASE("delay-free scalar root") {
  const auto roots = rightmost_roots(scalar_problem(-2.0, 0.0, 1.0), 16, 1);
  REQUIRE_FALSE(roots.empty());
  CHECK(roots.front().lambda.real() == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(std::abs(roots.front().lambda.imag()) < 1e-10);
}

TEST_CASE("pure delay feedback crosses at omega = 1, tau = pi/2") {
  const auto set = crossings(QuasiPolynomial{{0.0, 1.0}, {1.0}}, 3);
  REQUIRE(set.size() == 1);
  CHECK(std::abs(set[0].omega - 1.0) < 1e-8);
  CHECK(std::abs(set[0].taus[0] - std::numbers::pi / 2.0) < 1e-8);
  CHECK(std::abs(set[0].taus[1] - 5.0 * std::numbers::pi / 2.0) < 1e-8);
  CHECK(set[0].direction == 1);

  const auto roots = rightmost_roots(scalar_problem(0.0, -1.0, std::numbers::pi / 2.0), 32, 2);
  CHECK(std::abs(roots[0].lambda.real()) < 1e-8);
  CHECK(std::abs(std::abs(roots[0].lambda.imag()) - 1.0) < 1e-8);
}

TEST_CASE("scalar cubic linearization never crosses") {
  const auto prob = CharacteristicProblem::from_model(make_scalar_cubic(1.0));
  CHECK(crossings(*prob.h, 3).empty());
  for (double tau : {0.5, 1.0, 5.0, 20.0}) CHECK(spectral_abscissa(prob.with_tau(tau)) < 0.0);
  const auto w = stability_windows(prob, 10.0);
  REQUIRE(w.size() == 1);
  CHECK(w[0].stable());
}

TEST_CASE("swing crossing frequencies match the quartic oracle") {
  const Model m = make_swing(0.05, 0.125, 0.5, 20.0);
  const auto prob = CharacteristicProblem::from_model(m);
  const auto expected = testing::swing_crossing_frequencies(0.05, 0.125, std::sqrt(3.0) / 2.0);
  auto set = crossings(*prob.h, 4);
  REQUIRE(set.size() == expected.size());
  std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(set[i].omega == doctest::Approx(expected[i]).epsilon(1e-10));
    for (double tau : set[i].taus) {
      CHECK(std::abs(prob.h->eval({0.0, set[i].omega}, tau)) < 1e-9);
    }
  }
}

TEST_CASE("swing at tau = 20 lies in a stable window that starts with a regain") {
  const auto prob = CharacteristicProblem::from_model(make_swing(0.05, 0.125, 0.5, 20.0));
  const auto windows = stability_windows(prob, 25.0);
  REQUIRE(windows.size() >= 3);
  for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
    CHECK(windows[i].to == doctest::Approx(windows[i + 1].from));
    CHECK(windows[i].from < windows[i].to);
  }
  for (const auto& w : windows) CHECK(w.consistent);
  const auto it = std::find_if(windows.begin(), windows.end(), [](const auto& w) { return w.from < 20.0 && 20.0 <= w.to; });
  REQUIRE(it != windows.end());
  CHECK(it->stable());
  CHECK(it->hopf_at_from);
  CHECK(spectral_abscissa(prob.with_tau(20.0)) < 0.0);
  // the root count stays constant inside the window
  for (double t : {it->from + 0.2, 0.5 * (it->from + it->to), std::min(it->to, 25.0) - 0.2}) {
    CHECK(spectral_abscissa(prob.with_tau(t)) < 0.0);
  }
}

TEST_CASE("random problems: conjugate pairs and small residuals") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5), ut(0.2, 5.0);
  std::uniform_int_distribution<int> un(1, 3);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    CharacteristicProblem p;
    const int n = un(rng);
    p.a0 = Eigen::MatrixXd(n, n);
    p.a1 = Eigen::MatrixXd(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        p.a0(i, j) = u(rng) - (i == j ? 1.0 : 0.0);
        p.a1(i, j) = u(rng);
      }
    }
    p.tau = ut(rng);
    const auto roots = rightmost_roots(p, 32, 6);
    for (std::size_t k = 1; k < roots.size(); ++k) {
      CHECK(roots[k - 1].lambda.real() >= roots[k].lambda.real() - 1e-9);
    }
    for (const auto& r : roots) {
      if (!r.refined) continue;
      ++checked;
      CHECK(p.scaled_residual(r.lambda) < 1e-8);
      if (std::abs(r.lambda.imag()) > 1e-8) {
        const bool paired = std::any_of(roots.begin(), roots.end(), [&](const auto& s) {
          return std::abs(s.lambda - std::conj(r.lambda)) < 1e-6 * (1.0 + std::abs(r.lambda));
        });
        CHECK(paired);
      }
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("discretization size N versus 2N") {
  const auto prob = CharacteristicProblem::from_model(make_swing(0.05, 0.125, 0.5, 20.0));
  for (double tau : {5.0, 20.0, 25.0}) {
    const auto a = rightmost_roots(prob.with_tau(tau), 32, 4);
    const auto b = rightmost_roots(prob.with_tau(tau), 64, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].lambda - b[i].lambda) < 1e-6);
  }
}

TEST_CASE("critical eigenvector is a null vector") {
  const auto prob = CharacteristicProblem::from_model(make_swing(0.05, 0.125, 0.5, 20.0));
  const auto set = crossings(*prob.h, 2);
  REQUIRE_FALSE(set.empty());
  const double omega = set[0].omega;
  const auto p = prob.with_tau(set[0].taus[0]);
  const Eigen::VectorXcd v = critical_eigenvector(p, omega);
  const std::complex<double> iw(0.0, omega);
  const Eigen::MatrixXcd m = iw * Eigen::MatrixXcd::Identity(2, 2) - p.a0.cast<std::complex<double>>() -
                             p.a1.cast<std::complex<double>>() * std::exp(-iw * p.tau);
  CHECK((m * v).norm() < 1e-9);
  CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("polynomial roots") {
  const auto r = polynomial_roots({2.0, -3.0, 1.0});
  REQUIRE(r.size() == 2);
  std::vector<double> re{r[0].real(), r[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0));
  CHECK(re[1] == doctest::Approx(2.0));
}

TEST_CASE("problem validation") {
  CharacteristicProblem p = scalar_problem(-1.0, -1.0, 1.0);
  p.h = QuasiPolynomial{{2.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = scalar_problem(-1.0, -1.0, -1.0);
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}
