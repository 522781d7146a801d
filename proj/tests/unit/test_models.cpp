#include <cmath>
#include <cstdio>
#include <complex>
#include <random>

#include "doctest.h"
#include "roa/errors.hpp"
#include "roa/models.hpp"
#include "roa/spectral.hpp"

using namespace roa;

TEST_CASE("swing and scalar cubic vanish at their equilibria") {
  const Model sw = make_swing(0.05, 0.125, 0.5, 20.0);
  std::vector<double> dx(2);
  const double z[] = {0.0, 0.0};
  sw.rhs(z, z, dx);
  CHECK(std::abs(dx[0]) < 1e-15);
  CHECK(std::abs(dx[1]) < 1e-15);

  const Model sc = make_scalar_cubic(1.0);
  std::vector<double> d1(1);
  const double one[] = {1.0}, zero[] = {0.0};
  sc.rhs(one, zero, d1);
  CHECK(d1[0] == doctest::Approx(0.0));
}

TEST_CASE("swing linearization at the origin") {
  const Model sw = make_swing(0.05, 0.125, 0.5, 20.0);
  const Linearization lin = sw.linearize();
  CHECK(lin.a0(1, 0) == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-14));
  CHECK(lin.a0(0, 1) == doctest::Approx(1.0));
  CHECK(lin.a0(1, 1) == doctest::Approx(-0.05));
  CHECK(lin.a1(1, 1) == doctest::Approx(-0.125));
  CHECK(lin.a1(0, 0) == 0.0);
  REQUIRE(sw.partition.has_value());
  CHECK(sw.partition->delayed == std::vector<std::size_t>{1});
  CHECK(sw.partition->instantaneous == std::vector<std::size_t>{0});
}

TEST_CASE("swing parameter ranges are enforced") {
  CHECK_THROWS_AS((void)make_swing(0.05, 0.125, 1.0, 20.0), ArgumentError);
  CHECK_THROWS_AS((void)make_swing(0.05, 0.125, 0.0, 20.0), ArgumentError);
  CHECK_THROWS_AS((void)make_swing(-0.05, 0.125, 0.5, 20.0), ArgumentError);
  CHECK_THROWS_AS((void)make_scalar_cubic(0.0), ArgumentError);
}

TEST_CASE("analytic Jacobians match finite differences near the equilibrium") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const Model& m : {make_swing(0.05, 0.125, 0.5, 20.0), make_scalar_cubic(2.0)}) {
    REQUIRE(m.jacobian.has_value());
    const auto n = static_cast<Eigen::Index>(m.dim);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x(m.dim), xd(m.dim);
      for (auto& v : x) v = u(rng);
      for (auto& v : xd) v = u(rng);
      Eigen::MatrixXd ja(n, n), jad(n, n), jf(n, n), jfd(n, n);
      (*m.jacobian)(x, xd, ja, jad);
      finite_difference_jacobian(m.rhs, m.dim, x, xd, jf, jfd);
      const double scale = std::max(1.0, ja.cwiseAbs().maxCoeff());
      CHECK((ja - jf).cwiseAbs().maxCoeff() <= 1e-6 * scale);
      CHECK((jad - jfd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
    }
  }
}

TEST_CASE("characteristic reduction equals the determinant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const Model& m : {make_swing(0.05, 0.125, 0.5, 20.0), make_scalar_cubic(1.3)}) {
    const auto prob = CharacteristicProblem::from_model(m);
    REQUIRE(prob.h.has_value());
    for (int k = 0; k < 50; ++k) {
      const std::complex<double> lam(u(rng), u(rng));
      const auto h = prob.h->eval(lam, prob.tau);
      const auto d = prob.det(lam);
      CHECK(std::abs(h - d) <= 1e-10 * std::max(1.0, std::abs(d)));
    }
  }
}

TEST_CASE("scalar cubic characteristic function") {
  const auto prob = CharacteristicProblem::from_model(make_scalar_cubic(1.0));
  const std::complex<double> lam(0.3, 0.7);
  CHECK(std::abs(prob.eval(lam) - (lam + 1.0 + std::exp(-lam))) < 1e-14);
}

TEST_CASE("declarative model reproduces the built-in swing model") {
  char ye[32];
  std::snprintf(ye, sizeof ye, "%.17g", std::asin(0.5));
  const std::string text = R"({
    "name": "swing-json", "dimension": 2, "tau": 20.0,
    "equations": [
      [{"x": [0, 1]}],
      [{"coef": -0.05, "x": [0, 1]}, {"coef": -0.125, "xd": [0, 1]}, {"coef": 0.5},
       {"coef": -1.0, "sin": {"x": [1, 0], "shift": )" + std::string(ye) + R"(}}]
    ]
  })";
  const Model j = model_from_json(text);
  const Model b = make_swing(0.05, 0.125, 0.5, 20.0);
  REQUIRE(j.partition.has_value());
  CHECK(j.partition->delayed == std::vector<std::size_t>{1});
  const double x[] = {0.3, -0.2}, xd[] = {0.1, 0.4};
  std::vector<double> a(2), c(2);
  j.rhs(x, xd, a);
  b.rhs(x, xd, c);
  CHECK(a[0] == doctest::Approx(c[0]));
  CHECK(a[1] == doctest::Approx(c[1]).epsilon(1e-6));
  CHECK(j.characteristic.has_value());
}

TEST_CASE("malformed declarative models are rejected") {
  CHECK_THROWS_AS((void)model_from_json("{"), ArgumentError);
  CHECK_THROWS_AS((void)model_from_json(R"({"dimension": 1, "tau": 1, "equations": []})"), ArgumentError);
  CHECK_THROWS_AS((void)model_from_json(R"({"dimension": 1, "tau": 1, "equations": [[{"coef": 1.0}]]})"),
                  ArgumentError);  // f(0, 0) ≠ 0
}
