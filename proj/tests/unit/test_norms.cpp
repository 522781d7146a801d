#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "roa/errors.hpp"
#include "roa/families.hpp"
#include "roa/models.hpp"
#include "roa/norms.hpp"

using namespace roa;

namespace {

std::vector<NormSpace> all_spaces(std::size_t dim) {
  std::vector<NormSpace> s{NormSpace::uniform(), NormSpace::m2()};
  if (dim == 2) s.push_back(NormSpace::quotient(Partition{{1}, {0}}));
  return s;
}

}  // namespace

TEST_CASE("constant segments") {
  const double tau = 4.0;
  const Segment s = Segment::constant(tau, {-0.75});
  CHECK(norm(NormSpace::uniform(), s) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(norm(NormSpace::m2(), s) == doctest::Approx(0.75 * (1.0 + 2.0)).epsilon(1e-12));
}

TEST_CASE("quotient norm of the swing primary families") {
  const Model m = make_swing(0.05, 0.125, 0.5, 20.0);
  const NormSpace q = NormSpace::quotient_for(m);
  const double p[] = {0.3, -0.4};
  for (Shape shape : {Shape::Constant, Shape::Jump, Shape::Cosine, Shape::Sine}) {
    const Segment s = instantiate(FamilySpec::for_model(m, shape), p, 20.0);
    CHECK(norm(q, s) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("quotient norm ignores the history of block II") {
  const NormSpace q = NormSpace::quotient(Partition{{1}, {0}});
  const Segment s = Segment::from_samples(2.0, 2, {-2.0, -1.0, 0.0}, {5.0, 0.0, -7.0, 0.0, 0.0, 0.0});
  CHECK(norm(q, s) == doctest::Approx(0.0));
  const Segment c = Segment::constant(2.0, {1.0, 1.0});
  CHECK(norm(q, c) <= std::sqrt(2.0) * norm(NormSpace::uniform(), c) + 1e-12);
}

TEST_CASE("homogeneity and triangle inequality on random segments") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(-5.0, 5.0), ut(0.2, 20.0);
  for (std::size_t dim : {std::size_t{1}, std::size_t{2}}) {
    for (const NormSpace& space : all_spaces(dim)) {
      const auto count = dim == 2 ? 1000 : 500;
      for (int k = 0; k < count; ++k) {
        const double tau = ut(rng);
        const Segment a = testing::random_segment(rng, tau, dim);
        const Segment b = testing::random_segment(rng, tau, dim);
        const double alpha = ua(rng);
        const double na = norm(space, a), nb = norm(space, b);
        const double grid = 1e-9 * (1.0 + na + nb);
        CHECK(norm(space, scale(a, alpha)) == doctest::Approx(std::abs(alpha) * na).epsilon(1e-12));
        CHECK(norm(space, linear_combination(1.0, a, 1.0, b)) <= na + nb + grid);
        CHECK(norm(space, a) >= 0.0);
      }
    }
  }
}

TEST_CASE("delay rescaling: C invariant, M2 follows the closed form") {
  const double tau = 6.0, p = 0.8;
  // constant: M2 = |c|(1 + √τ) → |c|(1 + 1) after rescaling to unit delay
  const Segment c = Segment::constant(tau, {p});
  const Segment cr = rescale_delay(c, 1.0);
  CHECK(norm(NormSpace::uniform(), cr) == doctest::Approx(norm(NormSpace::uniform(), c)).epsilon(1e-12));
  CHECK(norm(NormSpace::m2(), cr) == doctest::Approx(p * 2.0).epsilon(1e-9));
  // linear pθ/τ: ∫ = p²τ/3, so the L² part scales by √(1/τ)
  const double par[] = {p};
  const Segment l = instantiate(FamilySpec::scalar(Shape::LinearDecreasing), par, tau);
  const Segment lr = rescale_delay(l, 1.0);
  const double l2 = p * std::sqrt(tau / 3.0);
  CHECK(norm(NormSpace::m2(), l) == doctest::Approx(l2).epsilon(1e-9));
  CHECK(norm(NormSpace::m2(), lr) == doctest::Approx(l2 * std::sqrt(1.0 / tau)).epsilon(1e-9));
  CHECK(norm(NormSpace::uniform(), lr) == doctest::Approx(p).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Segment s = testing::random_segment(rng, tau, 2);
    const Segment r = rescale_delay(s, 1.0);
    CHECK(norm(NormSpace::uniform(), r) == doctest::Approx(norm(NormSpace::uniform(), s)).epsilon(1e-9));
    const double rl2 = l2_norm(r, 128), sl2 = l2_norm(s, 128);
    CHECK(rl2 == doctest::Approx(sl2 * std::sqrt(1.0 / tau)).epsilon(1e-9));
  }
}

TEST_CASE("sup norm refines maxima between grid points") {
  const double par[] = {1.0};
  FamilySpec f = FamilySpec::scalar(Shape::Cosine, 7.3);
  const Segment s = instantiate(f, par, 3.0);
  CHECK(norm(NormSpace::uniform(16), s) == doctest::Approx(1.0).epsilon(1e-9));
  const double a = norm(NormSpace::m2(128), s), b = norm(NormSpace::m2(256), s);
  CHECK(std::abs(a - b) < 1e-6 * b);
}

TEST_CASE("norm names and validation") {
  CHECK(parse_norm_kind("pc") == NormKind::UniformC);
  CHECK(parse_norm_kind("m2") == NormKind::M2);
  CHECK(parse_norm_kind("q") == NormKind::QuotientQ);
  CHECK_THROWS_AS((void)parse_norm_kind("l7"), ArgumentError);
  CHECK_THROWS_AS(NormSpace::quotient(Partition{{0}, {0}}).validate(2), ArgumentError);
  CHECK_THROWS_AS(NormSpace::uniform(4).validate(1), ArgumentError);
}
