#include <cmath>

#include "doctest.h"
#include "roa/errors.hpp"
#include "roa/segment.hpp"

using namespace roa;

TEST_CASE("constant segment evaluates everywhere and rejects outside points") {
  const Segment s = Segment::constant(2.0, {1.5, -0.5});
  CHECK(s.dim() == 2);
  CHECK(s(-2.0)[0] == 1.5);
  CHECK(s(0.0)[1] == -0.5);
  CHECK_THROWS_AS((void)s(0.1), RangeError);
  CHECK_THROWS_AS((void)s(-2.5), RangeError);
}

TEST_CASE("repeated sample encodes a jump with both one-sided limits") {
  const Segment s = Segment::from_samples(1.0, 1, {-1.0, 0.0, 0.0}, {0.0, 0.0, 0.7});
  CHECK(s(0.0)[0] == doctest::Approx(0.7));
  CHECK(s.left_limit(0.0)[0] == doctest::Approx(0.0));
  CHECK(s(-0.5)[0] == doctest::Approx(0.0));
  REQUIRE(s.breakpoints().size() == 1);
  CHECK(s.breakpoints()[0] == 0.0);
}

TEST_CASE("piecewise linear interpolation between samples") {
  const Segment s = Segment::from_samples(2.0, 1, {-2.0, -1.0, 0.0}, {0.0, 2.0, 1.0});
  CHECK(s(-1.5)[0] == doctest::Approx(1.0));
  CHECK(s(-0.5)[0] == doctest::Approx(1.5));
}

TEST_CASE("linear combination, scale and shift act pointwise") {
  const Segment a = Segment::from_samples(1.0, 1, {-1.0, 0.0}, {1.0, 3.0});
  const Segment b = Segment::constant(1.0, {2.0});
  const Segment c = linear_combination(2.0, a, -1.0, b);
  CHECK(c(-0.5)[0] == doctest::Approx(2.0 * 2.0 - 2.0));
  CHECK(scale(a, -2.0)(0.0)[0] == doctest::Approx(-6.0));
  const double off[] = {1.0};
  CHECK(shift(a, off)(-1.0)[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)linear_combination(1.0, a, 1.0, Segment::constant(2.0, {1.0})), ArgumentError);
}

TEST_CASE("sampling a segment round-trips through from_samples") {
  const Segment s = Segment::from_samples(1.0, 2, {-1.0, -0.3, -0.3, 0.0}, {0, 1, 2, 3, -1, 4, 5, 6});
  const SegmentTable t = sample(s, 33);
  const Segment r = Segment::from_samples(1.0, 2, t.thetas, t.values);
  for (double th : {-1.0, -0.7, -0.3, -0.1, 0.0}) {
    CHECK(r(th)[0] == doctest::Approx(s(th)[0]));
    CHECK(r(th)[1] == doctest::Approx(s(th)[1]));
  }
  CHECK(r.left_limit(-0.3)[0] == doctest::Approx(2.0));
}

TEST_CASE("piecewise polynomial table must cover the domain") {
  std::vector<PolynomialPiece> ok{{-1.0, 0.0, {{1.0, 2.0}}}};
  const Segment s = make_piecewise_polynomial(1.0, 1, ok);
  CHECK(s(-0.5)[0] == doctest::Approx(2.0));
  std::vector<PolynomialPiece> gap{{-1.0, -0.5, {{1.0}}}};
  CHECK_THROWS_AS((void)make_piecewise_polynomial(1.0, 1, gap), ArgumentError);
}
