#include <cmath>
#include <vector>

#include <doctest.h>

#include "dam/piecewise_linear.hpp"
#include "dam/quadrature.hpp"
#include "dam/special_functions.hpp"

using namespace dam;

TEST_CASE("exponential integral E1 against reference values") {
  // Abramowitz & Stegun table values.
  CHECK(expint_e1(1.0) == doctest::Approx(0.2193839344).epsilon(1e-9));
  CHECK(expint_e1(0.5) == doctest::Approx(0.5597735948).epsilon(1e-9));
  CHECK(expint_e1(2.0) == doctest::Approx(0.0489005107).epsilon(1e-9));
  CHECK(expint_e1(10.0) == doctest::Approx(4.156968929685e-6).epsilon(1e-8));
  CHECK(expint_e1(0.01) == doctest::Approx(4.0379295765381135).epsilon(1e-10));
}

TEST_CASE("E1 series and continued fraction agree at the crossover") {
  const double below = expint_e1(1.0 - 1e-9);
  const double above = expint_e1(1.0 + 1e-9);
  CHECK(std::fabs(below - above) < 1e-9);
}

TEST_CASE("E1 satisfies d/dx E1 = -exp(-x)/x numerically") {
  for (double x : {0.3, 0.8, 1.5, 4.0}) {
    const double h = 1e-6;
    const double fd = (expint_e1(x + h) - expint_e1(x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(-std::exp(-x) / x).epsilon(1e-6));
  }
}

TEST_CASE("trapezoid and simpson reproduce smooth integrals") {
  const double h = 1e-3;
  std::vector<double> f;
  for (double x = 0.0; x <= 2.0 + 1e-12; x += h) f.push_back(std::exp(-x));
  const double exact = 1.0 - std::exp(-2.0);
  CHECK(trapezoid(f, h) == doctest::Approx(exact).epsilon(1e-7));
  CHECK(simpson(f, h) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("pairwise_sum matches exact sums and beats naive accumulation") {
  std::vector<double> v(1 << 16, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(6553.6).epsilon(1e-14));
  std::vector<double> w;
  for (int i = 0; i < 4096; ++i) w.push_back(i % 2 == 0 ? 1.0 : -1.0);
  CHECK(pairwise_sum(w) == 0.0);
}

TEST_CASE("piecewise linear evaluation clamps outside the knot range") {
  PiecewiseLinear g({0.0, 1.0, 3.0}, {2.0, 4.0, 0.0});
  CHECK(g(-5.0) == 2.0);
  CHECK(g(0.0) == 2.0);
  CHECK(g(0.5) == doctest::Approx(3.0));
  CHECK(g(1.0) == 4.0);
  CHECK(g(2.0) == doctest::Approx(2.0));
  CHECK(g(3.0) == 0.0);
  CHECK(g(10.0) == 0.0);
}

TEST_CASE("piecewise linear constants and the empty function") {
  PiecewiseLinear c = PiecewiseLinear::constant(0.7);
  CHECK(c(-1.0) == 0.7);
  CHECK(c(9.0) == 0.7);
  PiecewiseLinear zero;
  CHECK(zero.empty());
  CHECK(zero(3.0) == 0.0);
  CHECK(c.nonnegative());
  PiecewiseLinear neg({0.0, 1.0}, {1.0, -0.5});
  CHECK_FALSE(neg.nonnegative());
}

TEST_CASE("piecewise linear reports interior breakpoints") {
  PiecewiseLinear g({0.0, 1.0, 2.0, 5.0}, {0.0, 1.0, 1.0, 4.0});
  const std::vector<double> b = g.breakpoints_in(0.5, 4.0);
  REQUIRE(b.size() == 2);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 2.0);
}
