#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subfinsler/quadrature.hpp"

using namespace subfinsler;

TEST_CASE("polynomials are integrated to machine precision") {
  auto q = integrate([](double x) { return x * x * x - 2.0 * x + 1.0; }, -1.0, 3.0);
  // antiderivative x^4/4 - x^2 + x
  double exact = (81.0 / 4.0 - 9.0 + 3.0) - (1.0 / 4.0 - 1.0 - 1.0);
  CHECK(q.value == doctest::Approx(exact).epsilon(1e-14));
  CHECK(q.converged);
}

TEST_CASE("empty interval") {
  auto q = integrate([](double x) { return x; }, 2.0, 2.0);
  CHECK(q.value == 0.0);
}

TEST_CASE("peaked integrand subdivides adaptively") {
  auto q = integrate([](double x) { return std::exp(-1000.0 * x * x); }, -1.0, 1.0,
                     {1e-12, 1e-16});
  CHECK(q.value == doctest::Approx(std::sqrt(std::acos(-1.0) / 1000.0)).epsilon(1e-11));
  CHECK(q.panels > 1);
}

TEST_CASE("semi-infinite Gaussian tail") {
  auto q = integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0,
                                 {1e-12, 1e-16});
  CHECK(q.value == doctest::Approx(0.5 * std::sqrt(std::acos(-1.0))).epsilon(1e-11));
  CHECK(q.converged);
}

TEST_CASE("algebraic decay x^-3 from 1") {
  auto q = integrate_to_infinity([](double x) { return 1.0 / (x * x * x); }, 1.0,
                                 {1e-10, 1e-14});
  CHECK(q.value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("divergent tail is detected") {
  CHECK_THROWS_AS(
      integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * 1e-3); }, 0.0),
      std::runtime_error);
}

TEST_CASE("breakpoint integration of damped cosine") {
  const double pi = std::acos(-1.0);
  double w = 7.0;
  std::vector<double> pts;
  for (double x = 0.0; x < 60.0; x += pi / w) pts.push_back(x);
  pts.push_back(60.0);
  auto q = integrate_breakpoints(
      [&](double x) { return std::exp(-x) * std::cos(w * x); }, pts, {1e-12, 1e-16});
  CHECK(q.value == doctest::Approx(1.0 / (1.0 + w * w)).epsilon(1e-10));
}

TEST_CASE("error estimate bounds the true error") {
  auto q = integrate([](double x) { return std::sin(x) / (1.0 + x * x); }, 0.0, 10.0,
                     {1e-10, 1e-14});
  // independent tighter evaluation
  auto tight = integrate([](double x) { return std::sin(x) / (1.0 + x * x); }, 0.0,
                         10.0, {1e-14, 1e-16});
  CHECK(std::abs(q.value - tight.value) <= std::max(q.error * 5.0, 1e-13));
}
