#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "lawrisk/young_function.hpp"

using lawrisk::YoungFamily;
using lawrisk::YoungFunction;
using Catch::Approx;

namespace {

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)}); }

YoungFunction quadratic_tabulated() {
  // phi(x) = 2x, so Phi(x) = x^2 exactly
  return YoungFunction::tabulated({1.0}, {2.0});
}

} // namespace

TEST_CASE("evaluate power and exp_minus families", "[young]") {
  const auto p2 = YoungFunction::power(2.0);
  auto v = p2.evaluate(3.0);
  CHECK(v.derivative == 3.0);
  CHECK(v.value == 4.5);

  v = p2.evaluate(0.0);
  CHECK(v.derivative == 0.0);
  CHECK(v.value == 0.0);

  v = YoungFunction::exp_minus().evaluate(1.0);
  CHECK(v.derivative == Approx(1.718281828459045).epsilon(1e-15));
  CHECK(v.value == Approx(0.7182818284590452).epsilon(1e-15));

  CHECK(p2.value(-3.0) == p2.value(3.0));
  CHECK(YoungFunction::exp_minus().value(-2.0) == YoungFunction::exp_minus().value(2.0));
}

TEST_CASE("small arguments keep relative precision", "[young]") {
  const double x = 1e-6;
  CHECK(YoungFunction::exp_minus().value(x) == Approx(x * x / 2 + x * x * x / 6).epsilon(1e-12));
  CHECK(YoungFunction::xlogx().value(x) == Approx(x * x / 2 - x * x * x / 6).epsilon(1e-12));
}

TEST_CASE("overflow is an error, never a silent infinity", "[young]") {
  const auto e = YoungFunction::exp_minus();
  CHECK_THROWS_AS(e.evaluate(1000.0), lawrisk::OutOfRange);
  CHECK_THROWS_AS(e.value(-800.0), lawrisk::OutOfRange);
  CHECK(std::isinf(e.raw_value(1000.0)));
  CHECK_THROWS_AS(YoungFunction::power(3.0).evaluate(1e200), lawrisk::OutOfRange);
}

TEST_CASE("conjugates of named families", "[young]") {
  CHECK(YoungFunction::power(2.0).conjugate() == YoungFunction::power(2.0));
  const auto c3 = YoungFunction::power(3.0).conjugate();
  REQUIRE(c3.family() == YoungFamily::power);
  CHECK(c3.exponent() == Approx(1.5));
  // (2/3) y^{3/2} from inverting phi(x) = x^2
  CHECK(c3.value(4.0) == Approx(2.0 / 3.0 * 8.0));

  const auto ce = YoungFunction::exp_minus().conjugate();
  REQUIRE(ce.family() == YoungFamily::xlogx);
  for (double y : {0.5, 1.0, 3.0, 10.0})
    CHECK(ce.value(y) == Approx((1 + y) * std::log(1 + y) - y).epsilon(1e-14));
  CHECK(ce.conjugate() == YoungFunction::exp_minus());
}

TEST_CASE("power(1) is the L1 case and has no finite conjugate", "[young]") {
  const auto l1 = YoungFunction::power(1.0);
  CHECK(l1.value(-2.5) == 2.5);
  CHECK(l1.derivative(0.0) == 0.0);
  CHECK(l1.derivative(0.1) == 1.0);
  CHECK_THROWS_AS(l1.conjugate(), lawrisk::InvalidArgument);
}

TEST_CASE("invalid parameters are rejected", "[young]") {
  CHECK_THROWS_AS(YoungFunction::power(0.5), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(YoungFunction::tabulated({}, {}), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(YoungFunction::tabulated({1, 2}, {1}), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(YoungFunction::tabulated({2, 1}, {1, 2}), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(YoungFunction::tabulated({1, 2}, {2, 1}), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(YoungFunction::tabulated({1, 2}, {1, 1}), lawrisk::InvalidArgument); // bounded phi
  CHECK_THROWS_AS(YoungFunction::tabulated({0, 1}, {0, 1}), lawrisk::InvalidArgument);
}

TEST_CASE("tabulated functions integrate piecewise-linear phi exactly", "[young][tabulated]") {
  const auto q = quadratic_tabulated();
  for (double x : {0.25, 1.0, 3.0, 17.5}) {
    CHECK(q.derivative(x) == Approx(2 * x).epsilon(1e-15));
    CHECK(q.value(x) == Approx(x * x).epsilon(1e-15));
  }
  // Tabulating a linear phi reproduces power(2) exactly.
  const auto t = YoungFunction::tabulate([](double x) { return x; }, 0.01, 100.0, 40);
  for (double x : {0.001, 0.5, 2.0, 99.0, 500.0}) CHECK(rel_diff(t.value(x), x * x / 2) < 1e-12);
  // Conjugate of phi = 2x is psi = y/2, Psi = y^2/4.
  const auto qc = q.conjugate();
  CHECK(qc.value(3.0) == Approx(9.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("tabulated conjugate is the right-continuous inverse", "[young][tabulated]") {
  // phi rises to 1 on [0,1], is flat on [1,2], then rises with slope 1.
  const auto phi = YoungFunction::tabulated({1.0, 2.0, 3.0}, {1.0, 1.0, 2.0});
  const auto psi = phi.conjugate();
  // psi(y) = inf{u : phi(u) > y}: at the flat value y = 1 the inverse is 2, just below it 1.
  CHECK(psi.derivative(1.0) == 2.0);
  CHECK(psi.derivative(1.0 - 1e-12) == Approx(1.0).epsilon(1e-10));
  CHECK(psi.derivative(0.5) == 0.5);
  // A jump of phi becomes a flat piece of psi.
  const auto jump = YoungFunction::tabulated({1.0, 1.0, 2.0}, {1.0, 3.0, 4.0});
  CHECK(jump.derivative(1.0) == 3.0);
  const auto inv = jump.conjugate();
  CHECK(inv.derivative(2.0) == 1.0);
  CHECK(inv.conjugate() == jump);
}

TEST_CASE("Young's inequality and its equality case", "[young][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 6.0);
  const std::vector<YoungFunction> family{YoungFunction::power(2.0), YoungFunction::power(3.0), YoungFunction::power(1.25),
                                          YoungFunction::exp_minus(), quadratic_tabulated(),
                                          YoungFunction::tabulated({0.5, 1.0, 1.0, 2.0, 4.0}, {0.1, 0.1, 1.0, 3.0, 3.5})};
  for (const auto& phi : family) {
    const auto psi = phi.conjugate();
    for (int i = 0; i < 2000; ++i) {
      const double x = unif(rng), y = unif(rng);
      CHECK(x * y <= phi.value(x) + psi.value(y) + 1e-12 * (1 + x * y));
    }
    for (double x : {0.3, 1.7, 2.9, 5.0}) {
      const double y = phi.derivative(x);
      CHECK(rel_diff(x * y, phi.value(x) + psi.value(y)) < 1e-10);
    }
  }
}

TEST_CASE("convexity and monotonicity on sampled points", "[young][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-8.0, 8.0);
  for (const auto& phi : {YoungFunction::power(1.5), YoungFunction::exp_minus(), YoungFunction::xlogx(),
                          YoungFunction::tabulated({0.5, 1.0, 1.0, 2.0}, {0.1, 0.1, 1.0, 3.0})}) {
    for (int i = 0; i < 1000; ++i) {
      const double x = unif(rng), y = unif(rng);
      CHECK(phi.value(0.5 * (x + y)) <= 0.5 * (phi.value(x) + phi.value(y)) + 1e-12);
      const double a = std::fabs(x), b = std::fabs(y);
      if (a <= b) {
        CHECK(phi.value(a) <= phi.value(b));
        CHECK(phi.derivative(a) <= phi.derivative(b));
      }
    }
  }
}

TEST_CASE("Delta-2 classification", "[young][delta2]") {
  const auto grid = lawrisk::geometric_grid(1e-2, 1e2, 64);

  auto r = lawrisk::check_delta2(YoungFunction::power(3.0), grid);
  CHECK(r.satisfied);
  CHECK(r.growth_constant == Approx(8.0).epsilon(1e-12));
  CHECK(r.x0 == 0.0);

  r = lawrisk::check_delta2(YoungFunction::power(2.0), grid);
  CHECK(r.satisfied);
  CHECK(r.growth_constant == Approx(4.0).epsilon(1e-12));
  CHECK(r.x0 == 0.0);

  r = lawrisk::check_delta2(YoungFunction::exp_minus(), lawrisk::geometric_grid(1.0, 30.0, 30));
  CHECK_FALSE(r.satisfied);
  CHECK(r.witness_ratios.back().second > 1e6);

  r = lawrisk::check_delta2(YoungFunction::xlogx(), grid);
  CHECK(r.satisfied);
  CHECK(r.growth_constant < 4.0);
  for (const auto& [x, ratio] : r.witness_ratios)
    if (x >= r.x0) CHECK(ratio <= r.growth_constant * (1 + 1e-12));

  CHECK_THROWS_AS(lawrisk::check_delta2(YoungFunction::power(2.0), {}), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(lawrisk::check_delta2(YoungFunction::power(2.0), {2.0, 1.0}), lawrisk::InvalidArgument);
}

TEST_CASE("Delta-2 escape by overflow", "[young][delta2]") {
  const auto r = lawrisk::check_delta2(YoungFunction::exp_minus(), {100.0, 500.0});
  CHECK_FALSE(r.satisfied);
  CHECK(std::isinf(r.witness_ratios.back().second));
}
