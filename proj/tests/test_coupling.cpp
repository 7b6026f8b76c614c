#include <cmath>
#include <sstream>

#include "doctest.h"
#include "patchdyn/coupling.hpp"
#include "patchdyn/evolve.hpp"

using namespace patchdyn;

TEST_CASE("nearest-neighbour cos_ell") {
  CHECK(nn_cos_ell(0.3, 1.0) == doctest::Approx(0.91));
  CHECK(nn_cos_ell(0.3, 0.0) == 1.0);
  CHECK_THROWS_AS(nn_cos_ell(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(nn_cos_ell(0.3, 1.5), std::invalid_argument);
}

TEST_CASE("nearest-neighbour forcing reproduces constant and linear fields") {
  const double r = 0.3, U = 2.5;
  for (int a : {0, 2}) {
    const double w = 2 * a + 1;
    const auto f = nn_forcing(r, 1.0, a, U, U);
    CHECK(U * nn_cos_ell(r, 1.0) + f.plus / w == doctest::Approx(U));
    CHECK(U * nn_cos_ell(r, 1.0) + f.minus / w == doctest::Approx(U));
    // U_i = 0 between -1 and +1: the edge average lands on the line.
    const auto g = nn_forcing(r, 1.0, a, -1.0, 1.0);
    CHECK(g.plus / w == doctest::Approx(r));
    CHECK(g.minus / w == doctest::Approx(-r));
  }
  const auto z = nn_forcing(r, 0.0, 3, 1.0, 2.0);
  CHECK(z.minus == 0.0);
  CHECK(z.plus == 0.0);
}

TEST_CASE("schedule and coupling validation") {
  CHECK_NOTHROW(make_schedule(0.5, 3, 2));
  CHECK_THROWS_AS(make_schedule(0.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule(0.5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_schedule(0.5, 1, max_taylor_order + 1), std::invalid_argument);
  CHECK(make_coupling(0.3, 1.0, 2).cos_ell == doctest::Approx(0.91));
  CHECK_THROWS_AS(make_coupling(0.3, 1.0, 0), std::invalid_argument);
}

TEST_CASE("Taylor extrapolation") {
  const TaylorHistory h{{1.0, 2.0}, {3.0, -1.0}, {2.0, 4.0}};
  const auto e = taylor_extrapolate(h, 0.5);
  CHECK(e.minus == doctest::Approx(1.0 + 1.5 + 0.25));
  CHECK(e.plus == doctest::Approx(2.0 - 0.5 + 0.5));
  const auto two = taylor_extrapolate(h, 2, 0.5);
  CHECK(two.minus == doctest::Approx(2.5));
  CHECK_THROWS_AS(taylor_extrapolate(h, 4, 0.5), std::invalid_argument);
}

TEST_CASE("finite-difference weights") {
  const auto w = fd_weights(0.0, {-2.0, -1.0, 0.0}, 2);
  CHECK(w[0][2] == doctest::Approx(1.0));
  CHECK(w[1][0] == doctest::Approx(0.5));
  CHECK(w[1][1] == doctest::Approx(-2.0));
  CHECK(w[1][2] == doctest::Approx(1.5));
  CHECK(w[2][0] == doctest::Approx(1.0));
  CHECK(w[2][1] == doctest::Approx(-2.0));
  CHECK(w[2][2] == doctest::Approx(1.0));
}

TEST_CASE("polynomial forcing") {
  const PolynomialForcing f({1.0, 0.0, 3.0}, {0.0, 2.0});
  CHECK(f.value(2.0).minus == doctest::Approx(13.0));
  CHECK(f.derivative(1, 2.0).minus == doctest::Approx(12.0));
  CHECK(f.derivative(2, 2.0).minus == doctest::Approx(6.0));
  CHECK(f.derivative(3, 2.0).minus == 0.0);
  CHECK(f.derivative(1, 2.0).plus == doctest::Approx(2.0));
  const auto hist = f.history(1.0, 3);
  REQUIRE(hist.size() == 3);
  CHECK(hist[2].minus == doctest::Approx(6.0));
  CHECK(PolynomialForcing::constant(0.2, 0.7).value(5.0).plus == 0.7);
}

TEST_CASE("closed-form convolutions agree with quadrature") {
  const double lambda = -1.7, t = 0.8;
  const PolynomialForcing poly({1.0, -2.0, 0.5, 0.25}, {0.0, 1.0});
  const SinusoidForcing sine(1.3, {0.4, -0.2, 0.1}, {1.0, 0.0, 0.0});
  for (const Forcing* f : {static_cast<const Forcing*>(&poly), static_cast<const Forcing*>(&sine)}) {
    const auto closed = *f->convolution(lambda, t);
    const FunctionForcing wrapped([f](int q, double s) { return f->derivative(q, s); }, 4);
    const auto quad = edge_convolution(wrapped, lambda, t);
    CHECK(closed.minus == doctest::Approx(quad.minus).epsilon(1e-12));
    CHECK(closed.plus == doctest::Approx(quad.plus).epsilon(1e-12));
  }
}

TEST_CASE("sinusoid derivatives") {
  const SinusoidForcing f(2.0, {1.0, 0.0, 0.5}, {0.0, 1.0, 0.0});
  const double t = 0.3;
  CHECK(f.value(t).minus == doctest::Approx(std::sin(2 * t) + 0.5));
  CHECK(f.derivative(1, t).minus == doctest::Approx(2 * std::cos(2 * t)));
  CHECK(f.derivative(2, t).plus == doctest::Approx(-4 * std::cos(2 * t)));
}

TEST_CASE("sampled forcing differentiates its newest samples") {
  SampledForcing f(3);
  auto quad = [](double t) { return EdgePair{t * t, 1.0 - t}; };
  for (double t : {0.0, 0.1, 0.2, 0.3}) f.push(t, quad(t));
  CHECK(f.size() == 4);
  CHECK(f.max_order() == 2);
  CHECK(f.derivative(1, 0.3).minus == doctest::Approx(0.6));
  CHECK(f.derivative(2, 0.3).minus == doctest::Approx(2.0));
  CHECK(f.derivative(1, 0.3).plus == doctest::Approx(-1.0));
  CHECK(f.value(0.2).minus == doctest::Approx(0.04));
  CHECK_THROWS_AS(f.push(0.3, {}), std::invalid_argument);
  CHECK_THROWS_AS(f.history(0.3, 5), std::invalid_argument);
  SampledForcing empty(2);
  CHECK_THROWS(empty.value(0.0));
}

TEST_CASE("history CSV") {
  std::ostringstream os;
  write_history_csv(os, {{{1.0, 2.0}}, {{3.0, 4.0}}}, 0.5);
  CHECK(os.str() == "m,t,f_minus,f_plus,q\n0,0,1,2,0\n1,0.5,3,4,0\n");
}
