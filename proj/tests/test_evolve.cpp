#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "patchdyn/evolve.hpp"

using namespace patchdyn;

namespace {

struct Fixture {
  PatchGeometry g = make_geometry(5, 1, 21);
  PatchOperator op = assemble_operator(g, 0.91);
  EigenSystem es = analytic_eigensystem(g, 0.91);

  FieldVector initial(const Forcing& f) const {
    FieldVector u = zero_field(5);
    for (int j = -4; j <= 4; ++j) u.u[at(j, 5)] = std::cos(std::numbers::pi * j / 10.0);
    reconstruct_edges(op, u, f.value(0.0));
    return u;
  }
};

double interior_gap(const FieldVector& x, const FieldVector& y) {
  const int n = x.half_width();
  return (x.u.segment(1, 2 * n - 1) - y.u.segment(1, 2 * n - 1)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("exact solution matches a matrix-exponential reference") {
  Fixture fx;
  SUBCASE("unforced") {
    const ZeroForcing f;
    const auto u = exact_solution(fx.es, fx.initial(f), f, 0.5);
    const double want[] = {0.7327766085340821, 0.6592706536658923, 0.786144305383719,
                           0.907554538446052,  0.9526088382699834, 0.9075545384460523,
                           0.7861443053837192, 0.6592706536658924, 0.7327766085340822};
    for (int j = -4; j <= 4; ++j) CHECK(u(j) == doctest::Approx(want[j + 4]).epsilon(1e-12));
  }
  SUBCASE("constant edge forcing") {
    const auto f = PolynomialForcing::constant(0.3, 0.7);
    const auto u = exact_solution(fx.es, fx.initial(f), f, 0.5);
    const double want[] = {0.8105620375821261, 0.6767394253407427, 0.7888966422321321,
                           0.9078930045486366, 0.9527170196577713, 0.9083324275377659,
                           0.7925648328456378, 0.7000203147820406, 0.9141446828956689};
    for (int j = -4; j <= 4; ++j) CHECK(u(j) == doctest::Approx(want[j + 4]).epsilon(1e-12));
    CHECK(u(-5) == doctest::Approx(1.3324361681643295).epsilon(1e-12));
    CHECK(u(5) == doctest::Approx(1.6055726334094884).epsilon(1e-12));
    CHECK(coupling_residual(fx.op, u, f.value(0.5)) < 1e-13);
  }
}

TEST_CASE("direct integration agrees with the spectral solution") {
  Fixture fx;
  const SinusoidForcing f(1.0, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  const auto u0 = fx.initial(f);
  const auto exact = exact_solution(fx.es, u0, f, 1.0);
  const auto direct = direct_integrate(fx.op, u0, f, 1.0);
  CHECK(interior_gap(exact, direct) < 1e-10);
  CHECK(std::abs(exact(5) - direct(5)) < 1e-10);
}

TEST_CASE("meso step is exact for forcing of degree below Q") {
  Fixture fx;
  const PolynomialForcing f({0.2, -0.4}, {1.0, 0.3});
  const auto u0 = fx.initial(f);
  const auto exact = exact_solution(fx.es, u0, f, 0.5);
  const auto meso = meso_step(fx.es, u0, f.history(0.0, 2), 0.5, 2);
  CHECK(interior_gap(exact, meso) < 1e-12);
  CHECK(meso(5) == 0.0);
  CHECK(remainder_exact(fx.es, f, 0.5, 2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exact minus meso equals the remainder") {
  Fixture fx;
  const SinusoidForcing f(1.0, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  const auto u0 = fx.initial(f);
  for (int Q = 1; Q <= 3; ++Q) {
    CAPTURE(Q);
    const auto exact = exact_solution(fx.es, u0, f, 0.5);
    const auto meso = meso_step(fx.es, u0, f.history(0.0, Q), 0.5, Q);
    const auto R = remainder_exact(fx.es, f, 0.5, Q);
    for (int j = -4; j <= 4; ++j) CHECK(std::abs(exact(j) - meso(j) - R[at(j, 5)]) < 1e-12);
    // Edge entries carry minus the rest of their action region.
    CHECK(R[at(5, 5)] == doctest::Approx(-(R[at(3, 5)] + R[at(4, 5)])));
  }
}

TEST_CASE("meso_run composes single steps") {
  Fixture fx;
  const SinusoidForcing f(1.0, {1.0, 0.0, 0.0}, {0.5, 0.5, 0.0});
  const auto u0 = fx.initial(f);
  const auto run = meso_run(fx.es, u0, f, make_schedule(0.25, 4, 2));
  FieldVector u = u0;
  for (int m = 0; m < 4; ++m) u = meso_step(fx.es, u, f.history(m * 0.25, 2), 0.25, 2);
  CHECK(interior_gap(run, u) < 1e-13);
  CHECK(run.t == doctest::Approx(1.0));

  const auto exact = exact_solution(fx.es, u0, f, 1.0);
  const auto R = remainder_exact(fx.es, f, 0.25, 2, 4);
  for (int j = -4; j <= 4; ++j) CHECK(std::abs(exact(j) - run(j) - R[at(j, 5)]) < 1e-12);

  const auto direct = direct_integrate(fx.op, u0, f, 1.0, {0.0, CouplingMode::meso, 0.25, 2});
  CHECK(interior_gap(run, direct) < 1e-10);
}

TEST_CASE("transition matrix at zero is B + A") {
  Fixture fx;
  const auto T0 = transition_matrix(fx.es, 0.0);
  const auto A = assemble_boundary_matrix(fx.op).A;
  CHECK((T0 - fx.op.B - A).cwiseAbs().maxCoeff() < 1e-12);
  const auto kernel = make_kernel(fx.es, 0.5);
  REQUIRE(kernel.T.size() == 9);
  CHECK(kernel.mu[0] == doctest::Approx(std::exp(0.5 * fx.es.lambda[0])));
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(11, 11);
  for (int k = 0; k < 9; ++k) sum += kernel.mu[k] * kernel.T[k];
  CHECK((sum - transition_matrix(fx.es, 0.5)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("field helpers and validation") {
  Fixture fx;
  auto u = zero_field(5, 1.5);
  CHECK(u.half_width() == 5);
  CHECK(u.t == 1.5);
  u.u.setOnes();
  CHECK(u.interior().sum() == doctest::Approx(9.0));
  const ZeroForcing f;
  CHECK_THROWS_AS(direct_integrate(fx.op, u, f, 0.30013, {0.0, CouplingMode::meso, 0.25, 1}), std::invalid_argument);
  CHECK_THROWS_AS(direct_integrate(fx.op, u, f, 0.3, {0.2, CouplingMode::continuous, 0.0, 1}),
                  std::invalid_argument);

  std::ostringstream os;
  write_trajectory_csv(os, {zero_field(1, 0.0)});
  CHECK(os.str() == "t,j,u_j\n0,-1,0\n0,0,0\n0,1,0\n");
}
