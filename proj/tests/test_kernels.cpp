#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "patchflow/kernels.hpp"

using namespace patchflow;

TEST_CASE("riesz kernel closed form") {
  const KernelConvention c2 = KernelConvention::standard(2);
  // R_{1,2}((1,1)) = c_2 (0 - 2*1*1)/4 = -c_2/2
  CHECK(riesz_kernel(c2, 0, 1, Vec(1, 1, 0)) == doctest::Approx(-c2.c_n / 2.0));
  // R_{1,1}((0,1)) = c_2 (1 - 0)/1 = c_2
  CHECK(riesz_kernel(c2, 0, 0, Vec(0, 1, 0)) == doctest::Approx(c2.c_n));
}

TEST_CASE("kernel trace vanishes pointwise") {
  for (int n : {2, 3}) {
    const KernelConvention c = KernelConvention::standard(n);
    const Vec x(0.3, -1.2, n == 3 ? 0.7 : 0.0);
    double tr = 0.0;
    for (int j = 0; j < n; ++j) tr += riesz_kernel(c, j, j, x);
    CHECK(tr == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("riesz kernel homogeneity of degree -n") {
  for (int n : {2, 3}) {
    const KernelConvention c = KernelConvention::standard(n);
    const Vec x(0.4, 0.9, n == 3 ? -0.3 : 0.0);
    const double lam = 2.7;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        CHECK(riesz_kernel(c, j, i, lam * x) ==
              doctest::Approx(std::pow(lam, -n) * riesz_kernel(c, j, i, x)));
  }
}

TEST_CASE("kernel symmetry R_{j,i} = R_{i,j}") {
  const KernelConvention c = KernelConvention::standard(3);
  const Vec x(1.0, -0.5, 0.25);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      CHECK(riesz_kernel(c, j, i, x) == doctest::Approx(riesz_kernel(c, i, j, x)));
}

TEST_CASE("grad newton is the gradient of newton (finite differences)") {
  for (int n : {2, 3}) {
    const KernelConvention c = KernelConvention::standard(n);
    const Vec x(0.7, 0.4, n == 3 ? 0.5 : 0.0);
    const double h = 1e-6;
    for (int j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (newton_kernel(c, xp) - newton_kernel(c, xm)) / (2 * h);
      CHECK(grad_newton_kernel(c, j, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("ball closed forms") {
  // inside: Hessian of N*chi_B is I/n
  CHECK(ball_closed_form(2, 1.0, BallFormula::RieszOfChi, 0, 0, Vec(0, 0, 0)) ==
        doctest::Approx(0.5));
  CHECK(ball_closed_form(3, 1.0, BallFormula::RieszOfChi, 0, 0, Vec(0, 0, 0)) ==
        doctest::Approx(1.0 / 3.0));
  // outside, n=2, x=(2,0): (1/2)(1/|x|^2 - 2 x1^2/|x|^4) = -0.125
  CHECK(ball_closed_form(2, 1.0, BallFormula::RieszOfChi, 0, 0, Vec(2, 0, 0)) ==
        doctest::Approx(-0.125));
  // gradient potential of the unit disk: x/2 inside, x R^2/(2 r^2)-type outside
  CHECK(ball_closed_form(2, 1.0, BallFormula::GradNewtonPotOfChi, 0, 0, Vec(0.5, 0, 0)) ==
        doctest::Approx(0.25));
  CHECK(ball_closed_form(2, 1.0, BallFormula::GradNewtonPotOfChi, 0, 0, Vec(2, 0, 0)) ==
        doctest::Approx(0.25));
  // Laplacian check by finite differences of NewtonPotOfChi inside
  for (int n : {2, 3}) {
    const Vec x(0.21, -0.13, n == 3 ? 0.17 : 0.0);
    const double h = 1e-4;
    double lap = 0.0;
    for (int d = 0; d < n; ++d) {
      Vec xp = x, xm = x;
      xp[d] += h;
      xm[d] -= h;
      lap += (ball_closed_form(n, 1.0, BallFormula::NewtonPotOfChi, 0, 0, xp) -
              2 * ball_closed_form(n, 1.0, BallFormula::NewtonPotOfChi, 0, 0, x) +
              ball_closed_form(n, 1.0, BallFormula::NewtonPotOfChi, 0, 0, xm)) /
             (h * h);
    }
    CHECK(lap == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("eval_kernel dispatch and errors") {
  const KernelConvention c = KernelConvention::standard(2);
  KernelId id;
  id.kind = KernelId::Riesz;
  id.j = 0;
  id.i = 1;
  CHECK(eval_kernel(c, id, Vec(1, 1, 0)) == doctest::Approx(-c.c_n / 2));
  CHECK_THROWS(eval_kernel(c, id, Vec(0, 0, 0)));
  Vec bad(std::nan(""), 0, 0);
  CHECK_THROWS(eval_kernel(c, id, bad));
}
