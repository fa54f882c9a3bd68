#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "patchflow/geometry.hpp"

using namespace patchflow;

TEST_CASE("classify on the unit disk") {
  const Patch disk = Patch::disk(1.0, 1.0);
  auto c = classify(disk, Vec(0, 0, 0), 1e-9);
  CHECK(c.tag == RegionTag::Interior);
  CHECK(c.distance == doctest::Approx(1.0).epsilon(1e-9));
  c = classify(disk, Vec(2, 0, 0), 1e-9);
  CHECK(c.tag == RegionTag::Exterior);
  CHECK(c.distance == doctest::Approx(1.0).epsilon(1e-9));
  c = classify(disk, Vec(1, 0, 0), 1e-9);
  CHECK(c.tag == RegionTag::Boundary);
  CHECK(c.distance == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS(classify(disk, Vec(std::nan(""), 0, 0), 1e-9));
}

TEST_CASE("classify matches winding number on a wavy curve") {
  Patch p = Patch::disk(1.0, 1.0);
  // bump the circle with a mode-3 perturbation
  p.boundary.fourier.cos_x.conservativeResize(4);
  p.boundary.fourier.sin_x.conservativeResize(4);
  p.boundary.fourier.cos_y.conservativeResize(4);
  p.boundary.fourier.sin_y.conservativeResize(4);
  p.boundary.fourier.cos_x[3] = 0.08;
  p.boundary.fourier.sin_y[3] = -0.06;
  p.validate();
  for (double r : {0.3, 0.8, 1.3, 2.0}) {
    for (int k = 0; k < 12; ++k) {
      const double th = 2 * std::numbers::pi * k / 12 + 0.1;
      const Vec x(r * std::cos(th), r * std::sin(th), 0.0);
      const auto c = classify(p, x, 1e-10);
      if (c.tag == RegionTag::Boundary) continue;
      const int wind = winding_number(p.boundary.fourier, x);
      CHECK((c.tag == RegionTag::Interior) == (wind == 1));
    }
  }
}

TEST_CASE("delta and big_delta on the unit disk") {
  const Patch disk = Patch::disk(1.0, 1.0);
  GeometryRadii radii;
  radii.R0 = 0.5;
  radii.R1 = 1.0;
  CHECK(delta_radius(disk, radii, Vec(0, 0, 0)) == doctest::Approx(1.0));
  CHECK(delta_radius(disk, radii, Vec(0.9, 0, 0)) == doctest::Approx(0.25));
  CHECK(delta_radius(disk, radii, Vec(1, 0, 0)) == doctest::Approx(0.25));
  CHECK(big_delta(disk, radii, Vec(3, 0, 0)).value == doctest::Approx(3.0));
  CHECK(big_delta(disk, radii, Vec(0, 0, 0)).value == doctest::Approx(1.0));
  CHECK(big_delta(disk, radii, Vec(2, 0, 0)).value == doctest::Approx(2.0));
  CHECK(big_delta(disk, radii, Vec(0, 0, 0)).inside_collar);
  CHECK_FALSE(big_delta(disk, radii, Vec(3, 0, 0)).inside_collar);
  // delta >= R0/2 everywhere; big_delta >= delta outside the collar
  for (double r : {0.1, 0.7, 1.2, 1.9, 3.5}) {
    const Vec x(r, 0.3, 0);
    CHECK(delta_radius(disk, radii, x) >= 0.25);
    const auto bd = big_delta(disk, radii, x);
    if (!bd.inside_collar) CHECK(bd.value >= delta_radius(disk, radii, x));
  }
}

TEST_CASE("outward normals") {
  const Patch disk = Patch::disk(1.0, 1.0);
  CHECK(outward_normal(disk, Vec(0, 1, 0))[1] == doctest::Approx(1.0));
  CHECK(outward_normal(disk, Vec(1, 0, 0))[0] == doctest::Approx(1.0));
  const Patch ell = Patch::ellipse(2.0, 1.0, 1.0);
  const Vec eta = outward_normal(ell, Vec(0, 1, 0));  // theta = pi/2
  CHECK(eta[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(eta[1] == doctest::Approx(1.0));
  // normal points away from the interior
  for (double th : {0.3, 1.1, 2.8, 4.4}) {
    const Vec b = ell.boundary.fourier.eval(th);
    const Vec n = outward_normal(ell, b);
    CHECK(classify(ell, b + 1e-3 * n, 1e-10).tag == RegionTag::Exterior);
    CHECK(classify(ell, b - 1e-3 * n, 1e-10).tag == RegionTag::Interior);
  }
}

TEST_CASE("local graph at disk and ellipse") {
  const Patch disk = Patch::disk(1.0, 1.0);
  LocalGraph g = local_graph(disk, Vec(1, 0, 0), 0.5);
  CHECK(g.frame.col(2)[0] == doctest::Approx(1.0));  // eta = e_1
  CHECK(std::abs(g.frame.col(0)[1]) == doctest::Approx(1.0));
  // circle graph: phi(s) = sqrt(1-s^2) - 1 (interior dips along -eta)
  for (double s : {0.05, 0.2, 0.4}) {
    CHECK(g.phi(Eigen::Vector2d(s, 0)) ==
          doctest::Approx(std::sqrt(1 - s * s) - 1.0).epsilon(1e-8));
  }
  // tangency: finite-difference gradient at 0 vanishes
  const double h = 1e-5;
  const double dphi =
      (g.phi(Eigen::Vector2d(h, 0)) - g.phi(Eigen::Vector2d(-h, 0))) / (2 * h);
  CHECK(std::abs(dphi) < 1e-6);

  const Patch ell = Patch::ellipse(2.0, 1.0, 1.0);
  LocalGraph ge = local_graph(ell, Vec(2, 0, 0), 0.3);
  CHECK(ge.frame.col(2)[0] == doctest::Approx(1.0));  // eta = e_1 by symmetry
  // Hoelder-type bound |phi(s)| <= C |s|^{1+gamma} on probe grid
  const double C0 = 4.0;
  for (double s = -0.25; s <= 0.25; s += 0.05)
    CHECK(std::abs(ge.phi(Eigen::Vector2d(s, 0))) <=
          C0 * std::pow(std::abs(s), 1.0 + ell.gamma));
}

TEST_CASE("estimate_radii: disk accepts a window, ellipse is tighter") {
  const Patch disk = Patch::disk(1.0, 1.0);
  const GeometryRadii rd = estimate_radii(disk);
  CHECK(rd.R1 <= 1.0);
  CHECK(rd.R0 > 0.0);
  CHECK(rd.R0 < 1.0);
  const Patch ell = Patch::ellipse(2.0, 1.0, 1.0);
  const GeometryRadii re = estimate_radii(ell);
  CHECK(re.R0 < rd.R0);  // higher curvature shrinks the window
  // sphere: same acceptance as the disk by symmetry
  const Patch ball = Patch::ball3d(1.0, 1.0);
  const GeometryRadii rb = estimate_radii(ball);
  CHECK(rb.R1 == doctest::Approx(rd.R1));
}

TEST_CASE("validate rejects degenerate patches") {
  Patch p = Patch::disk(1.0, 1.0);
  p.c = -1.0;
  CHECK_THROWS_AS(p.validate(), GeometryError);
  p = Patch::disk(1.0, 1.0);
  // clockwise circle: negative orientation
  p.boundary.fourier.sin_y[1] = -1.0;
  CHECK_THROWS_AS(p.validate(), GeometryError);
  // figure-eight-like self intersection
  p = Patch::disk(1.0, 1.0);
  p.boundary.fourier.cos_x[1] = 0.0;
  p.boundary.fourier.cos_x.conservativeResize(3);
  p.boundary.fourier.sin_x.conservativeResize(3);
  p.boundary.fourier.cos_y.conservativeResize(3);
  p.boundary.fourier.sin_y.conservativeResize(3);
  p.boundary.fourier.cos_x[2] = 1.0;
  CHECK_THROWS_AS(p.validate(), GeometryError);
}

TEST_CASE("sphere classify and graph") {
  const Patch ball = Patch::ball3d(1.0, 2.0);
  CHECK(classify(ball, Vec(0, 0, 0), 1e-9).tag == RegionTag::Interior);
  CHECK(classify(ball, Vec(0, 0, 2), 1e-9).distance == doctest::Approx(1.0));
  const Vec x0(0, 0, 1);
  CHECK(outward_normal(ball, x0)[2] == doctest::Approx(1.0));
  LocalGraph g = local_graph(ball, x0, 0.5);
  CHECK(g.phi(Eigen::Vector2d(0.3, 0.2)) ==
        doctest::Approx(std::sqrt(1 - 0.13) - 1.0));
}
