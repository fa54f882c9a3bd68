#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "patchflow/oracle.hpp"
#include "patchflow/singular.hpp"

using namespace patchflow;

namespace {

struct DiskSetup {
  Patch patch = Patch::disk(1.0, 1.0);
  GeometryRadii radii;
  std::unique_ptr<PatchMesh> mesh;
  std::unique_ptr<SingularEvaluator> ev;
  ThreePartField chi;

  explicit DiskSetup(MeshConfig cfg = {}) {
    radii = estimate_radii(patch);
    mesh = std::make_unique<PatchMesh>(patch, radii, cfg);
    ev = std::make_unique<SingularEvaluator>(*mesh, KernelConvention::standard(2));
    chi = ThreePartField::indicator(*mesh, 1.0);
  }
};

}  // namespace

TEST_CASE("mesh quadrature integrates areas and moments") {
  DiskSetup d;
  const PartGrid& gi = d.mesh->interior();
  double area = 0.0, mom = 0.0;
  for (int k = 0; k < gi.size(); ++k) {
    area += gi.w[k];
    mom += gi.w[k] * gi.x[k] * gi.x[k];
  }
  CHECK(area == doctest::Approx(std::numbers::pi).epsilon(1e-8));
  CHECK(mom == doctest::Approx(std::numbers::pi / 4).epsilon(1e-7));

  // ellipse area = pi a b
  Patch ell = Patch::ellipse(2.0, 1.0, 1.0);
  PatchMesh em(ell, estimate_radii(ell), MeshConfig{});
  double earea = 0.0;
  for (int k = 0; k < em.interior().size(); ++k) earea += em.interior().w[k];
  CHECK(earea == doctest::Approx(2 * std::numbers::pi).epsilon(1e-7));
}

TEST_CASE("mesh interpolation reproduces smooth fields") {
  DiskSetup d;
  ThreePartField f = ThreePartField::zeros(*d.mesh);
  auto fn = [](double x, double y) { return std::sin(1.3 * x) * std::cos(0.7 * y) + x * y; };
  const PartGrid& gi = d.mesh->interior();
  for (int k = 0; k < gi.size(); ++k) f.interior[k] = fn(gi.x[k], gi.y[k]);
  const PartGrid& ge = d.mesh->exterior();
  for (int k = 0; k < ge.size(); ++k) f.exterior[k] = fn(ge.x[k], ge.y[k]);
  for (double r : {0.0, 0.31, 0.77, 0.995, 1.2, 2.6}) {
    for (double th : {0.12, 1.7, 3.9, 5.6}) {
      const Vec p(r * std::cos(th), r * std::sin(th), 0.0);
      CHECK(d.mesh->eval(f.interior, f.exterior, p) ==
            doctest::Approx(fn(p[0], p[1])).epsilon(2e-4));
    }
  }
}

TEST_CASE("riesz_pv of the disk indicator matches the ball closed form") {
  DiskSetup d;
  // interior points: Hessian I/2
  for (const Vec x : {Vec(0, 0, 0), Vec(0.5, 0, 0), Vec(0.3, -0.4, 0)}) {
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        const double want = ball_closed_form(2, 1.0, BallFormula::RieszOfChi, j, i, x);
        const PvResult got = d.ev->riesz_pv(d.chi, j, i, x);
        CHECK(got.value == doctest::Approx(want).epsilon(5e-4).scale(1.0));
        CHECK(got.value ==
              doctest::Approx(got.q_part + got.l_part + got.theta_part).epsilon(1e-13));
      }
  }
  // exterior points
  for (const Vec x : {Vec(2, 0, 0), Vec(1.5, 0.9, 0), Vec(-4.0, 1.0, 0)}) {
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        const double want = ball_closed_form(2, 1.0, BallFormula::RieszOfChi, j, i, x);
        const PvResult got = d.ev->riesz_pv(d.chi, j, i, x);
        CHECK(got.value == doctest::Approx(want).epsilon(1e-3).scale(0.3));
      }
  }
  // zero field -> all zeros
  ThreePartField z = ThreePartField::zeros(*d.mesh);
  const PvResult got = d.ev->riesz_pv(z, 0, 0, Vec(0.4, 0.1, 0));
  CHECK(got.value == 0.0);
  CHECK(got.q_part == 0.0);
  CHECK(got.l_part == 0.0);
}

TEST_CASE("trace identity through the pv pipeline") {
  DiskSetup d;
  for (const Vec x : {Vec(0.2, 0.1, 0), Vec(0.8, -0.3, 0), Vec(1.7, 0.4, 0), Vec(3.0, 0, 0)}) {
    double tr = 0.0;
    for (int j = 0; j < 2; ++j) tr += d.ev->riesz_pv(d.chi, j, j, x).value;
    const double want = d.mesh->chart(x).q <= 1.0 ? 1.0 : 0.0;
    CHECK(tr == doctest::Approx(want).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("splitting radius is arbitrary: value stable under delta changes") {
  // compare default delta against a config with a different exterior cap and
  // different panel counts; the pv value must agree
  DiskSetup d;
  PvConfig alt;
  alt.delta_cap_factor = 0.3;
  alt.plain_panels = 9;
  SingularEvaluator ev2(*d.mesh, KernelConvention::standard(2), alt);
  for (const Vec x : {Vec(0.4, 0.2, 0), Vec(2.2, -0.7, 0)}) {
    const double a = d.ev->riesz_pv(d.chi, 0, 1, x).value;
    const double b = ev2.riesz_pv(d.chi, 0, 1, x).value;
    CHECK(a == doctest::Approx(b).epsilon(5e-5).scale(0.1));
  }
}

TEST_CASE("riesz_pv agrees with the brute-force oracle off the ball") {
  // a non-circular patch: the ellipse; compare at a handful of points
  Patch ell = Patch::ellipse(2.0, 1.0, 1.0);
  GeometryRadii radii = estimate_radii(ell);
  PatchMesh mesh(ell, radii, MeshConfig{});
  SingularEvaluator ev(mesh, KernelConvention::standard(2));
  ThreePartField chi = ThreePartField::indicator(mesh, 1.0);
  auto fchi = [](const Vec&, RegionTag t) {
    return t == RegionTag::Interior ? 1.0 : (t == RegionTag::Boundary ? 0.5 : 0.0);
  };
  OracleConfig ocfg;
  ocfg.grid = 420;
  for (const Vec x : {Vec(0.5, 0.25, 0), Vec(-1.1, 0.2, 0), Vec(2.6, 0.6, 0)}) {
    for (auto [j, i] : {std::pair{0, 0}, std::pair{0, 1}}) {
      const OracleValue want = brute_pv_riesz(ell, fchi, j, i, x, ocfg);
      const double got = ev.riesz_pv(chi, j, i, x).value;
      CHECK(got == doctest::Approx(want.value).epsilon(0.02).scale(0.2));
    }
  }
}

TEST_CASE("boundary node pv equals the jump average (disk)") {
  DiskSetup d;
  const int node = 0;  // theta = 0 -> x = (1,0)
  JumpAverage ja = jump_average(*d.ev, d.chi, 0, 0, node);
  CHECK(ja.inner == doctest::Approx(0.5).epsilon(5e-3));
  CHECK(ja.outer == doctest::Approx(-0.5).epsilon(5e-3));
  CHECK(ja.average == doctest::Approx(0.0).epsilon(5e-3).scale(1.0));
  CHECK(std::abs(ja.average - ja.pv_value) < 5e-3);
  // off-diagonal at (1,0): both limits vanish by symmetry
  JumpAverage jb = jump_average(*d.ev, d.chi, 0, 1, node);
  CHECK(jb.inner == doctest::Approx(0.0).epsilon(1e-2).scale(1.0));
  CHECK(jb.outer == doctest::Approx(0.0).epsilon(1e-2).scale(1.0));
  CHECK(std::abs(jb.average - jb.pv_value) < 5e-3);
  // zero field
  ThreePartField z = ThreePartField::zeros(*d.mesh);
  JumpAverage jz = jump_average(*d.ev, z, 0, 0, node);
  CHECK(jz.inner == 0.0);
  CHECK(jz.outer == 0.0);
  CHECK(jz.pv_value == 0.0);
}

TEST_CASE("near-boundary off-node points request the jump evaluation") {
  DiskSetup d;
  const Vec x(1.0 + 1e-12, 0, 0);
  CHECK_THROWS_AS(d.ev->riesz_pv(d.chi, 0, 0, x), NearBoundaryError);
}

TEST_CASE("lens term: flat graph gives exactly zero") {
  LocalGraph flat;
  flat.frame = Mat::Identity();
  flat.window = 1.0;
  flat.phi = [](const Eigen::Vector2d&) { return 0.0; };
  PvConfig cfg;
  const KernelConvention c2 = KernelConvention::standard(2);
  for (auto [j, i] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}})
    CHECK(SingularEvaluator::lens_term(c2, flat, 2, 0.2, 0.5, j, i, cfg) == 0.0);
  const KernelConvention c3 = KernelConvention::standard(3);
  CHECK(SingularEvaluator::lens_term(c3, flat, 3, 0.2, 0.5, 0, 2, cfg) == 0.0);
}

TEST_CASE("lens term: disk symmetry equivariance") {
  DiskSetup d;
  // boundary_theta at (1,0) for (1,2) equals the value at (0,1) for (2,1)
  // after the quarter-turn identification of frames
  const int nt = d.mesh->config().ntheta;
  const int node_e1 = 0;           // (1,0)
  const int node_e2 = nt / 4;      // (0,1)
  const double v1 = d.ev->boundary_theta(0, 1, node_e1);
  const double v2 = d.ev->boundary_theta(1, 0, node_e2);
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-8).scale(1e-3));
  // diagonal entries swap under the rotation
  CHECK(d.ev->boundary_theta(0, 0, node_e1) ==
        doctest::Approx(d.ev->boundary_theta(1, 1, node_e2)).epsilon(1e-6).scale(1e-3));
  // all values finite
  CHECK(std::isfinite(d.ev->boundary_theta(0, 0, node_e1)));
}

TEST_CASE("halfspace constant: lambda and basis independence, odd terms vanish") {
  // n=2, eta = e2: normal component integrates to -+2 arctan(2)
  const Vec e2(0, 1, 0);
  const double v = halfspace_constant(2, 1, 1, e2, 0.5);
  CHECK(std::abs(v) == doctest::Approx(2 * std::atan(2.0)).epsilon(1e-10));
  // odd-in-tau numerator: j = 0 (tangential) with i = 1
  CHECK(halfspace_constant(2, 0, 1, e2, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  // lambda independence
  for (auto [j, i] : {std::pair{1, 1}, std::pair{0, 0}, std::pair{0, 1}}) {
    const double a = halfspace_constant(2, j, i, e2, 0.5);
    const double b = halfspace_constant(2, j, i, e2, 0.17);
    CHECK(a == doctest::Approx(b).epsilon(1e-10).scale(1e-6));
  }
  // 3D: two different orthonormal completions agree to 1e-10
  Vec eta(0.3, -0.5, 0.81);
  eta.normalize();
  for (auto [j, i] : {std::pair{0, 0}, std::pair{1, 2}, std::pair{2, 2}}) {
    const double a = halfspace_constant(3, j, i, eta, 0.4, 0, 160);
    const double b = halfspace_constant(3, j, i, eta, 0.4, 3, 160);
    CHECK(a == doctest::Approx(b).epsilon(1e-10).scale(1e-6));
    const double c = halfspace_constant(3, j, i, eta, 0.11, 0, 160);
    CHECK(a == doctest::Approx(c).epsilon(1e-9).scale(1e-6));
  }
}

TEST_CASE("brute oracle sanity on the disk") {
  const Patch disk = Patch::disk(1.0, 1.0);
  auto fchi = [](const Vec&, RegionTag t) {
    return t == RegionTag::Interior ? 1.0 : (t == RegionTag::Boundary ? 0.5 : 0.0);
  };
  OracleConfig cfg;
  const OracleValue center = brute_pv_riesz(disk, fchi, 0, 0, Vec(0, 0, 0), cfg);
  CHECK(center.value == doctest::Approx(0.5).epsilon(2e-3));
  const OracleValue outer = brute_pv_riesz(disk, fchi, 0, 0, Vec(2, 0, 0), cfg);
  CHECK(outer.value == doctest::Approx(-0.125).epsilon(0.02));
  const OracleValue zero =
      brute_pv_riesz(disk, [](const Vec&, RegionTag) { return 0.0; }, 0, 0, Vec(0, 0, 0), cfg);
  CHECK(zero.value == 0.0);
}

TEST_CASE("3d sphere: pv matches ball closed forms") {
  Patch ball = Patch::ball3d(1.0, 1.0);
  GeometryRadii radii = estimate_radii(ball);
  MeshConfig cfg;
  cfg.nq = 20;
  cfg.ns = 18;
  cfg.ntheta = 28;
  cfg.nphi = 10;
  PatchMesh mesh(ball, radii, cfg);
  SingularEvaluator ev(mesh, KernelConvention::standard(3));
  ThreePartField chi = ThreePartField::indicator(mesh, 1.0);
  for (const Vec x : {Vec(0, 0, 0), Vec(0.4, 0.1, -0.2), Vec(1.6, 0.3, 0.5)}) {
    for (auto [j, i] : {std::pair{0, 0}, std::pair{2, 2}, std::pair{0, 2}}) {
      const double want = ball_closed_form(3, 1.0, BallFormula::RieszOfChi, j, i, x);
      const double got = ev.riesz_pv(chi, j, i, x).value;
      CHECK(got == doctest::Approx(want).epsilon(4e-3).scale(0.3));
    }
  }
}
