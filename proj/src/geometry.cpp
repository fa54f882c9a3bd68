#include "patchflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace patchflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------------------
// FourierCurve

Vec FourierCurve::eval(double u) const {
  Vec p = Vec::Zero();
  for (int k = 0; k < modes(); ++k) {
    const double ck = std::cos(k * u), sk = std::sin(k * u);
    p[0] += cos_x[k] * ck + sin_x[k] * sk;
    p[1] += cos_y[k] * ck + sin_y[k] * sk;
  }
  return p;
}

Vec FourierCurve::deriv(double u) const {
  Vec p = Vec::Zero();
  for (int k = 1; k < modes(); ++k) {
    const double ck = std::cos(k * u), sk = std::sin(k * u);
    p[0] += k * (-cos_x[k] * sk + sin_x[k] * ck);
    p[1] += k * (-cos_y[k] * sk + sin_y[k] * ck);
  }
  return p;
}

Vec FourierCurve::deriv2(double u) const {
  Vec p = Vec::Zero();
  for (int k = 1; k < modes(); ++k) {
    const double ck = std::cos(k * u), sk = std::sin(k * u);
    p[0] += k * k * (-cos_x[k] * ck - sin_x[k] * sk);
    p[1] += k * k * (-cos_y[k] * ck - sin_y[k] * sk);
  }
  return p;
}

FourierCurve FourierCurve::circle(double radius, const Vec& center) {
  FourierCurve c;
  c.cos_x = Eigen::VectorXd::Zero(2);
  c.sin_x = Eigen::VectorXd::Zero(2);
  c.cos_y = Eigen::VectorXd::Zero(2);
  c.sin_y = Eigen::VectorXd::Zero(2);
  c.cos_x[0] = center[0];
  c.cos_y[0] = center[1];
  c.cos_x[1] = radius;
  c.sin_y[1] = radius;
  return c;
}

FourierCurve FourierCurve::ellipse(double a, double b, const Vec& center) {
  FourierCurve c = circle(1.0, center);
  c.cos_x[1] = a;
  c.sin_y[1] = b;
  return c;
}

// ---------------------------------------------------------------------------
// Patch

Patch Patch::disk(double radius, double c, double gamma) {
  Patch p;
  p.n = 2;
  p.c = c;
  p.gamma = gamma;
  p.boundary.mode = BoundaryCurve::Fourier2D;
  p.boundary.fourier = FourierCurve::circle(radius);
  return p;
}

Patch Patch::ellipse(double a, double b, double c, double gamma) {
  Patch p = disk(1.0, c, gamma);
  p.boundary.fourier = FourierCurve::ellipse(a, b);
  return p;
}

Patch Patch::ball3d(double radius, double c, double gamma) {
  Patch p;
  p.n = 3;
  p.c = c;
  p.gamma = gamma;
  p.boundary.mode = BoundaryCurve::Sphere;
  p.boundary.sphere.radius = radius;
  return p;
}

double Patch::diameter() const {
  if (boundary.mode == BoundaryCurve::Sphere) return 2.0 * boundary.sphere.radius;
  const int M = 256;
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (int k = 0; k < M; ++k) {
    const Vec p = boundary.fourier.eval(kTwoPi * k / M);
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  }
  return std::hypot(hi_x - lo_x, hi_y - lo_y);
}

void Patch::validate() const {
  if (n < 2 || n > 3) throw GeometryError("patch: dimension must be 2 or 3");
  if (!(c > 0.0)) throw GeometryError("patch: density amplitude must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw GeometryError("patch: gamma must lie in (0,1)");
  if (boundary.mode == BoundaryCurve::Sphere) {
    if (n < 3) throw GeometryError("patch: sphere boundaries are for n >= 3");
    if (!(boundary.sphere.radius > 0.0)) throw GeometryError("patch: radius must be positive");
    return;
  }
  if (n != 2) throw GeometryError("patch: fourier2d boundaries are planar");
  const FourierCurve& f = boundary.fourier;
  const int M = 512;
  const double floor = 1e-6 * diameter();
  std::vector<Vec> pts(M);
  for (int k = 0; k < M; ++k) {
    const double u = kTwoPi * k / M;
    pts[k] = f.eval(u);
    if (f.deriv(u).head<2>().norm() < floor)
      throw GeometryError("patch: tangent norm below regularity floor");
  }
  // periodicity is structural for trig series; check round-off anyway
  if ((f.eval(0.0) - f.eval(kTwoPi)).head<2>().norm() > 1e-9 * diameter())
    throw GeometryError("patch: curve not 2pi-periodic");
  // simple curve: no intersection among non-adjacent sampled segments
  auto segs_cross = [](const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    auto orient = [](const Vec& p, const Vec& q, const Vec& r) {
      return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    };
    return orient(a, b, c) * orient(a, b, d) < 0 && orient(c, d, a) * orient(c, d, b) < 0;
  };
  for (int k = 0; k < M; ++k)
    for (int l = k + 2; l < M; ++l) {
      if (k == 0 && l == M - 1) continue;
      if (segs_cross(pts[k], pts[(k + 1) % M], pts[l], pts[(l + 1) % M]))
        throw GeometryError("patch: boundary self-intersects");
    }
  // signed area > 0 <=> counterclockwise with positive volume
  double area2 = 0.0;
  for (int k = 0; k < M; ++k) {
    const Vec& p = pts[k];
    const Vec& q = pts[(k + 1) % M];
    area2 += p[0] * q[1] - q[0] * p[1];
  }
  if (area2 <= 0.0)
    throw GeometryError("patch: orientation must be counterclockwise with positive area");
}

// ---------------------------------------------------------------------------
// Distance / classification

namespace {

// Nearest parameter on a 2D Fourier curve: coarse scan then Newton on
// (B(u)-x).B'(u) = 0; ties resolved toward the smallest parameter.
struct Nearest {
  double u = 0.0;
  double dist = 0.0;
};

Nearest nearest_on_curve(const FourierCurve& f, const Vec& x) {
  const int M = 256;
  double best_u = 0.0, best_d2 = std::numeric_limits<double>::max();
  for (int k = 0; k < M; ++k) {
    const double u = kTwoPi * k / M;
    const double d2 = (f.eval(u) - x).head<2>().squaredNorm();
    if (d2 < best_d2 - 1e-15 * best_d2) {
      best_d2 = d2;
      best_u = u;
    }
  }
  double u = best_u;
  for (int it = 0; it < 30; ++it) {
    const Vec b = f.eval(u), db = f.deriv(u), d2b = f.deriv2(u);
    const Eigen::Vector2d r = (b - x).head<2>();
    const double g = r.dot(db.head<2>());
    const double h = db.head<2>().squaredNorm() + r.dot(d2b.head<2>());
    if (h <= 0.0) break;
    const double step = g / h;
    u -= step;
    if (std::abs(step) < 1e-15) break;
  }
  u = std::fmod(u, kTwoPi);
  if (u < 0.0) u += kTwoPi;
  Nearest out;
  out.u = u;
  out.dist = (f.eval(u) - x).head<2>().norm();
  if (out.dist > std::sqrt(best_d2)) {  // Newton wandered; keep the scan result
    out.u = best_u;
    out.dist = std::sqrt(best_d2);
  }
  return out;
}

}  // namespace

int winding_number(const FourierCurve& f, const Vec& x) {
  const int M = 1024;
  double total = 0.0;
  double prev = std::atan2(f.eval(0.0)[1] - x[1], f.eval(0.0)[0] - x[0]);
  for (int k = 1; k <= M; ++k) {
    const Vec p = f.eval(kTwoPi * k / M);
    const double a = std::atan2(p[1] - x[1], p[0] - x[0]);
    double d = a - prev;
    while (d > std::numbers::pi) d -= kTwoPi;
    while (d < -std::numbers::pi) d += kTwoPi;
    total += d;
    prev = a;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

Classification classify(const Patch& patch, const Vec& x, double eps_b) {
  if (!x.allFinite()) throw std::invalid_argument("classify: non-finite point");
  if (!(eps_b > 0.0)) throw std::invalid_argument("classify: eps_b must be positive");
  Classification out;
  if (patch.boundary.mode == BoundaryCurve::Sphere) {
    const double r = (x - patch.boundary.sphere.center).norm();
    out.distance = std::abs(r - patch.boundary.sphere.radius);
    out.tag = out.distance <= eps_b
                  ? RegionTag::Boundary
                  : (r < patch.boundary.sphere.radius ? RegionTag::Interior
                                                      : RegionTag::Exterior);
    return out;
  }
  const Nearest near = nearest_on_curve(patch.boundary.fourier, x);
  out.distance = near.dist;
  out.param = near.u;
  if (near.dist <= eps_b) {
    out.tag = RegionTag::Boundary;
  } else {
    // side test against the outward normal at the nearest point
    const Vec b = patch.boundary.fourier.eval(near.u);
    const Vec db = patch.boundary.fourier.deriv(near.u);
    const double nx = db[1], ny = -db[0];  // outward for a CCW curve
    const double side = (x[0] - b[0]) * nx + (x[1] - b[1]) * ny;
    out.tag = side < 0.0 ? RegionTag::Interior : RegionTag::Exterior;
  }
  return out;
}

double delta_radius(const Patch& patch, const GeometryRadii& radii, const Vec& x) {
  return std::max(classify(patch, x).distance, 0.5 * radii.R0);
}

BigDelta big_delta(const Patch& patch, const GeometryRadii& radii, const Vec& x) {
  const Classification cl = classify(patch, x);
  BigDelta out;
  out.value = std::max(x.head(patch.n == 2 ? 2 : 3).norm(), cl.distance);
  out.inside_collar = (cl.tag != RegionTag::Exterior) || cl.distance <= radii.R0;
  return out;
}

Vec outward_normal(const Patch& patch, const Vec& x0) {
  if (patch.boundary.mode == BoundaryCurve::Sphere) {
    const Vec r = x0 - patch.boundary.sphere.center;
    const double nr = r.norm();
    if (nr == 0.0) throw GeometryError("outward_normal: degenerate point");
    return r / nr;
  }
  const Nearest near = nearest_on_curve(patch.boundary.fourier, x0);
  const Vec db = patch.boundary.fourier.deriv(near.u);
  const double nt = db.head<2>().norm();
  if (nt < 1e-12) throw GeometryError("outward_normal: degenerate tangent");
  Vec eta = Vec::Zero();
  eta[0] = db[1] / nt;
  eta[1] = -db[0] / nt;
  return eta;
}

// ---------------------------------------------------------------------------
// Local graph

LocalGraph local_graph(const Patch& patch, const Vec& x0, double window) {
  LocalGraph g;
  if (patch.boundary.mode == BoundaryCurve::Sphere) {
    const SphereBoundary sph = patch.boundary.sphere;
    const Vec eta = outward_normal(patch, x0);
    const double R = sph.radius;
    if (window >= R) throw GeometryError("local_graph: window exceeds graph radius");
    // orthonormal completion of eta
    Vec t1 = eta.unitOrthogonal();
    Vec t2 = eta.cross(t1);
    g.base = sph.center + R * eta;
    g.frame.col(0) = t1;
    g.frame.col(1) = t2;
    g.frame.col(2) = eta;
    g.window = window;
    g.phi = [R](const Eigen::Vector2d& s) {
      const double s2 = s.squaredNorm();
      return std::sqrt(std::max(R * R - s2, 0.0)) - R;
    };
    return g;
  }
  const FourierCurve f = patch.boundary.fourier;
  const Classification cl = classify(patch, x0);
  if (cl.tag != RegionTag::Boundary && cl.distance > 1e-6 * patch.diameter())
    throw GeometryError("local_graph: point is not on the boundary");
  const double u0 = cl.param;
  const Vec b0 = f.eval(u0);
  const Vec db0 = f.deriv(u0);
  const double nt = db0.head<2>().norm();
  Vec tau = Vec::Zero(), eta = Vec::Zero();
  tau[0] = db0[0] / nt;
  tau[1] = db0[1] / nt;
  eta[0] = tau[1];
  eta[1] = -tau[0];
  g.base = b0;
  g.frame.setIdentity();
  g.frame.col(0) = tau;
  g.frame.col(2) = eta;
  g.window = window;
  // phi(s): invert s(u) = (B(u)-b0).tau by Newton, then h = (B(u)-b0).eta
  g.phi = [f, b0, tau, eta, u0, window](const Eigen::Vector2d& sv) {
    const double s = sv[0];
    if (std::abs(s) > window) throw GeometryError("local_graph: s outside window");
    double u = u0 + s / std::max(f.deriv(u0).head<2>().norm(), 1e-12);
    for (int it = 0; it < 40; ++it) {
      const Vec r = f.eval(u) - b0;
      const double su = r[0] * tau[0] + r[1] * tau[1];
      const Vec dr = f.deriv(u);
      const double dsu = dr[0] * tau[0] + dr[1] * tau[1];
      if (std::abs(dsu) < 1e-14) break;
      const double step = (su - s) / dsu;
      u -= step;
      if (std::abs(step) < 1e-14) break;
    }
    const Vec r = f.eval(u) - b0;
    return r[0] * eta[0] + r[1] * eta[1];
  };
  return g;
}

// ---------------------------------------------------------------------------
// Graph-window radii

namespace {

// One probe point passes at radius R1 if (i) the curve piece inside
// B_{R1}(x0) is a single parameter interval, (ii) the tangent projection is
// strictly monotone there, (iii) sup |phi'(s)|/|s|^gamma stays under cap.
bool window_ok_2d(const FourierCurve& f, double u0, double R1, double gamma,
                  double cap) {
  const Vec b0 = f.eval(u0);
  const Vec db0 = f.deriv(u0);
  const double nt = db0.head<2>().norm();
  const Eigen::Vector2d tau(db0[0] / nt, db0[1] / nt);
  const Eigen::Vector2d eta(tau[1], -tau[0]);

  const int M = 2048;
  const double du = kTwoPi / M;
  // expand the in-ball parameter interval from u0
  double lo = u0, hi = u0;
  int steps_lo = 0, steps_hi = 0;
  while (steps_hi < M && (f.eval(hi + du) - b0).head<2>().norm() < R1) {
    hi += du;
    ++steps_hi;
  }
  while (steps_lo < M && (f.eval(lo - du) - b0).head<2>().norm() < R1) {
    lo -= du;
    ++steps_lo;
  }
  if (steps_lo + steps_hi >= M - 2) return false;  // ball swallows the curve
  // the complementary arc must stay outside the ball
  for (double u = hi + du; u < lo + kTwoPi; u += du)
    if ((f.eval(u) - b0).head<2>().norm() < R1) return false;
  // monotone projection + Hoelder cap on phi'
  double prev_s = -std::numeric_limits<double>::max();
  const int K = std::max(16, static_cast<int>((hi - lo) / du));
  for (int k = 0; k <= K; ++k) {
    const double u = lo + (hi - lo) * k / K;
    const Eigen::Vector2d r = (f.eval(u) - b0).head<2>();
    const double s = r.dot(tau);
    if (s <= prev_s) return false;
    prev_s = s;
    const Eigen::Vector2d dr = f.deriv(u).head<2>();
    const double ds = dr.dot(tau);
    if (std::abs(ds) < 1e-12) return false;
    const double dphi = dr.dot(eta) / ds;
    if (std::abs(s) > 1e-9 && std::abs(dphi) / std::pow(std::abs(s), gamma) > cap)
      return false;
  }
  return true;
}

}  // namespace

GeometryRadii estimate_radii(const Patch& patch, const RadiiConfig& cfg) {
  if (patch.boundary.mode == BoundaryCurve::Sphere) {
    // exact: the sphere is a graph over any window < R; apply the same
    // Hoelder cap as the disk of equal radius
    const double R = patch.boundary.sphere.radius;
    double R1 = std::pow(2.0, std::floor(std::log2(2.0 * R)));
    for (; R1 > cfg.floor; R1 *= 0.5) {
      if (R1 >= R) continue;
      const double smax = R1;
      const double dphi = smax / std::sqrt(std::max(R * R - smax * smax, 1e-30));
      if (dphi / std::pow(smax, patch.gamma) <= cfg.holder_cap) break;
    }
    if (R1 <= cfg.floor) throw GeometryError("estimate_radii: degenerate boundary");
    GeometryRadii out;
    out.R1 = R1;
    out.R0 = std::min(cfg.safety * R1, 0.999);
    return out;
  }
  const FourierCurve& f = patch.boundary.fourier;
  double start = std::pow(2.0, std::ceil(std::log2(patch.diameter())));
  for (double R1 = start; R1 > cfg.floor; R1 *= 0.5) {
    bool ok = true;
    for (int p = 0; p < cfg.probes && ok; ++p)
      ok = window_ok_2d(f, kTwoPi * p / cfg.probes, R1, patch.gamma, cfg.holder_cap);
    if (ok) {
      GeometryRadii out;
      out.R1 = R1;
      out.R0 = std::min(cfg.safety * R1, 0.999);
      return out;
    }
  }
  throw GeometryError("estimate_radii: no admissible window radius above the floor");
}

// ---------------------------------------------------------------------------

double enclosed_volume(const Patch& patch) {
  if (patch.boundary.mode == BoundaryCurve::Sphere) {
    const double R = patch.boundary.sphere.radius;
    return 4.0 / 3.0 * std::numbers::pi * R * R * R;
  }
  const int M = 4096;
  double area2 = 0.0;
  for (int k = 0; k < M; ++k) {
    const Vec p = patch.boundary.fourier.eval(kTwoPi * k / M);
    const Vec d = patch.boundary.fourier.deriv(kTwoPi * k / M);
    area2 += (p[0] * d[1] - p[1] * d[0]) * kTwoPi / M;
  }
  return 0.5 * area2;
}

Vec patch_centroid(const Patch& patch) {
  if (patch.boundary.mode == BoundaryCurve::Sphere) return patch.boundary.sphere.center;
  const int M = 4096;
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (int k = 0; k < M; ++k) {
    const Vec p = patch.boundary.fourier.eval(kTwoPi * k / M);
    const Vec d = patch.boundary.fourier.deriv(kTwoPi * k / M);
    const double w = (p[0] * d[1] - p[1] * d[0]) * kTwoPi / M;
    a2 += w;
    cx += p[0] * w;
    cy += p[1] * w;
  }
  Vec c = Vec::Zero();
  c[0] = cx / (1.5 * a2);
  c[1] = cy / (1.5 * a2);
  return c;
}

}  // namespace patchflow
