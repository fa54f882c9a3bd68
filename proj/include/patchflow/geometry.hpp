#pragma once
// Patch geometry: the domain Omega, its C^{1,gamma} boundary, distance and
// tangency queries, and the graph-window radii R0 < R1 (every boundary
// point sees the boundary as a graph over its tangent hyperplane within
// distance R1).

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "patchflow/kernels.hpp"

namespace patchflow {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed plane curve from truncated trigonometric series:
//   x(u) = sum_k cos_x[k] cos(ku) + sin_x[k] sin(ku),  y likewise.
struct FourierCurve {
  Eigen::VectorXd cos_x, sin_x, cos_y, sin_y;

  Vec eval(double u) const;
  Vec deriv(double u) const;
  Vec deriv2(double u) const;
  int modes() const { return static_cast<int>(cos_x.size()); }

  static FourierCurve circle(double radius, const Vec& center = Vec::Zero());
  static FourierCurve ellipse(double a, double b, const Vec& center = Vec::Zero());
};

struct SphereBoundary {
  Vec center = Vec::Zero();
  double radius = 1.0;
};

struct BoundaryCurve {
  enum Mode { Fourier2D, Sphere };
  Mode mode = Fourier2D;
  FourierCurve fourier;
  SphereBoundary sphere;
};

enum class RegionTag { Interior, Exterior, Boundary };

// PatchSpec: dimension, density amplitude, boundary, Hoelder exponent.
struct Patch {
  int n = 2;
  double c = 1.0;
  double gamma = 0.5;
  BoundaryCurve boundary;

  double diameter() const;
  // Classification band: points with d(x) <= eps_b count as boundary.
  double eps_b() const { return 1e-8 * diameter(); }
  // Checks the invariants (regular parametrization, simple curve, positive
  // volume, counterclockwise orientation); throws GeometryError otherwise.
  void validate() const;

  static Patch disk(double radius, double c, double gamma = 0.5);
  static Patch ellipse(double a, double b, double c, double gamma = 0.5);
  static Patch ball3d(double radius, double c, double gamma = 0.5);
};

struct GeometryRadii {
  double R0 = 0.0;  // graph-window radius actually used (R0 < 1)
  double R1 = 0.0;  // largest radius passing the projection test
};

struct Classification {
  RegionTag tag = RegionTag::Exterior;
  double distance = 0.0;  // unsigned distance to the boundary
  double param = 0.0;     // nearest boundary parameter (2D) or unused
};

// Unsigned distance + region tag; tag == Boundary iff d(x) <= eps_b.
Classification classify(const Patch& patch, const Vec& x, double eps_b);
inline Classification classify(const Patch& patch, const Vec& x) {
  return classify(patch, x, patch.eps_b());
}

// delta(x) = max{d(x), R0/2}
double delta_radius(const Patch& patch, const GeometryRadii& radii, const Vec& x);

struct BigDelta {
  double value = 0.0;
  bool inside_collar = false;  // x was not outside Omega union U_{R0}
};
// max{|x|, d(x)}, flagged when x lies in the closed collar.
BigDelta big_delta(const Patch& patch, const GeometryRadii& radii, const Vec& x);

// Outward unit normal at a boundary point.
Vec outward_normal(const Patch& patch, const Vec& x0);

// Orthonormal frame (tau_1..tau_{n-1}, eta) at x0 plus the graph function
// phi with phi(0) = 0, phi'(0) = 0; the boundary near x0 is
//   { x0 + sum_j s_j tau_j + phi(s) eta }.
struct LocalGraph {
  Vec base = Vec::Zero();
  Mat frame = Mat::Identity();  // columns: tau_1, (tau_2,) eta last
  double window = 0.0;          // |s| range over which phi is valid
  std::function<double(const Eigen::Vector2d&)> phi;  // s (1 or 2 comps) -> height
};
LocalGraph local_graph(const Patch& patch, const Vec& x0, double window);

// Largest dyadic R1 such that every probe point sees a monotone graph with
// bounded C^{1,gamma} constant; R0 = safety * R1.
struct RadiiConfig {
  int probes = 64;
  double holder_cap = 1.0;   // cap on sup |phi'(s)| / |s|^gamma
  double safety = 0.5;       // R0 = safety * R1
  double floor = 1e-3;       // give up below this window
};
GeometryRadii estimate_radii(const Patch& patch, const RadiiConfig& cfg = {});

// Winding number of the 2D boundary about x (1 inside, 0 outside for a
// simple counterclockwise curve).
int winding_number(const FourierCurve& curve, const Vec& x);

// Area (2D) / volume (3D ball) enclosed by the boundary.
double enclosed_volume(const Patch& patch);

// Centroid of the enclosed region.
Vec patch_centroid(const Patch& patch);

}  // namespace patchflow
