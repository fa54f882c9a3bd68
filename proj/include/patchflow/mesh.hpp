#pragma once
// Boundary-fitted node sets.  The patch is meshed in scaled-boundary
// coordinates about its centroid C: a point is C + q * beta(theta) e_r(theta)
// with q in [0,1] inside (q = 1 is the boundary) and q = s in [1, s_max]
// outside.  Rows are graded toward q = 1 from both sides, where the fields
// are only Hoelder continuous.  The structure gives exact boundary fit,
// smooth quadrature weights, and cheap chart inversion for interpolation.
//
// Requires the boundary to be star-shaped about the centroid; the builder
// throws otherwise.  In 3D only spheres are supported, meshed the same way
// with a Gauss-Legendre polar angle grid.

#include <Eigen/Dense>
#include <vector>

#include "patchflow/geometry.hpp"

namespace patchflow {

struct MeshConfig {
  int nq = 40;          // interior radial cells (rows 0..nq, q=0 and q=1 included)
  int ntheta = 160;     // angular nodes
  int ns = 36;          // exterior radial cells (rows 0..ns, s=1 included)
  int nphi = 14;        // 3D polar nodes (Gauss-Legendre in cos phi)
  double s_max = 30.0;  // exterior truncation, units of beta(theta)
  double q_power = 2.5; // interior grading exponent toward q=1
  double s_power = 2.5; // exterior grading exponent away from s=1
};

// One radial-by-angular grid of nodes with aligned flat arrays.
// Flat index: (row * nphi + a) * ntheta + b   (nphi = 1 in 2D).
struct PartGrid {
  int rows = 0, nphi = 1, ntheta = 0;
  std::vector<double> radial;          // q_k (interior) or s_k (exterior) per row
  std::vector<double> x, y, z;         // node positions
  std::vector<double> w;               // quadrature weights (0 on degenerate rows)
  std::vector<double> cellr;           // local cell half-diameter (cutoff smoothing)
  int size() const { return rows * nphi * ntheta; }
  int idx(int row, int a, int b) const { return (row * nphi + a) * ntheta + b; }
};

// Interpolation stencil: tensor-product cubic, value =
//   tail_ratio^{-decay} * sum wu[a] wv[b] wt[c] F[flat(row0+a, mu0+b, th0+c)].
struct Stencil {
  bool exterior = false;
  double tail_ratio = 1.0;  // s/s_max when the query lies beyond the grid
  int nu = 4, nv = 1, nt = 4;
  int iu[4] = {0, 0, 0, 0}, iv[4] = {0, 0, 0, 0}, it[4] = {0, 0, 0, 0};
  double wu[4] = {0, 0, 0, 0}, wv[4] = {1, 0, 0, 0}, wt[4] = {0, 0, 0, 0};
};

struct ChartPoint {
  double q = 0.0;      // radial coordinate (q<=1 inside, >1 outside)
  double theta = 0.0;  // azimuth in [0, 2pi)
  double mu = 0.0;     // cos(polar angle), 3D only
  double rho = 0.0;    // |x - centroid|
  double beta = 1.0;   // boundary radius along this direction
};

class PatchMesh {
 public:
  PatchMesh(const Patch& patch, const GeometryRadii& radii, const MeshConfig& cfg);

  const Patch& patch() const { return patch_; }
  const GeometryRadii& radii() const { return radii_; }
  const MeshConfig& config() const { return cfg_; }
  int dim() const { return patch_.n; }
  const Vec& centroid() const { return centroid_; }

  const PartGrid& interior() const { return interior_; }
  const PartGrid& exterior() const { return exterior_; }

  // boundary nodes share the angular grid; index (a * ntheta + b), a = 0 in 2D
  int n_boundary() const { return static_cast<int>(bnd_pos_.size()); }
  const Vec& boundary_pos(int k) const { return bnd_pos_[k]; }
  const Vec& boundary_normal(int k) const { return bnd_normal_[k]; }

  // boundary radius along direction theta (2D; constant for spheres)
  double beta(double theta) const;
  double dbeta(double theta) const;

  ChartPoint chart(const Vec& p) const;
  bool is_inside(const Vec& p) const { return chart(p).q <= 1.0; }

  // interpolation of fields stored on the part grids; force_part pins the
  // part (0 interior, 1 exterior) for points right at the boundary
  Stencil stencil(const ChartPoint& cp, int force_part = -1) const;
  Stencil stencil(const Vec& p, int force_part = -1) const {
    return stencil(chart(p), force_part);
  }
  double eval(const Eigen::ArrayXd& interior_vals, const Eigen::ArrayXd& exterior_vals,
              const Stencil& st, double decay = 2.0) const;
  double eval(const Eigen::ArrayXd& interior_vals, const Eigen::ArrayXd& exterior_vals,
              const Vec& p, double decay = 2.0) const {
    return eval(interior_vals, exterior_vals, stencil(p), decay);
  }

  // node position helpers
  Vec node_pos(const PartGrid& g, int flat) const {
    Vec p = Vec::Zero();
    p[0] = g.x[flat];
    p[1] = g.y[flat];
    p[2] = g.z[flat];
    return p;
  }

  // angular quadrature data (3D): Gauss-Legendre in mu = cos(phi)
  const std::vector<double>& gauss_mu() const { return mu_nodes_; }
  const std::vector<double>& gauss_mu_w() const { return mu_weights_; }

 private:
  void build2d();
  void build3d();
  void build_radial_tables();

  Patch patch_;
  GeometryRadii radii_;
  MeshConfig cfg_;
  Vec centroid_ = Vec::Zero();

  PartGrid interior_, exterior_;
  std::vector<Vec> bnd_pos_, bnd_normal_;

  // 2D radial-function table on a fine angular grid (Catmull-Rom interp)
  std::vector<double> beta_tab_, dbeta_tab_;
  int nfine_ = 0;

  std::vector<double> mu_nodes_, mu_weights_;

  // grading maps
  double q_of_u(double u) const;
  double u_of_q(double q) const;
  double dq_du(double u) const;
  double s_of_v(double v) const;
  double v_of_s(double s) const;
  double ds_dv(double v) const;
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace patchflow
