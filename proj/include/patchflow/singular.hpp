#pragma once
// Principal-value Riesz transforms of piecewise-Hoelder patch fields via the
// decomposition of singularities: a far-field integral Q over the mesh, a
// weakly singular local integral L on polar shells with the Hoelder
// cancellation, and the geometric lens term Theta at boundary points.
//
// Values follow the Hessian convention: the reported value equals the second
// derivative of the Newtonian potential, i.e. the pure principal value plus
// the local density term f(x) delta_{ji} / n folded into l_part.  With this
// convention the trace identity sum_j value(j,j) = f(x) holds and boundary
// values equal the average of the one-sided limits (jump formula).

#include <memory>
#include <vector>

#include "patchflow/field.hpp"
#include "patchflow/kernels.hpp"
#include "patchflow/mesh.hpp"

namespace patchflow {

struct NearBoundaryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PvConfig {
  // local polar rule
  int gauss_radial = 6;        // Gauss nodes per radial panel
  int gauss_arc = 10;          // Gauss nodes per angular arc (2D)
  int arc_scan = 32;           // coarse crossing scan per shell
  int plain_panels = 6;        // radial panels when the ball stays in one region
  int graded_panels = 16;      // dyadic panels toward r = 0 at boundary targets
  int crossing_panels = 20;    // panels between r = d and r = delta
  double delta_cap_factor = 0.45;  // exterior delta <= factor * |x - centroid|
  // lens quadrature
  int lens_panels = 10;
  int lens_gauss = 6;
  int lens_azimuth = 16;  // 3D
  // 3D local rule
  int gauss_mu_local = 8;
  int azimuth_local = 12;
  int threads = 1;
};

struct PvResult {
  double value = 0.0;
  double q_part = 0.0;
  double l_part = 0.0;      // includes the local density term
  double theta_part = 0.0;  // boundary lens contribution, 0 off the boundary
};

class SingularEvaluator {
 public:
  SingularEvaluator(const PatchMesh& mesh, KernelConvention conv, PvConfig cfg = {});

  // Spec-level single evaluation.  Throws NearBoundaryError for points within
  // eps_b of the boundary that are not mesh boundary nodes.
  PvResult riesz_pv(const ThreePartField& f, int j, int i, const Vec& x) const;
  PvResult riesz_pv_at_node(const ThreePartField& f, int j, int i, int bnd_node) const;

  // Batched evaluation used by the series engine: all matrix entries of the
  // transforms of several sources at one target, optionally with the
  // Newtonian gradient potentials K_a[g].
  struct Batch {
    std::vector<Mat> q_mat, l_mat, theta_mat;  // per source
    std::vector<Mat> hess;                     // q + l + theta
    std::vector<Vec> grad_pot;                 // per source, K_a[g](x)
  };
  Batch evaluate(const std::vector<const ThreePartField*>& sources, const Vec& x,
                 bool with_gradients, int bnd_node = -1) const;

  // Lens term of Lemma 10 at a boundary node (cached) or any boundary point.
  double boundary_theta(int j, int i, int bnd_node) const;
  double theta_lens(int j, int i, const Vec& x0) const;
  // The lens integral itself, usable with any local graph (a flat graph has
  // empty lens regions and must give exactly zero).
  static double lens_term(const KernelConvention& conv, const LocalGraph& graph, int dim,
                          double half_radius, double gamma, int j, int i,
                          const PvConfig& cfg);

  // K_j[f](x) by the same mesh + polar machinery (weakly singular only).
  double newton_potential(const ThreePartField& f, int j, const Vec& x) const;

  const PatchMesh& mesh() const { return mesh_; }
  const KernelConvention& convention() const { return conv_; }
  const PvConfig& config() const { return cfg_; }

 private:
  struct Target;  // resolved target geometry
  Target resolve(const Vec& x, int bnd_node) const;
  void q_sums(const std::vector<const ThreePartField*>& sources, const Target& t,
              bool with_grad, Batch& out) const;
  void local_sums(const std::vector<const ThreePartField*>& sources, const Target& t,
                  bool with_grad, const std::vector<double>& f0_int,
                  const std::vector<double>& f0_ext, Batch& out) const;

  const PatchMesh& mesh_;
  KernelConvention conv_;
  PvConfig cfg_;
  std::vector<Mat> lens_cache_;  // per boundary node
};

// Lemma-11 half-space constant: the integral of the (unnormalized) kernel
// K_j over the tangent-plane disc of radius 2 lambda seen from x+lambda eta,
// against the i-th coordinate area form.  Independent of lambda and of the
// orthonormal completion (completion_variant rotates it).
double halfspace_constant(int n, int j, int i, const Vec& eta, double lambda,
                          int completion_variant = 0, int quad_points = 96);

struct JumpAverage {
  double inner = 0.0, outer = 0.0, average = 0.0, pv_value = 0.0;
  bool converged = true;
  std::vector<double> inner_table, outer_table;  // raw values along lambdas
};
// One-sided limits by Richardson extrapolation of riesz_pv at x -+ lambda eta.
JumpAverage jump_average(const SingularEvaluator& ev, const ThreePartField& g, int j,
                         int i, int bnd_node, double lambda0 = 0.0, int levels = 7);

struct HolderReport {
  double sup_quotient = 0.0;
  int pairs = 0;
};
// Empirical sup Hoelder quotient of x -> riesz_pv(f,j,i,x) over random pairs
// within one region (monitoring tool, not a proof).
HolderReport holder_harness(const SingularEvaluator& ev, const ThreePartField& f, int j,
                            int i, RegionTag part, int pairs, unsigned seed);
// Quotients across the boundary at prescribed separations (they grow as the
// separation shrinks: the two extensions differ in a jump).
std::vector<double> holder_cross_quotients(const SingularEvaluator& ev,
                                           const ThreePartField& f, int j, int i,
                                           const std::vector<double>& separations);

}  // namespace patchflow
