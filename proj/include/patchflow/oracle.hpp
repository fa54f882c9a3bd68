#pragma once
// Brute-force reference implementations.  These never share quadrature code
// with the production evaluators: the pv oracle is a plain Cartesian
// midpoint rule over shrinking exclusion rings, kept deliberately simple.

#include <functional>

#include "patchflow/geometry.hpp"
#include "patchflow/kernels.hpp"

namespace patchflow {

struct OracleConfig {
  double eps0 = 0.25;       // largest exclusion radius; sequence eps0 * 2^-k
  int n_eps = 6;            // ring count (decreasing)
  int grid = 360;           // Cartesian cells per side (2D); ~--/3 in 3D
  int subsample = 4;        // subdivision of cells cut by the boundary / ring
  double margin = 1.5;      // bounding box margin beyond patch and x
  int richardson_levels = 3;
  int mesh_refinement = 3;  // >= 3 refinement levels for convergence checks
};

struct OracleValue {
  double value = 0.0;
  double error = 0.0;  // from the last two rings
  bool converged = true;
};

// Piecewise field: value at a point given its region.
using PiecewiseFn = std::function<double(const Vec&, RegionTag)>;

// eps-ring quadrature of pv integral f * R_{j,i}(.-x), extrapolated eps->0,
// plus the local density term f(x) delta_{ji}/n so that values match second
// derivatives of the Newtonian potential.
OracleValue brute_pv_riesz(const Patch& patch, const PiecewiseFn& f, int j, int i,
                           const Vec& x, const OracleConfig& cfg = {});

struct BallFlowSample {
  Vec psi = Vec::Zero();
  double detJ = 1.0;
  double rho = 0.0;
};

// Exact collapse of the uniform ball: psi = x0 (1-ct)^{1/n} inside,
// r^n = r0^n - c R^n t outside; detJ = 1-ct inside, 1 outside.
BallFlowSample exact_ball_flow(int n, double R, double c, const Vec& x0, double t);

// Taylor coefficient of (1-ct)^{1/n}: kappa_s = binom(1/n, s) (-c)^s.
double exact_ball_coeff(int n, double c, int s);

}  // namespace patchflow
