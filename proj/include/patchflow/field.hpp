#pragma once
// Three-part scalar fields: interior, exterior and boundary densities stored
// separately, sampled on the mesh grids.  The interior array's last row
// (q = 1) holds the one-sided limits from inside; the exterior array's first
// row (s = 1) holds the limits from outside.  The boundary density is their
// average, which is the Lemma-1 density for the field class handled here.

#include <Eigen/Dense>

#include "patchflow/mesh.hpp"

namespace patchflow {

struct ThreePartField {
  Eigen::ArrayXd interior;  // aligned with mesh.interior()
  Eigen::ArrayXd exterior;  // aligned with mesh.exterior()
  double gamma = 0.5;
  double decay = 2.0;  // exterior far-field decay exponent: |f| ~ r^{-decay}

  static ThreePartField zeros(const PatchMesh& mesh) {
    ThreePartField f;
    f.interior = Eigen::ArrayXd::Zero(mesh.interior().size());
    f.exterior = Eigen::ArrayXd::Zero(mesh.exterior().size());
    f.gamma = mesh.patch().gamma;
    f.decay = mesh.dim();
    return f;
  }

  // amplitude * chi_Omega as a three-part field (amplitude inside, 0 outside,
  // amplitude/2 on the boundary via the stored one-sided rows)
  static ThreePartField indicator(const PatchMesh& mesh, double amplitude) {
    ThreePartField f = zeros(mesh);
    f.interior.setConstant(amplitude);
    return f;
  }
};

// boundary-node accessors; k indexes the mesh boundary grid
inline double bnd_inner(const PatchMesh& mesh, const ThreePartField& f, int k) {
  const PartGrid& g = mesh.interior();
  return f.interior[(g.rows - 1) * g.nphi * g.ntheta + k];
}
inline double bnd_outer(const PatchMesh& mesh, const ThreePartField& f, int k) {
  return f.exterior[k];
}
inline double bnd_avg(const PatchMesh& mesh, const ThreePartField& f, int k) {
  return 0.5 * (bnd_inner(mesh, f, k) + bnd_outer(mesh, f, k));
}
inline double bnd_jump(const PatchMesh& mesh, const ThreePartField& f, int k) {
  return bnd_inner(mesh, f, k) - bnd_outer(mesh, f, k);
}

// Lemma-1 density of f at x: own-part value, or the average on the boundary.
double field_density(const PatchMesh& mesh, const ThreePartField& f, const Vec& x);

// Empirical sup of |f(a)-f(b)| / |a-b|^gamma over sampled node pairs of one
// part (the ThreePartField Hoelder invariant).
double holder_quotient_sup(const PatchMesh& mesh, const ThreePartField& f,
                           RegionTag part, int pairs, unsigned seed);

}  // namespace patchflow
