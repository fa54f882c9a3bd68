#include "patchflow/field.hpp"

#include <random>

namespace patchflow {

double field_density(const PatchMesh& mesh, const ThreePartField& f, const Vec& x) {
  const ChartPoint cp = mesh.chart(x);
  const Patch& patch = mesh.patch();
  const double d_est = std::abs(cp.rho - cp.beta);
  if (d_est <= patch.eps_b()) {
    // boundary: average the one-sided rows at the nearest angular node
    const Stencil si = mesh.stencil(cp, 0);
    const Stencil se = mesh.stencil(cp, 1);
    return 0.5 * (mesh.eval(f.interior, f.exterior, si, f.decay) +
                  mesh.eval(f.interior, f.exterior, se, f.decay));
  }
  return mesh.eval(f.interior, f.exterior, cp.q <= 1.0 ? mesh.stencil(cp, 0)
                                                       : mesh.stencil(cp, 1),
                   f.decay);
}

double holder_quotient_sup(const PatchMesh& mesh, const ThreePartField& f,
                           RegionTag part, int pairs, unsigned seed) {
  const PartGrid& g = part == RegionTag::Interior ? mesh.interior() : mesh.exterior();
  const Eigen::ArrayXd& vals = part == RegionTag::Interior ? f.interior : f.exterior;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  double sup = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const int a = pick(rng), b = pick(rng);
    const double dx = g.x[a] - g.x[b], dy = g.y[a] - g.y[b], dz = g.z[a] - g.z[b];
    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (dist < 1e-9) continue;
    sup = std::max(sup, std::abs(vals[a] - vals[b]) / std::pow(dist, f.gamma));
  }
  return sup;
}

}  // namespace patchflow
