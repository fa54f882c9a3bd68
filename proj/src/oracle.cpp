#include "patchflow/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace patchflow {

namespace {

// Midpoint-rule cell contribution with subsampling when the cell is cut by
// the patch boundary or the exclusion ring.
struct RingSum {
  const Patch& patch;
  const PiecewiseFn& f;
  const KernelConvention conv;
  int j, i;
  Vec x;
  double eps;
  int subsample;

  double cell(const Vec& center, double h) const {
    const double r = (center - x).head(patch.n == 2 ? 2 : 3).norm();
    const double diag = 0.87 * h * std::sqrt(static_cast<double>(patch.n));
    const Classification cl = classify(patch, center, patch.eps_b());
    const bool cut_ring = std::abs(r - eps) < diag;
    const bool cut_bnd = cl.distance < diag;
    const double vol = patch.n == 2 ? h * h : h * h * h;
    if (!cut_ring && !cut_bnd) {
      if (r < eps) return 0.0;
      return vol * f(center, cl.tag) * riesz_kernel(conv, j, i, center - x);
    }
    // subdivide
    const int S = subsample;
    const double hs = h / S;
    double acc = 0.0;
    const int smax = patch.n == 2 ? 1 : S;
    for (int a = 0; a < S; ++a)
      for (int b = 0; b < S; ++b)
        for (int c = 0; c < smax; ++c) {
          Vec p = center;
          p[0] += (a + 0.5) / S * h - 0.5 * h;
          p[1] += (b + 0.5) / S * h - 0.5 * h;
          if (patch.n == 3) p[2] += (c + 0.5) / S * h - 0.5 * h;
          const double rs = (p - x).head(patch.n == 2 ? 2 : 3).norm();
          if (rs < eps) continue;
          const Classification cs = classify(patch, p, patch.eps_b());
          const double vs = patch.n == 2 ? hs * hs : hs * hs * hs;
          acc += vs * f(p, cs.tag) * riesz_kernel(conv, j, i, p - x);
        }
    return acc;
  }
};

}  // namespace

OracleValue brute_pv_riesz(const Patch& patch, const PiecewiseFn& f, int j, int i,
                           const Vec& x, const OracleConfig& cfg) {
  const KernelConvention conv = KernelConvention::standard(patch.n);
  // bounding box: patch plus margin, enlarged to contain x
  const double D = patch.diameter();
  Vec lo = Vec::Zero(), hi = Vec::Zero();
  {
    const Vec C = patch_centroid(patch);
    for (int d = 0; d < patch.n; ++d) {
      lo[d] = std::min(C[d] - 0.5 * D - cfg.margin, x[d] - cfg.margin);
      hi[d] = std::max(C[d] + 0.5 * D + cfg.margin, x[d] + cfg.margin);
    }
  }
  const double side = (hi - lo).head(patch.n == 2 ? 2 : 3).maxCoeff();
  const int G = patch.n == 2 ? cfg.grid : std::max(cfg.grid / 3, 60);
  const double h = side / G;

  std::vector<double> ring_vals(cfg.n_eps);
  for (int k = 0; k < cfg.n_eps; ++k) {
    RingSum rs{patch, f, conv, j, i, x, cfg.eps0 * std::pow(2.0, -k), cfg.subsample};
    double acc = 0.0;
    const int gz = patch.n == 2 ? 1 : G;
    for (int a = 0; a < G; ++a)
      for (int b = 0; b < G; ++b)
        for (int c = 0; c < gz; ++c) {
          Vec p = lo;
          p[0] += (a + 0.5) * h;
          p[1] += (b + 0.5) * h;
          if (patch.n == 3) p[2] += (c + 0.5) * h;
          acc += rs.cell(p, h);
        }
    ring_vals[k] = acc;
  }
  OracleValue out;
  out.value = ring_vals[cfg.n_eps - 1];
  out.error = std::abs(ring_vals[cfg.n_eps - 1] - ring_vals[cfg.n_eps - 2]);
  const double scale = std::max(1.0, std::abs(out.value));
  out.converged = out.error < 0.05 * scale;
  // local density term (Hessian convention)
  const Classification cl = classify(patch, x, patch.eps_b());
  if (j == i) out.value += f(x, cl.tag) / patch.n;
  return out;
}

BallFlowSample exact_ball_flow(int n, double R, double c, const Vec& x0, double t) {
  if (t >= 1.0 / c) throw std::domain_error("exact_ball_flow: t beyond the blow-up horizon");
  BallFlowSample s;
  const double r0 = x0.head(n == 2 ? 2 : 3).norm();
  if (r0 <= R) {
    s.psi = x0 * std::pow(1.0 - c * t, 1.0 / n);
    s.detJ = 1.0 - c * t;
    s.rho = c / (1.0 - c * t);
  } else {
    const double rn = std::pow(r0, n) - c * std::pow(R, n) * t;
    s.psi = x0 * (std::pow(rn, 1.0 / n) / r0);
    s.detJ = 1.0;
    s.rho = 0.0;
  }
  return s;
}

double exact_ball_coeff(int n, double c, int s) {
  if (s < 1) throw std::invalid_argument("exact_ball_coeff: s >= 1");
  // binom(1/n, s) = prod_{i=1..s} (1/n - i + 1)/i
  double b = 1.0;
  for (int i = 1; i <= s; ++i) b *= (1.0 / n - i + 1) / i;
  return b * std::pow(-c, s);
}

}  // namespace patchflow
