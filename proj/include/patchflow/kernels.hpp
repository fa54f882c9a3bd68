#pragma once
// Closed-form potential-theory kernels: the Newtonian potential N, its
// gradient kernels K_j, and the second-derivative (Riesz) kernels R_{j,i},
// together with exact potentials of uniform balls used as oracles.
//
// Normalization: N is the fundamental solution of the Laplacian, so that
// the trace identity sum_j R_{j,j}[f](x) = f(x) holds for the Hessian of
// N*f at points where f is smooth.  All "RieszOfChi"-type values follow the
// Hessian convention: principal value plus the local density term f(x)/n
// on the diagonal.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patchflow {

using Vec = Eigen::Vector3d;  // spatial point, z ignored when n == 2
using Mat = Eigen::Matrix3d;

// Surface area of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
  // 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Fixes c_n and the velocity sign once per dimension.
//   c_n : K_j(x) = c_n x_j / |x|^n equals dN/dx_j  =>  c_n = 1/omega_{n-1}
//   sign_v : v = sign_v * K[rho]; sign_v = -1 gives div v = -rho
//            (the patch contracts, density law 1/(1 - t rho0)).
struct KernelConvention {
  int n = 2;
  double c_n = 1.0 / (2.0 * std::numbers::pi);
  double sign_v = -1.0;

  static KernelConvention standard(int n) {
    KernelConvention k;
    k.n = n;
    k.c_n = 1.0 / unit_sphere_area(n);
    k.sign_v = -1.0;
    return k;
  }
};

struct KernelId {
  enum Kind { Newton, GradNewton, Riesz };
  Kind kind = Newton;
  int j = 0;  // first index (GradNewton, Riesz)
  int i = 0;  // second index (Riesz)
};

inline double sq_norm(const KernelConvention& conv, const Vec& x) {
  double s = x[0] * x[0] + x[1] * x[1];
  if (conv.n == 3) s += x[2] * x[2];
  return s;
}

// N(x): (1/2pi) ln|x| for n=2, -1/((n-2) omega_{n-1} |x|^{n-2}) otherwise.
inline double newton_kernel(const KernelConvention& conv, const Vec& x) {
  const double r2 = sq_norm(conv, x);
  if (r2 == 0.0) throw std::domain_error("newton_kernel: x = 0");
  if (conv.n == 2) return 0.5 * std::log(r2) * conv.c_n;
  return -conv.c_n / ((conv.n - 2) * std::pow(r2, 0.5 * (conv.n - 2)));
}

// K_j(x) = c_n x_j / |x|^n
inline double grad_newton_kernel(const KernelConvention& conv, int j, const Vec& x) {
  const double r2 = sq_norm(conv, x);
  if (r2 == 0.0) throw std::domain_error("grad_newton_kernel: x = 0");
  return conv.c_n * x[j] / std::pow(r2, 0.5 * conv.n);
}

// R_{j,i}(x) = c_n (|x|^2 delta_{ji} - n x_j x_i) / |x|^{n+2}
inline double riesz_kernel(const KernelConvention& conv, int j, int i, const Vec& x) {
  const double r2 = sq_norm(conv, x);
  if (r2 == 0.0) throw std::domain_error("riesz_kernel: x = 0");
  const double d = (j == i) ? 1.0 : 0.0;
  return conv.c_n * (r2 * d - conv.n * x[j] * x[i]) / std::pow(r2, 0.5 * conv.n + 1.0);
}

inline double eval_kernel(const KernelConvention& conv, const KernelId& id, const Vec& x) {
  if (!x.allFinite()) throw std::invalid_argument("eval_kernel: non-finite point");
  switch (id.kind) {
    case KernelId::Newton: return newton_kernel(conv, x);
    case KernelId::GradNewton: return grad_newton_kernel(conv, id.j, x);
    case KernelId::Riesz: return riesz_kernel(conv, id.j, id.i, x);
  }
  throw std::logic_error("eval_kernel: bad kind");
}

// ---------------------------------------------------------------------------
// Exact potentials of the uniform unit-density ball B_R(0).

enum class BallFormula { NewtonPotOfChi, GradNewtonPotOfChi, RieszOfChi };

// N*chi_{B_R} and its derivatives, exact.  Throws on |x| == R; one-sided
// limits follow from evaluating just inside/outside.
inline double ball_closed_form(int n, double R, BallFormula kind, int j, int i,
                               const Vec& x) {
  KernelConvention conv = KernelConvention::standard(n);
  const double r2 = sq_norm(conv, x);
  const double r = std::sqrt(r2);
  const bool inside = r < R;
  if (r == R) throw std::domain_error("ball_closed_form: on the sphere, use jump limits");
  switch (kind) {
    case BallFormula::NewtonPotOfChi:
      if (n == 2)
        return inside ? 0.25 * (r2 - R * R) + 0.5 * R * R * std::log(R)
                      : 0.5 * R * R * std::log(r);
      return inside ? r2 / (2.0 * n) - R * R / (2.0 * (n - 2))
                    : -std::pow(R, n) / (n * (n - 2) * std::pow(r, n - 2));
    case BallFormula::GradNewtonPotOfChi:
      return inside ? x[j] / n : std::pow(R, n) / n * x[j] / std::pow(r, n);
    case BallFormula::RieszOfChi: {
      const double d = (j == i) ? 1.0 : 0.0;
      if (inside) return d / n;
      return std::pow(R, n) / n * (r2 * d - n * x[j] * x[i]) / std::pow(r, n + 2);
    }
  }
  throw std::logic_error("ball_closed_form: bad kind");
}

}  // namespace patchflow
