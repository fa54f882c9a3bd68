#include "patchflow/singular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "patchflow/util.hpp"

namespace patchflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<double>& gauss_nodes(int n) {
  static std::vector<std::vector<double>> nodes(33), weights(33);
  if (nodes[n].empty()) gauss_legendre(n, nodes[n], weights[n]);
  return nodes[n];
}
const std::vector<double>& gauss_weights(int n) {
  static std::vector<std::vector<double>> nodes(33), weights(33);
  if (weights[n].empty()) gauss_legendre(n, nodes[n], weights[n]);
  return weights[n];
}

struct Arc {
  double a = 0.0, b = 0.0;
  bool inside = false;
};

}  // namespace

// ---------------------------------------------------------------------------

struct SingularEvaluator::Target {
  Vec x = Vec::Zero();
  ChartPoint cp;
  double d_est = 0.0;
  double delta = 0.0;
  int bnd_node = -1;
  bool interior = false;
  double phi_near = 0.0;  // 2D: direction from x toward the nearest boundary point
};

SingularEvaluator::SingularEvaluator(const PatchMesh& mesh, KernelConvention conv,
                                     PvConfig cfg)
    : mesh_(mesh), conv_(conv), cfg_(cfg) {
  // lens terms at every boundary node, reused across levels
  lens_cache_.resize(mesh_.n_boundary());
  parallel_for(mesh_.n_boundary(), cfg_.threads, [&](int k) {
    Mat m = Mat::Zero();
    const Vec x0 = mesh_.boundary_pos(k);
    for (int a = 0; a < mesh_.dim(); ++a)
      for (int b = a; b < mesh_.dim(); ++b) {
        m(a, b) = theta_lens(a, b, x0);
        m(b, a) = m(a, b);
      }
    lens_cache_[k] = m;
  });
}

SingularEvaluator::Target SingularEvaluator::resolve(const Vec& x, int bnd_node) const {
  Target t;
  t.x = x;
  t.cp = mesh_.chart(x);
  const Patch& patch = mesh_.patch();
  const GeometryRadii& radii = mesh_.radii();
  if (patch.n == 2) {
    const double be = t.cp.beta;
    const double db = mesh_.dbeta(t.cp.theta);
    const double cosfac = be / std::hypot(be, db);
    t.d_est = std::abs(t.cp.rho - be) * cosfac;
    Vec pb = mesh_.centroid();
    pb[0] += be * std::cos(t.cp.theta);
    pb[1] += be * std::sin(t.cp.theta);
    t.phi_near = std::atan2(pb[1] - x[1], pb[0] - x[0]);
  } else {
    t.d_est = std::abs(t.cp.rho - patch.boundary.sphere.radius);
  }
  t.bnd_node = bnd_node;
  t.interior = t.cp.q <= 1.0;
  if (bnd_node >= 0) {
    t.d_est = 0.0;
    t.delta = 0.5 * radii.R0;
    t.x = mesh_.boundary_pos(bnd_node);
    t.cp = mesh_.chart(t.x);
    t.interior = false;
    return t;
  }
  if (t.d_est <= patch.eps_b())
    throw NearBoundaryError("riesz_pv: point within eps_b of the boundary; evaluate at a boundary node (jump formula) instead");
  if (t.interior) {
    t.delta = std::max(t.d_est, 0.5 * radii.R0);
  } else {
    t.delta = std::max(0.5 * radii.R0,
                       std::min(t.d_est, cfg_.delta_cap_factor * t.cp.rho));
  }
  return t;
}

// ---------------------------------------------------------------------------
// far-field sums over the mesh nodes (smoothed cutoff at r = delta)

void SingularEvaluator::q_sums(const std::vector<const ThreePartField*>& sources,
                               const Target& t, bool with_grad, Batch& out) const {
  const int G = static_cast<int>(sources.size());
  const int n = mesh_.dim();
  const double cn = conv_.c_n;
  const double x0 = t.x[0], x1 = t.x[1], x2 = t.x[2];
  const double delta = t.delta;

  for (int part = 0; part < 2; ++part) {
    const PartGrid& g = part == 0 ? mesh_.interior() : mesh_.exterior();
    const int N = g.size();
    std::vector<const double*> S(G);
    for (int s = 0; s < G; ++s)
      S[s] = part == 0 ? sources[s]->interior.data() : sources[s]->exterior.data();
    const double* gx = g.x.data();
    const double* gy = g.y.data();
    const double* gz = g.z.data();
    const double* gw = g.w.data();
    const double* gc = g.cellr.data();

    if (n == 2) {
      for (int id = 0; id < N; ++id) {
        const double w = gw[id];
        if (w == 0.0) continue;
        const double dx = gx[id] - x0, dy = gy[id] - x1;
        const double r2 = dx * dx + dy * dy;
        const double r = std::sqrt(r2);
        const double cr = gc[id];
        if (r < delta - cr) continue;
        double sig = 1.0;
        if (r < delta + cr) sig = 0.5 + 0.5 * (r - delta) / cr;
        const double pre = w * sig;
        const double inv22 = 1.0 / (r2 * r2);
        const double r11 = cn * (r2 - 2.0 * dx * dx) * inv22;
        const double r12 = -2.0 * cn * dx * dy * inv22;
        const double k1 = cn * dx / r2, k2 = cn * dy / r2;
        for (int s = 0; s < G; ++s) {
          const double v = S[s][id] * pre;
          if (v == 0.0) continue;
          Mat& Q = out.q_mat[s];
          Q(0, 0) += v * r11;
          Q(0, 1) += v * r12;
          if (with_grad) {
            out.grad_pot[s][0] += v * k1;
            out.grad_pot[s][1] += v * k2;
          }
        }
      }
    } else {
      for (int id = 0; id < N; ++id) {
        const double w = gw[id];
        if (w == 0.0) continue;
        const double dx = gx[id] - x0, dy = gy[id] - x1, dz = gz[id] - x2;
        const double r2 = dx * dx + dy * dy + dz * dz;
        const double r = std::sqrt(r2);
        const double cr = gc[id];
        if (r < delta - cr) continue;
        double sig = 1.0;
        if (r < delta + cr) sig = 0.5 + 0.5 * (r - delta) / cr;
        const double inv_r5 = 1.0 / (r2 * r2 * r);
        const double pre = w * sig * cn * inv_r5;
        const double kf = w * sig * cn / (r2 * r);
        for (int s = 0; s < G; ++s) {
          const double vs = S[s][id];
          if (vs == 0.0) continue;
          const double v = vs * pre;
          Mat& Q = out.q_mat[s];
          Q(0, 0) += v * (r2 - 3.0 * dx * dx);
          Q(0, 1) += v * (-3.0 * dx * dy);
          Q(0, 2) += v * (-3.0 * dx * dz);
          Q(1, 1) += v * (r2 - 3.0 * dy * dy);
          Q(1, 2) += v * (-3.0 * dy * dz);
          if (with_grad) {
            const double kv = vs * kf;
            out.grad_pot[s][0] += kv * dx;
            out.grad_pot[s][1] += kv * dy;
            out.grad_pot[s][2] += kv * dz;
          }
        }
      }
    }
  }
  // symmetric completion + zero-trace closure of the kernel part
  for (int s = 0; s < G; ++s) {
    Mat& Q = out.q_mat[s];
    if (n == 2) {
      Q(1, 0) = Q(0, 1);
      Q(1, 1) = -Q(0, 0);
    } else {
      Q(2, 2) = -Q(0, 0) - Q(1, 1);
      Q(1, 0) = Q(0, 1);
      Q(2, 0) = Q(0, 2);
      Q(2, 1) = Q(1, 2);
    }
  }
}

// ---------------------------------------------------------------------------
// local polar rule

namespace {

// radial panels for [0, delta]; head panels at r=0 get the z-substitution at
// boundary targets (integrand ~ r^{gamma-1})
struct RadialPanel {
  double lo = 0.0, hi = 0.0;
  bool head_subst = false;
};

std::vector<RadialPanel> radial_panels(double delta, double d_est, bool boundary,
                                       const PvConfig& cfg) {
  std::vector<RadialPanel> panels;
  if (boundary) {
    double hi = delta;
    for (int k = 0; k < cfg.graded_panels; ++k) {
      const double lo = hi * 0.5;
      panels.push_back({lo, hi, false});
      hi = lo;
    }
    panels.push_back({0.0, hi, true});
  } else if (d_est < delta) {
    const double d = d_est;
    panels.push_back({0.0, 0.5 * d, false});
    panels.push_back({0.5 * d, 0.75 * d, false});
    panels.push_back({0.75 * d, d, false});
    const double ratio = std::max(1.3, std::pow(delta / d, 1.0 / cfg.crossing_panels));
    double lo = d;
    while (lo < delta * (1.0 - 1e-12)) {
      const double hi = std::min(lo * ratio, delta);
      panels.push_back({lo, hi, false});
      lo = hi;
    }
  } else {
    for (int k = 0; k < cfg.plain_panels; ++k)
      panels.push_back({delta * k / cfg.plain_panels, delta * (k + 1) / cfg.plain_panels,
                        false});
  }
  return panels;
}

}  // namespace

void SingularEvaluator::local_sums(const std::vector<const ThreePartField*>& sources,
                                   const Target& t, bool with_grad,
                                   const std::vector<double>& f0_int,
                                   const std::vector<double>& f0_ext, Batch& out) const {
  const int G = static_cast<int>(sources.size());
  const int n = mesh_.dim();
  const double cn = conv_.c_n;
  const bool boundary = t.bnd_node >= 0;
  const double gamma = mesh_.patch().gamma;
  const auto panels = radial_panels(t.delta, t.d_est, boundary, cfg_);
  const auto& gr = gauss_nodes(cfg_.gauss_radial);
  const auto& grw = gauss_weights(cfg_.gauss_radial);

  // shells cannot cross the boundary below this radius
  const double r_safe = boundary ? 0.0 : t.d_est * 0.995;

  if (n == 2) {
    const auto& ga = gauss_nodes(cfg_.gauss_arc);
    const auto& gaw = gauss_weights(cfg_.gauss_arc);
    for (const RadialPanel& pan : panels) {
      for (int ir = 0; ir < cfg_.gauss_radial; ++ir) {
        double r, wr;
        if (pan.head_subst) {
          const double z = 0.5 * (gr[ir] + 1.0);
          r = pan.hi * std::pow(z, 1.0 / gamma);
          wr = 0.5 * grw[ir] * pan.hi / gamma * std::pow(z, 1.0 / gamma - 1.0);
        } else {
          r = 0.5 * (pan.lo + pan.hi) + 0.5 * (pan.hi - pan.lo) * gr[ir];
          wr = 0.5 * (pan.hi - pan.lo) * grw[ir];
        }
        if (r <= 0.0) continue;
        // arcs of this shell by region
        std::vector<Arc> arcs;
        if (r < r_safe) {
          arcs.push_back({0.0, kTwoPi, t.interior});
        } else {
          std::vector<double> scan;
          scan.reserve(cfg_.arc_scan + 16);
          for (int k = 0; k < cfg_.arc_scan; ++k) scan.push_back(kTwoPi * k / cfg_.arc_scan);
          const double spread[] = {0.0, 0.02, -0.02, 0.06, -0.06, 0.15, -0.15, 0.4, -0.4};
          if (boundary) {
            // crossings sit near the two tangent directions
            const Vec& eta = mesh_.boundary_normal(t.bnd_node);
            const double phi_t = std::atan2(-eta[0], eta[1]);
            for (double sp : spread) {
              scan.push_back(phi_t + sp);
              scan.push_back(phi_t + std::numbers::pi + sp);
            }
          } else {
            for (double sp : spread) scan.push_back(t.phi_near + sp);
          }
          std::sort(scan.begin(), scan.end());
          auto is_in = [&](double phi) {
            Vec p = t.x;
            p[0] += r * std::cos(phi);
            p[1] += r * std::sin(phi);
            return mesh_.chart(p).q <= 1.0;
          };
          const int NS = static_cast<int>(scan.size());
          std::vector<bool> in(NS);
          for (int k = 0; k < NS; ++k) in[k] = is_in(scan[k]);
          std::vector<double> cross;
          for (int k = 0; k < NS; ++k) {
            const int k2 = (k + 1) % NS;
            if (in[k] == in[k2]) continue;
            double a = scan[k], b = scan[k2] + (k2 == 0 ? kTwoPi : 0.0);
            for (int it = 0; it < 40; ++it) {
              const double m = 0.5 * (a + b);
              if (is_in(m) == in[k]) a = m;
              else b = m;
            }
            cross.push_back(0.5 * (a + b));
          }
          if (cross.empty()) {
            arcs.push_back({0.0, kTwoPi, in[0]});
          } else {
            std::sort(cross.begin(), cross.end());
            for (size_t k = 0; k < cross.size(); ++k) {
              const double a = cross[k];
              const double b = k + 1 < cross.size() ? cross[k + 1] : cross[0] + kTwoPi;
              arcs.push_back({a, b, is_in(0.5 * (a + b))});
            }
          }
        }
        // integrate each arc
        const double inv_r2 = 1.0 / (r * r);
        for (const Arc& arc : arcs) {
          const double half = 0.5 * (arc.b - arc.a);
          if (half <= 0.0) continue;
          for (int ia = 0; ia < cfg_.gauss_arc; ++ia) {
            const double phi = 0.5 * (arc.a + arc.b) + half * ga[ia];
            const double cphi = std::cos(phi), sphi = std::sin(phi);
            Vec p = t.x;
            p[0] += r * cphi;
            p[1] += r * sphi;
            const Stencil st = mesh_.stencil(mesh_.chart(p), arc.inside ? 0 : 1);
            const double meas = wr * gaw[ia] * half * r;
            const double r11 = cn * (1.0 - 2.0 * cphi * cphi) * inv_r2;
            const double r12 = -2.0 * cn * cphi * sphi * inv_r2;
            const double k1 = cn * cphi / r, k2 = cn * sphi / r;
            for (int s = 0; s < G; ++s) {
              const double v =
                  mesh_.eval(sources[s]->interior, sources[s]->exterior, st, sources[s]->decay);
              const double dv = v - (arc.inside ? f0_int[s] : f0_ext[s]);
              Mat& L = out.l_mat[s];
              L(0, 0) += meas * dv * r11;
              L(0, 1) += meas * dv * r12;
              if (with_grad) {
                out.grad_pot[s][0] += meas * v * k1;
                out.grad_pot[s][1] += meas * v * k2;
              }
            }
          }
        }
      }
    }
    for (int s = 0; s < G; ++s) {
      Mat& L = out.l_mat[s];
      L(1, 0) = L(0, 1);
      L(1, 1) = -L(0, 0);
    }
    return;
  }

  // --- 3D (spheres) ---
  const double R = mesh_.patch().boundary.sphere.radius;
  const Vec C = mesh_.centroid();
  const double rho = (t.x - C).norm();
  Vec e_out = rho > 1e-14 ? Vec((t.x - C) / rho) : Vec::UnitZ();
  Vec u1 = e_out.unitOrthogonal();
  Vec u2 = e_out.cross(u1);
  const auto& gm = gauss_nodes(cfg_.gauss_mu_local);
  const auto& gmw = gauss_weights(cfg_.gauss_mu_local);
  const int NA = cfg_.azimuth_local;

  for (const RadialPanel& pan : panels) {
    for (int ir = 0; ir < cfg_.gauss_radial; ++ir) {
      double r, wr;
      if (pan.head_subst) {
        const double z = 0.5 * (gr[ir] + 1.0);
        r = pan.hi * std::pow(z, 1.0 / gamma);
        wr = 0.5 * grw[ir] * pan.hi / gamma * std::pow(z, 1.0 / gamma - 1.0);
      } else {
        r = 0.5 * (pan.lo + pan.hi) + 0.5 * (pan.hi - pan.lo) * gr[ir];
        wr = 0.5 * (pan.hi - pan.lo) * grw[ir];
      }
      if (r <= 0.0) continue;
      // cap split: inside <=> e_out . omega <= mu_cap
      double mu_cap;
      if (rho < 1e-14) {
        mu_cap = r < R ? 1.0 : -1.0;
      } else {
        mu_cap = (R * R - rho * rho - r * r) / (2.0 * r * rho);
      }
      struct MuSeg {
        double lo, hi;
        bool inside;
      };
      std::vector<MuSeg> segs;
      if (mu_cap >= 1.0) segs.push_back({-1.0, 1.0, true});
      else if (mu_cap <= -1.0) segs.push_back({-1.0, 1.0, false});
      else {
        segs.push_back({-1.0, mu_cap, true});
        segs.push_back({mu_cap, 1.0, false});
      }
      for (const MuSeg& seg : segs) {
        const double mh = 0.5 * (seg.hi - seg.lo);
        if (mh <= 0.0) continue;
        for (int im = 0; im < cfg_.gauss_mu_local; ++im) {
          const double mu = 0.5 * (seg.lo + seg.hi) + mh * gm[im];
          const double smu = std::sqrt(std::max(1.0 - mu * mu, 0.0));
          const double wmu = gmw[im] * mh;
          for (int ia = 0; ia < NA; ++ia) {
            const double alpha = kTwoPi * (ia + 0.5) / NA;
            const Vec omega = mu * e_out + smu * (std::cos(alpha) * u1 + std::sin(alpha) * u2);
            const Vec p = t.x + r * omega;
            const Stencil st = mesh_.stencil(mesh_.chart(p), seg.inside ? 0 : 1);
            const double meas = wr * wmu * (kTwoPi / NA) * r * r;
            const double inv_r3 = 1.0 / (r * r * r);
            for (int s = 0; s < G; ++s) {
              const double v =
                  mesh_.eval(sources[s]->interior, sources[s]->exterior, st, sources[s]->decay);
              const double dv = v - (seg.inside ? f0_int[s] : f0_ext[s]);
              Mat& L = out.l_mat[s];
              const double pre = meas * dv * cn * inv_r3;
              L(0, 0) += pre * (1.0 - 3.0 * omega[0] * omega[0]);
              L(0, 1) += pre * (-3.0 * omega[0] * omega[1]);
              L(0, 2) += pre * (-3.0 * omega[0] * omega[2]);
              L(1, 1) += pre * (1.0 - 3.0 * omega[1] * omega[1]);
              L(1, 2) += pre * (-3.0 * omega[1] * omega[2]);
              if (with_grad) {
                const double kv = meas * v * cn / (r * r);
                out.grad_pot[s][0] += kv * omega[0];
                out.grad_pot[s][1] += kv * omega[1];
                out.grad_pot[s][2] += kv * omega[2];
              }
            }
          }
        }
      }
    }
  }
  for (int s = 0; s < G; ++s) {
    Mat& L = out.l_mat[s];
    L(2, 2) = -L(0, 0) - L(1, 1);
    L(1, 0) = L(0, 1);
    L(2, 0) = L(0, 2);
    L(2, 1) = L(1, 2);
  }
}

// ---------------------------------------------------------------------------

SingularEvaluator::Batch SingularEvaluator::evaluate(
    const std::vector<const ThreePartField*>& sources, const Vec& x, bool with_gradients,
    int bnd_node) const {
  const int G = static_cast<int>(sources.size());
  const int n = mesh_.dim();
  Batch out;
  out.q_mat.assign(G, Mat::Zero());
  out.l_mat.assign(G, Mat::Zero());
  out.theta_mat.assign(G, Mat::Zero());
  out.hess.assign(G, Mat::Zero());
  out.grad_pot.assign(G, Vec::Zero());

  const Target t = resolve(x, bnd_node);

  // own-part subtraction constants
  std::vector<double> f0_int(G, 0.0), f0_ext(G, 0.0);
  if (t.bnd_node >= 0) {
    for (int s = 0; s < G; ++s) {
      f0_int[s] = bnd_inner(mesh_, *sources[s], t.bnd_node);
      f0_ext[s] = bnd_outer(mesh_, *sources[s], t.bnd_node);
    }
  } else if (t.interior) {
    const Stencil st = mesh_.stencil(t.cp, 0);
    for (int s = 0; s < G; ++s)
      f0_int[s] = mesh_.eval(sources[s]->interior, sources[s]->exterior, st, sources[s]->decay);
  } else {
    const Stencil st = mesh_.stencil(t.cp, 1);
    for (int s = 0; s < G; ++s)
      f0_ext[s] = mesh_.eval(sources[s]->interior, sources[s]->exterior, st, sources[s]->decay);
  }

  q_sums(sources, t, with_gradients, out);
  local_sums(sources, t, with_gradients, f0_int, f0_ext, out);

  for (int s = 0; s < G; ++s) {
    // local density term (Hessian convention), folded into l_mat
    double dens;
    if (t.bnd_node >= 0) dens = 0.5 * (f0_int[s] + f0_ext[s]);
    else dens = t.interior ? f0_int[s] : f0_ext[s];
    for (int a = 0; a < n; ++a) out.l_mat[s](a, a) += dens / n;
    // boundary lens term
    if (t.bnd_node >= 0)
      out.theta_mat[s] = (f0_int[s] - f0_ext[s]) * lens_cache_[t.bnd_node];
    out.hess[s] = out.q_mat[s] + out.l_mat[s] + out.theta_mat[s];
  }
  return out;
}

PvResult SingularEvaluator::riesz_pv(const ThreePartField& f, int j, int i,
                                     const Vec& x) const {
  const Batch b = evaluate({&f}, x, false, -1);
  PvResult r;
  r.q_part = b.q_mat[0](j, i);
  r.l_part = b.l_mat[0](j, i);
  r.theta_part = b.theta_mat[0](j, i);
  r.value = b.hess[0](j, i);
  return r;
}

PvResult SingularEvaluator::riesz_pv_at_node(const ThreePartField& f, int j, int i,
                                             int bnd_node) const {
  const Batch b = evaluate({&f}, mesh_.boundary_pos(bnd_node), false, bnd_node);
  PvResult r;
  r.q_part = b.q_mat[0](j, i);
  r.l_part = b.l_mat[0](j, i);
  r.theta_part = b.theta_mat[0](j, i);
  r.value = b.hess[0](j, i);
  return r;
}

double SingularEvaluator::newton_potential(const ThreePartField& f, int j,
                                           const Vec& x) const {
  const Batch b = evaluate({&f}, x, true, -1);
  return b.grad_pot[0][j];
}

double SingularEvaluator::boundary_theta(int j, int i, int bnd_node) const {
  return lens_cache_[bnd_node](j, i);
}

// Lens term of Lemma 10: difference of integrals of R_{j,i} over the regions
// between the boundary graph and its tangent hyperplane, inside B_{R0/2}(x0).
double SingularEvaluator::theta_lens(int j, int i, const Vec& x0) const {
  const Patch& patch = mesh_.patch();
  const double half = 0.5 * mesh_.radii().R0;
  LocalGraph lg = local_graph(patch, x0, 1.5 * half);
  return lens_term(conv_, lg, patch.n, half, patch.gamma, j, i, cfg_);
}

double SingularEvaluator::lens_term(const KernelConvention& conv, const LocalGraph& lg,
                                    int dim, double half, double gamma, int j, int i,
                                    const PvConfig& cfg_) {
  const KernelConvention& conv_ = conv;
  const auto& gh = gauss_nodes(cfg_.lens_gauss);
  const auto& ghw = gauss_weights(cfg_.lens_gauss);

  // strip integral over the height between the tangent plane and the graph
  auto strip = [&](const Vec& s_world, double phis, double smax_h) {
    double acc = 0.0;
    double h_lo, h_hi;
    double sign;
    if (phis > 0.0) {
      h_lo = 0.0;
      h_hi = std::min(phis, smax_h);
      sign = 1.0;
    } else {
      h_lo = std::max(phis, -smax_h);
      h_hi = 0.0;
      sign = -1.0;
    }
    if (h_hi <= h_lo) return 0.0;
    const Vec eta = lg.frame.col(2);
    for (int kh = 0; kh < cfg_.lens_gauss; ++kh) {
      const double h = 0.5 * (h_lo + h_hi) + 0.5 * (h_hi - h_lo) * gh[kh];
      const double wh = 0.5 * (h_hi - h_lo) * ghw[kh];
      const Vec off = s_world + h * eta;
      acc += sign * wh * riesz_kernel(conv_, j, i, off);
    }
    return acc;
  };

  double total = 0.0;
  if (dim == 2) {
    // graded s-panels toward 0 on both sides, head panels z-substituted
    for (int side = -1; side <= 1; side += 2) {
      double hi = half;
      for (int k = 0; k <= cfg_.lens_panels; ++k) {
        const bool head = (k == cfg_.lens_panels);
        const double lo = head ? 0.0 : hi * 0.5;
        for (int is = 0; is < cfg_.lens_gauss; ++is) {
          double s, ws;
          if (head) {
            const double z = 0.5 * (gh[is] + 1.0);
            s = hi * std::pow(z, 1.0 / gamma);
            ws = 0.5 * ghw[is] * hi / gamma * std::pow(z, 1.0 / gamma - 1.0);
          } else {
            s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gh[is];
            ws = 0.5 * (hi - lo) * ghw[is];
          }
          if (s <= 0.0 || s >= half) continue;
          const double ss = side * s;
          const double phis = lg.phi(Eigen::Vector2d(ss, 0.0));
          const double smax_h = std::sqrt(std::max(half * half - ss * ss, 0.0));
          total += strip(ss * lg.frame.col(0), phis, smax_h) * ws;
        }
        hi = lo;
        if (head) break;
      }
    }
    return total;
  }
  // 3D: polar coordinates in the tangent plane
  const int NA = cfg_.lens_azimuth;
  double hi = half;
  for (int k = 0; k <= cfg_.lens_panels; ++k) {
    const bool head = (k == cfg_.lens_panels);
    const double lo = head ? 0.0 : hi * 0.5;
    for (int is = 0; is < cfg_.lens_gauss; ++is) {
      double s, ws;
      if (head) {
        const double z = 0.5 * (gh[is] + 1.0);
        s = hi * std::pow(z, 1.0 / gamma);
        ws = 0.5 * ghw[is] * hi / gamma * std::pow(z, 1.0 / gamma - 1.0);
      } else {
        s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gh[is];
        ws = 0.5 * (hi - lo) * ghw[is];
      }
      if (s <= 0.0 || s >= half) continue;
      const double phis = lg.phi(Eigen::Vector2d(s, 0.0));  // radial on spheres
      const double smax_h = std::sqrt(std::max(half * half - s * s, 0.0));
      for (int ia = 0; ia < NA; ++ia) {
        const double alpha = kTwoPi * (ia + 0.5) / NA;
        const Vec sw = s * (std::cos(alpha) * lg.frame.col(0) +
                            std::sin(alpha) * lg.frame.col(1));
        total += strip(sw, phis, smax_h) * ws * s * (kTwoPi / NA);
      }
    }
    hi = lo;
    if (head) break;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Lemma-11 constant

double halfspace_constant(int n, int j, int i, const Vec& eta, double lambda,
                          int completion_variant, int quad_points) {
  if (lambda == 0.0) throw std::invalid_argument("halfspace_constant: lambda must be nonzero");
  // orthonormal completion of eta, optionally rotated in the tangent plane
  Vec u1, u2;
  if (n == 2) {
    u1 = Vec(-eta[1], eta[0], 0.0);
    if (completion_variant % 2 == 1) u1 = -u1;
  } else {
    u1 = eta.unitOrthogonal();
    u2 = eta.cross(u1);
    const double ang = 0.7345 * completion_variant;
    const Vec v1 = std::cos(ang) * u1 + std::sin(ang) * u2;
    const Vec v2 = -std::sin(ang) * u1 + std::cos(ang) * u2;
    u1 = v1;
    u2 = v2;
  }
  // cofactor A_{i,n}: determinant of [u_1 .. u_{n-1}] with row i removed
  auto cofactor = [&](void) {
    if (n == 2) {
      const int other = 1 - i;
      return u1[other];
    }
    int r0 = -1, r1 = -1;
    for (int r = 0; r < 3; ++r)
      if (r != i) (r0 < 0 ? r0 : r1) = r;
    return u1[r0] * u2[r1] - u1[r1] * u2[r0];
  };
  const double A = cofactor();

  std::vector<double> gn, gw;
  gauss_legendre(quad_points, gn, gw);
  double acc = 0.0;
  if (n == 2) {
    // s in (-2 lambda, 2 lambda) along u1
    for (int k = 0; k < quad_points; ++k) {
      const double s = 2.0 * lambda * gn[k];
      const double w = 2.0 * lambda * gw[k];
      const Vec d = s * u1 - lambda * eta;
      const double r2 = d.squaredNorm();
      acc += w * d[j] / r2 * A;
    }
    return acc;
  }
  // disc of radius 2 lambda in the (u1,u2) plane
  const int NA = quad_points;
  for (int k = 0; k < quad_points; ++k) {
    const double rr = 2.0 * lambda * 0.5 * (gn[k] + 1.0);
    const double wr = 2.0 * lambda * 0.5 * gw[k];
    for (int a = 0; a < NA; ++a) {
      const double al = kTwoPi * (a + 0.5) / NA;
      const Vec d = rr * (std::cos(al) * u1 + std::sin(al) * u2) - lambda * eta;
      const double r3 = std::pow(d.squaredNorm(), 1.5);
      acc += wr * (kTwoPi / NA) * rr * d[j] / r3 * A;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// jump formula

JumpAverage jump_average(const SingularEvaluator& ev, const ThreePartField& g, int j,
                         int i, int bnd_node, double lambda0, int levels) {
  const PatchMesh& mesh = ev.mesh();
  if (lambda0 <= 0.0) lambda0 = 0.25 * mesh.radii().R0;
  const Vec x = mesh.boundary_pos(bnd_node);
  const Vec eta = mesh.boundary_normal(bnd_node);
  JumpAverage out;
  const double gamma = g.gamma;

  auto extrapolate = [&](const std::vector<double>& v) {
    // stage 1 removes lambda^gamma, stage 2 removes lambda
    std::vector<double> t1(v.size() - 1), t2;
    const double f1 = std::pow(2.0, gamma);
    for (size_t k = 0; k + 1 < v.size(); ++k) t1[k] = (f1 * v[k + 1] - v[k]) / (f1 - 1.0);
    t2.resize(t1.size() - 1);
    for (size_t k = 0; k + 1 < t1.size(); ++k) t2[k] = 2.0 * t1[k + 1] - t1[k];
    return t2;
  };

  std::vector<double> vin(levels), vout(levels);
  for (int k = 0; k < levels; ++k) {
    const double lam = lambda0 * std::pow(2.0, -k);
    vin[k] = ev.riesz_pv(g, j, i, x - lam * eta).value;
    vout[k] = ev.riesz_pv(g, j, i, x + lam * eta).value;
  }
  out.inner_table = vin;
  out.outer_table = vout;
  const auto tin = extrapolate(vin);
  const auto tout = extrapolate(vout);
  out.inner = tin.back();
  out.outer = tout.back();
  if (tin.size() >= 2) {
    const double scale = std::max({1.0, std::abs(out.inner), std::abs(out.outer)});
    out.converged = std::abs(tin.back() - tin[tin.size() - 2]) < 0.02 * scale &&
                    std::abs(tout.back() - tout[tout.size() - 2]) < 0.02 * scale;
  }
  out.average = 0.5 * (out.inner + out.outer);
  out.pv_value = ev.riesz_pv_at_node(g, j, i, bnd_node).value;
  return out;
}

// ---------------------------------------------------------------------------
// Hoelder harness

HolderReport holder_harness(const SingularEvaluator& ev, const ThreePartField& f, int j,
                            int i, RegionTag part, int pairs, unsigned seed) {
  const PatchMesh& mesh = ev.mesh();
  const PartGrid& g = part == RegionTag::Interior ? mesh.interior() : mesh.exterior();
  std::mt19937_64 rng(seed);
  // stay clear of the nearly-degenerate rows
  const int row_lo = part == RegionTag::Interior ? 1 : 1;
  const int row_hi = part == RegionTag::Interior ? g.rows - 2 : std::min(g.rows - 2, g.rows / 2);
  std::uniform_int_distribution<int> row_d(row_lo, row_hi);
  std::uniform_int_distribution<int> ang_d(0, g.nphi * g.ntheta - 1);
  HolderReport rep;
  rep.pairs = pairs;
  const double gamma = f.gamma;
  for (int p = 0; p < pairs; ++p) {
    const int i1 = g.idx(row_d(rng), 0, 0) + ang_d(rng);
    const int i2 = g.idx(row_d(rng), 0, 0) + ang_d(rng);
    Vec a = Vec::Zero(), b = Vec::Zero();
    a[0] = g.x[i1];
    a[1] = g.y[i1];
    a[2] = g.z[i1];
    b[0] = g.x[i2];
    b[1] = g.y[i2];
    b[2] = g.z[i2];
    const double dist = (a - b).norm();
    if (dist < 1e-9) continue;
    const double va = ev.riesz_pv(f, j, i, a).value;
    const double vb = ev.riesz_pv(f, j, i, b).value;
    rep.sup_quotient = std::max(rep.sup_quotient, std::abs(va - vb) / std::pow(dist, gamma));
  }
  return rep;
}

std::vector<double> holder_cross_quotients(const SingularEvaluator& ev,
                                           const ThreePartField& f, int j, int i,
                                           const std::vector<double>& separations) {
  const PatchMesh& mesh = ev.mesh();
  const int node = 0;
  const Vec x = mesh.boundary_pos(node);
  const Vec eta = mesh.boundary_normal(node);
  std::vector<double> out;
  for (double sep : separations) {
    const Vec a = x - 0.5 * sep * eta;
    const Vec b = x + 0.5 * sep * eta;
    const double va = ev.riesz_pv(f, j, i, a).value;
    const double vb = ev.riesz_pv(f, j, i, b).value;
    out.push_back(std::abs(va - vb) / std::pow(sep, f.gamma));
  }
  return out;
}

}  // namespace patchflow
