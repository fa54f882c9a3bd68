#include "patchflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace patchflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 4-point Lagrange weights on a uniform grid, nodes i0..i0+3, position t
// (grid units, relative to i0).
inline void lagrange4_uniform(double e, double w[4]) {
  w[0] = -(e - 1.0) * (e - 2.0) * (e - 3.0) / 6.0;
  w[1] = e * (e - 2.0) * (e - 3.0) / 2.0;
  w[2] = -e * (e - 1.0) * (e - 3.0) / 2.0;
  w[3] = e * (e - 1.0) * (e - 2.0) / 6.0;
}

inline void lagrange4_general(const double xs[4], double xq, double w[4]) {
  for (int m = 0; m < 4; ++m) {
    double num = 1.0, den = 1.0;
    for (int l = 0; l < 4; ++l) {
      if (l == m) continue;
      num *= (xq - xs[l]);
      den *= (xs[m] - xs[l]);
    }
    w[m] = num / den;
  }
}

inline int simpson_rows_check(int n, const char* what) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument(std::string("mesh: ") + what + " must be even and >= 4");
  return n;
}

inline double simpson_weight(int k, int n) {
  if (k == 0 || k == n) return 1.0 / 3.0;
  return (k % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

// ---------------------------------------------------------------------------
// grading maps

double PatchMesh::q_of_u(double u) const { return 1.0 - std::pow(1.0 - u, cfg_.q_power); }
double PatchMesh::u_of_q(double q) const {
  return 1.0 - std::pow(std::max(1.0 - q, 0.0), 1.0 / cfg_.q_power);
}
double PatchMesh::dq_du(double u) const {
  return cfg_.q_power * std::pow(1.0 - u, cfg_.q_power - 1.0);
}
double PatchMesh::s_of_v(double v) const {
  return 1.0 + (cfg_.s_max - 1.0) * std::pow(v, cfg_.s_power);
}
double PatchMesh::v_of_s(double s) const {
  return std::pow(std::max(s - 1.0, 0.0) / (cfg_.s_max - 1.0), 1.0 / cfg_.s_power);
}
double PatchMesh::ds_dv(double v) const {
  return cfg_.s_power * (cfg_.s_max - 1.0) * std::pow(v, cfg_.s_power - 1.0);
}

// ---------------------------------------------------------------------------

PatchMesh::PatchMesh(const Patch& patch, const GeometryRadii& radii, const MeshConfig& cfg)
    : patch_(patch), radii_(radii), cfg_(cfg) {
  simpson_rows_check(cfg_.nq, "nq");
  simpson_rows_check(cfg_.ns, "ns");
  centroid_ = patch_centroid(patch_);
  if (patch_.n == 2) {
    build_radial_tables();
    build2d();
  } else {
    build3d();
  }
}

void PatchMesh::build_radial_tables() {
  const FourierCurve& f = patch_.boundary.fourier;
  const Vec C = centroid_;
  const int M = 8192;
  std::vector<double> uu(M + 1), ang(M + 1);
  double prev = 0.0;
  for (int i = 0; i <= M; ++i) {
    const double u = kTwoPi * i / M;
    const Vec rel = f.eval(u) - C;
    double a = std::atan2(rel[1], rel[0]);
    if (i > 0) {
      while (a < prev - std::numbers::pi) a += kTwoPi;
      while (a > prev + std::numbers::pi) a -= kTwoPi;
      if (a <= prev)
        throw GeometryError("mesh: boundary is not star-shaped about its centroid");
    }
    uu[i] = u;
    ang[i] = a;
    prev = a;
  }
  nfine_ = 4 * cfg_.ntheta;
  beta_tab_.resize(nfine_);
  dbeta_tab_.resize(nfine_);
  const double a0 = ang[0];
  for (int t = 0; t < nfine_; ++t) {
    double target = a0 + kTwoPi * t / nfine_;
    // locate the bracketing table segment, then polish with Newton
    const auto it = std::upper_bound(ang.begin(), ang.end(), target);
    int hi = static_cast<int>(it - ang.begin());
    hi = std::min(std::max(hi, 1), M);
    const double frac = (target - ang[hi - 1]) / (ang[hi] - ang[hi - 1]);
    double u = uu[hi - 1] + frac * (uu[hi] - uu[hi - 1]);
    for (int k = 0; k < 8; ++k) {
      const Vec rel = f.eval(u) - C;
      const Vec drel = f.deriv(u);
      const double r2 = rel[0] * rel[0] + rel[1] * rel[1];
      double err = std::atan2(rel[1], rel[0]) - target;
      while (err > std::numbers::pi) err -= kTwoPi;
      while (err < -std::numbers::pi) err += kTwoPi;
      const double dth = (rel[0] * drel[1] - rel[1] * drel[0]) / r2;
      u -= err / dth;
    }
    const Vec rel = f.eval(u) - C;
    const Vec drel = f.deriv(u);
    const double rho = rel.head<2>().norm();
    const double cross = rel[0] * drel[1] - rel[1] * drel[0];
    beta_tab_[t] = rho;
    dbeta_tab_[t] = (rel[0] * drel[0] + rel[1] * drel[1]) * rho / cross;
  }
  // the fine table starts at angle a0, not at 0; rotate so index 0 <-> theta 0
  std::vector<double> b2(nfine_), db2(nfine_);
  for (int t = 0; t < nfine_; ++t) {
    double th = kTwoPi * t / nfine_;
    double pos = (th - a0) / kTwoPi * nfine_;
    pos = std::fmod(pos, static_cast<double>(nfine_));
    if (pos < 0) pos += nfine_;
    const int i1 = static_cast<int>(std::floor(pos));
    const double e = pos - i1 + 1.0;
    double w[4];
    lagrange4_uniform(e, w);
    double b = 0.0, db = 0.0;
    for (int m = 0; m < 4; ++m) {
      const int idx = ((i1 - 1 + m) % nfine_ + nfine_) % nfine_;
      b += w[m] * beta_tab_[idx];
      db += w[m] * dbeta_tab_[idx];
    }
    b2[t] = b;
    db2[t] = db;
  }
  beta_tab_.swap(b2);
  dbeta_tab_.swap(db2);
}

double PatchMesh::beta(double theta) const {
  if (patch_.n == 3 || patch_.boundary.mode == BoundaryCurve::Sphere)
    return patch_.boundary.sphere.radius;
  double pos = theta / kTwoPi * nfine_;
  pos = std::fmod(pos, static_cast<double>(nfine_));
  if (pos < 0) pos += nfine_;
  const int i1 = static_cast<int>(std::floor(pos));
  const double e = pos - i1 + 1.0;
  double w[4];
  lagrange4_uniform(e, w);
  double b = 0.0;
  for (int m = 0; m < 4; ++m)
    b += w[m] * beta_tab_[((i1 - 1 + m) % nfine_ + nfine_) % nfine_];
  return b;
}

double PatchMesh::dbeta(double theta) const {
  if (patch_.n == 3 || patch_.boundary.mode == BoundaryCurve::Sphere) return 0.0;
  double pos = theta / kTwoPi * nfine_;
  pos = std::fmod(pos, static_cast<double>(nfine_));
  if (pos < 0) pos += nfine_;
  const int i1 = static_cast<int>(std::floor(pos));
  const double e = pos - i1 + 1.0;
  double w[4];
  lagrange4_uniform(e, w);
  double b = 0.0;
  for (int m = 0; m < 4; ++m)
    b += w[m] * dbeta_tab_[((i1 - 1 + m) % nfine_ + nfine_) % nfine_];
  return b;
}

void PatchMesh::build2d() {
  const int NT = cfg_.ntheta;
  const double dth = kTwoPi / NT;
  auto build_part = [&](PartGrid& g, bool ext) {
    const int rows = (ext ? cfg_.ns : cfg_.nq) + 1;
    g.rows = rows;
    g.nphi = 1;
    g.ntheta = NT;
    g.radial.resize(rows);
    const int Nn = g.size();
    g.x.resize(Nn);
    g.y.resize(Nn);
    g.z.assign(Nn, 0.0);
    g.w.resize(Nn);
    g.cellr.resize(Nn);
    const int ncell = rows - 1;
    const double du = 1.0 / ncell;
    for (int k = 0; k < rows; ++k) {
      const double u = static_cast<double>(k) / ncell;
      const double r = ext ? s_of_v(u) : q_of_u(u);
      const double J = ext ? ds_dv(u) : dq_du(u);
      g.radial[k] = r;
      const double sw = simpson_weight(k, ncell) * du;
      for (int b = 0; b < NT; ++b) {
        const double th = dth * b;
        const double be = beta(th);
        const int id = g.idx(k, 0, b);
        g.x[id] = centroid_[0] + r * be * std::cos(th);
        g.y[id] = centroid_[1] + r * be * std::sin(th);
        g.w[id] = sw * J * r * be * be * dth;
        const double hr = J * du * be;
        const double ht = r * be * dth;
        g.cellr[id] = 0.5 * std::hypot(hr, ht);
      }
    }
  };
  build_part(interior_, false);
  build_part(exterior_, true);

  bnd_pos_.resize(NT);
  bnd_normal_.resize(NT);
  for (int b = 0; b < NT; ++b) {
    const double th = dth * b;
    const double be = beta(th);
    Vec p = centroid_;
    p[0] += be * std::cos(th);
    p[1] += be * std::sin(th);
    bnd_pos_[b] = p;
    bnd_normal_[b] = outward_normal(patch_, p);
  }
}

void PatchMesh::build3d() {
  const SphereBoundary sph = patch_.boundary.sphere;
  const double R = sph.radius;
  const int NT = cfg_.ntheta;
  const int NP = cfg_.nphi;
  const double dth = kTwoPi / NT;
  gauss_legendre(NP, mu_nodes_, mu_weights_);

  auto build_part = [&](PartGrid& g, bool ext) {
    const int rows = (ext ? cfg_.ns : cfg_.nq) + 1;
    g.rows = rows;
    g.nphi = NP;
    g.ntheta = NT;
    g.radial.resize(rows);
    const int Nn = g.size();
    g.x.resize(Nn);
    g.y.resize(Nn);
    g.z.resize(Nn);
    g.w.resize(Nn);
    g.cellr.resize(Nn);
    const int ncell = rows - 1;
    const double du = 1.0 / ncell;
    for (int k = 0; k < rows; ++k) {
      const double u = static_cast<double>(k) / ncell;
      const double r = ext ? s_of_v(u) : q_of_u(u);
      const double J = ext ? ds_dv(u) : dq_du(u);
      g.radial[k] = r;
      const double sw = simpson_weight(k, ncell) * du;
      for (int a = 0; a < NP; ++a) {
        const double mu = mu_nodes_[a];
        const double smu = std::sqrt(std::max(1.0 - mu * mu, 0.0));
        for (int b = 0; b < NT; ++b) {
          const double th = dth * b;
          const int id = g.idx(k, a, b);
          g.x[id] = centroid_[0] + r * R * smu * std::cos(th);
          g.y[id] = centroid_[1] + r * R * smu * std::sin(th);
          g.z[id] = centroid_[2] + r * R * mu;
          g.w[id] = sw * J * r * r * R * R * R * mu_weights_[a] * dth;
          const double hr = J * du * R;
          const double ha = r * R * (2.0 / NP);  // representative angular spacing
          g.cellr[id] = 0.5 * std::sqrt(hr * hr + ha * ha + std::pow(r * R * smu * dth, 2));
        }
      }
    }
  };
  build_part(interior_, false);
  build_part(exterior_, true);

  bnd_pos_.resize(NP * NT);
  bnd_normal_.resize(NP * NT);
  for (int a = 0; a < NP; ++a) {
    const double mu = mu_nodes_[a];
    const double smu = std::sqrt(std::max(1.0 - mu * mu, 0.0));
    for (int b = 0; b < NT; ++b) {
      const double th = dth * b;
      Vec w = Vec(smu * std::cos(th), smu * std::sin(th), mu);
      bnd_pos_[a * NT + b] = centroid_ + R * w;
      bnd_normal_[a * NT + b] = w;
    }
  }
}

// ---------------------------------------------------------------------------

ChartPoint PatchMesh::chart(const Vec& p) const {
  ChartPoint cp;
  Vec rel = p - centroid_;
  if (patch_.n == 2) rel[2] = 0.0;
  cp.rho = rel.norm();
  if (cp.rho == 0.0) {
    cp.q = 0.0;
    cp.theta = 0.0;
    cp.mu = 1.0;
    cp.beta = beta(0.0);
    return cp;
  }
  cp.theta = std::atan2(rel[1], rel[0]);
  if (cp.theta < 0) cp.theta += kTwoPi;
  if (patch_.n == 3) cp.mu = rel[2] / cp.rho;
  cp.beta = beta(cp.theta);
  cp.q = cp.rho / cp.beta;
  return cp;
}

Stencil PatchMesh::stencil(const ChartPoint& cp, int force_part) const {
  Stencil st;
  const int NT = cfg_.ntheta;
  const double dth = kTwoPi / NT;
  st.exterior = force_part < 0 ? cp.q > 1.0 : force_part == 1;
  const PartGrid& g = st.exterior ? exterior_ : interior_;
  const int ncell = g.rows - 1;

  double tu;
  if (!st.exterior) {
    tu = u_of_q(std::min(cp.q, 1.0)) * ncell;
  } else {
    double s = std::max(cp.q, 1.0);
    if (s > cfg_.s_max) {
      // beyond the grid: clamp to the edge row, record the overshoot ratio
      st.tail_ratio = s / cfg_.s_max;
      s = cfg_.s_max;
    }
    tu = v_of_s(s) * ncell;
  }
  int i0 = static_cast<int>(std::floor(tu)) - 1;
  i0 = std::min(std::max(i0, 0), ncell - 3);
  lagrange4_uniform(tu - i0, st.wu);
  for (int m = 0; m < 4; ++m) st.iu[m] = i0 + m;

  double tt = cp.theta / dth;
  int t0 = static_cast<int>(std::floor(tt)) - 1;
  lagrange4_uniform(tt - t0, st.wt);
  for (int m = 0; m < 4; ++m) st.it[m] = ((t0 + m) % NT + NT) % NT;

  if (patch_.n == 3) {
    st.nv = 4;
    const int NP = cfg_.nphi;
    // window of 4 consecutive Gauss-mu nodes around cp.mu
    int lo = static_cast<int>(std::lower_bound(mu_nodes_.begin(), mu_nodes_.end(), cp.mu) -
                              mu_nodes_.begin());
    int v0 = std::min(std::max(lo - 2, 0), NP - 4);
    double xs[4];
    for (int m = 0; m < 4; ++m) {
      st.iv[m] = v0 + m;
      xs[m] = mu_nodes_[v0 + m];
    }
    lagrange4_general(xs, cp.mu, st.wv);
  } else {
    st.nv = 1;
    st.iv[0] = 0;
    st.wv[0] = 1.0;
  }
  return st;
}

double PatchMesh::eval(const Eigen::ArrayXd& interior_vals, const Eigen::ArrayXd& exterior_vals,
                       const Stencil& st, double decay) const {
  const PartGrid& g = st.exterior ? exterior_ : interior_;
  const Eigen::ArrayXd& F = st.exterior ? exterior_vals : interior_vals;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double accv = 0.0;
    for (int v = 0; v < st.nv; ++v) {
      double acct = 0.0;
      for (int t = 0; t < 4; ++t) acct += st.wt[t] * F[g.idx(st.iu[a], st.iv[v], st.it[t])];
      accv += st.wv[v] * acct;
    }
    acc += st.wu[a] * accv;
  }
  const double tail = st.tail_ratio == 1.0 ? 1.0 : std::pow(st.tail_ratio, -decay);
  return tail * acc;
}

}  // namespace patchflow
