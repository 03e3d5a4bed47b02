#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "subfinsler/kernel.hpp"
#include "subfinsler/minkowski.hpp"

namespace subfinsler {

struct StencilSpec {
  double h = 1e-3;   // spatial step (outer divergence and inner gradient)
  double ht = 1e-4;  // time step
  int order = 2;
  bool richardson = false;
};

struct DegenerateGradientError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ExcludedPointError : std::domain_error {
  using std::domain_error::domain_error;
};

using Field = std::function<double(const Vec&)>;

inline Vec gradient_fd(const Field& u, const Vec& x, double h, bool richardson = false) {
  const int n = (int)x.size();
  auto at_step = [&](double step) {
    Vec g(n);
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp(i) += step;
      xm(i) -= step;
      g(i) = (u(xp) - u(xm)) / (2.0 * step);
    }
    return g;
  };
  if (!richardson) return at_step(h);
  Vec g1 = at_step(h), g2 = at_step(0.5 * h);
  return Vec((4.0 * g2 - g1) / 3.0);
}

/// Finsler Laplacian Delta_M(u) = div(M(grad u) grad M(grad u)) by centered
/// differences of the flux, with grad u itself from a nested centered stencil
/// (or a caller-supplied analytic gradient).
inline double finsler_laplacian_fd(const MinkowskiNorm& norm, const Field& u,
                                   const Vec& x, const StencilSpec& st,
                                   const std::function<Vec(const Vec&)>* grad_u = nullptr) {
  const int n = norm.dim;
  auto flux = [&](const Vec& y, double h_in) {
    Vec g = grad_u ? (*grad_u)(y) : gradient_fd(u, y, h_in);
    if (g.norm() < 1e-8)
      throw DegenerateGradientError("finsler_laplacian_fd: gradient below 1e-8");
    return Vec(norm.value(g) * norm.gradient(g));
  };
  auto div_at = [&](double h) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      acc += (flux(xp, h)(i) - flux(xm, h)(i)) / (2.0 * h);
    }
    return acc;
  };
  if (!st.richardson) return div_at(st.h);
  return (4.0 * div_at(0.5 * st.h) - div_at(st.h)) / 3.0;
}

inline double time_derivative_fd(const std::function<double(double)>& f, double t,
                                 double ht, bool richardson = false) {
  auto at_step = [&](double s) { return (f(t + s) - f(t - s)) / (2.0 * s); };
  if (!richardson) return at_step(ht);
  return (4.0 * at_step(0.5 * ht) - at_step(ht)) / 3.0;
}

/// The Gauss-type kernel G(x,t) = t^{-n/2} e^{-M0(x)^2 / 4t} of the Finsler
/// heat flow, and the residual |dG/dt - Delta_M(G)|.
inline double finsler_gauss_kernel(const DualNormHandle& handle, const Vec& x, double t) {
  double m0 = x.norm() == 0.0 ? 0.0 : handle.dual_value(x);
  return std::pow(t, -0.5 * handle.primal.dim) * std::exp(-m0 * m0 / (4.0 * t));
}

inline double finsler_heat_residual(const DualNormHandle& handle, const Vec& x,
                                    double t, const StencilSpec& st) {
  if (x.norm() == 0.0)
    throw DegenerateGradientError("finsler_heat_residual: x = 0 excluded");
  if (t <= 0.0) throw std::invalid_argument("finsler_heat_residual: t > 0 required");
  Field G = [&](const Vec& y) { return finsler_gauss_kernel(handle, y, t); };
  double lap = finsler_laplacian_fd(handle.primal, G, x, st);
  double Gt = time_derivative_fd(
      [&](double s) { return finsler_gauss_kernel(handle, x, s); }, t, st.ht,
      st.richardson);
  return std::abs(Gt - lap);
}

/// |M(grad log G)^2 - d/dt log G - n/(2t)|.
inline double li_yau_residual(const DualNormHandle& handle, const Vec& x, double t,
                              const StencilSpec& st) {
  if (x.norm() == 0.0)
    throw DegenerateGradientError("li_yau_residual: x = 0 excluded");
  const int n = handle.primal.dim;
  Field logG = [&](const Vec& y) {
    double m0 = y.norm() == 0.0 ? 0.0 : handle.dual_value(y);
    return -0.5 * n * std::log(t) - m0 * m0 / (4.0 * t);
  };
  Vec g = gradient_fd(logG, x, st.h, st.richardson);
  double mg = handle.primal.value(g);
  double lt = time_derivative_fd(
      [&](double s) {
        double m0 = handle.dual_value(x);
        return -0.5 * n * std::log(s) - m0 * m0 / (4.0 * s);
      },
      t, st.ht, st.richardson);
  return std::abs(mg * mg - lt - n / (2.0 * t));
}

using SpaceTimeField = std::function<double(const Vec&, const Vec&, double)>;

/// Residual of df/dt = Delta_Phi(f) + (Phi0(z)^2/4) Delta_Psi(f) at (z, sigma, t).
/// Points too close to the degenerate manifold {z = 0} are rejected: the
/// classical residual is only meaningful away from it, and the stencil must
/// not cross it.
inline double mixed_operator_residual(const ProductSpaceConfig& cfg,
                                      const SpaceTimeField& f, const Vec& z,
                                      const Vec& sigma, double t,
                                      const StencilSpec& st,
                                      double exclusion_radius = 0.05) {
  double phi0 = cfg.phi.dual_value(z);
  if (phi0 < exclusion_radius)
    throw ExcludedPointError("mixed_operator_residual: Phi0(z) below exclusion radius");
  if (z.norm() <= 2.5 * st.h)
    throw ExcludedPointError("mixed_operator_residual: stencil would cross {z = 0}");
  Field fz = [&](const Vec& y) { return f(y, sigma, t); };
  Field fs = [&](const Vec& w) { return f(z, w, t); };
  double lap_phi, lap_psi;
  auto lap_pair = [&](double h) {
    StencilSpec s2 = st;
    s2.h = h;
    s2.richardson = false;
    return std::pair{finsler_laplacian_fd(cfg.phi.primal, fz, z, s2),
                     finsler_laplacian_fd(cfg.psi.primal, fs, sigma, s2)};
  };
  if (st.richardson) {
    auto [a1, b1] = lap_pair(st.h);
    auto [a2, b2] = lap_pair(0.5 * st.h);
    lap_phi = (4.0 * a2 - a1) / 3.0;
    lap_psi = (4.0 * b2 - b1) / 3.0;
  } else {
    std::tie(lap_phi, lap_psi) = lap_pair(st.h);
  }
  double ft = time_derivative_fd([&](double s) { return f(z, sigma, s); }, t, st.ht,
                                 st.richardson);
  return std::abs(ft - lap_phi - 0.25 * phi0 * phi0 * lap_psi);
}

// ---------------------------------------------------------------------------
// Energy and quadratic growth
// ---------------------------------------------------------------------------

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& wts) {
  const double pi = std::acos(-1.0);
  nodes.assign(n, 0.0);
  wts.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        double dp2 = n * (x * p1 - p0) / (x * x - 1.0);
        wts[i] = 2.0 / ((1.0 - x * x) * dp2 * dp2);
        break;
      }
    }
    nodes[i] = x;
  }
}

}  // namespace detail

/// Mixed-homogeneity energy
///   (1/p) int_box (Phi(grad_z f)^2 + (Phi0(z)^{2a}/4) Psi(grad_sigma f)^2)^{p/2}
/// by tensor Gauss-Legendre quadrature; gradients by centered differences.
inline double energy(const ProductSpaceConfig& cfg, const Field& f, const Vec& lo,
                     const Vec& hi, int grid_n, double grad_h = 1e-5) {
  if (grid_n < 8) throw std::invalid_argument("energy: grid_n >= 8 required");
  const int N = cfg.total_dim();
  if (lo.size() != N || hi.size() != N)
    throw std::invalid_argument("energy: box dimension mismatch");
  std::vector<double> gl_x, gl_w;
  detail::gauss_legendre(grid_n, gl_x, gl_w);
  std::vector<int> idx(N, 0);
  double total = 0.0;
  while (true) {
    Vec x(N);
    double w = 1.0;
    for (int d = 0; d < N; ++d) {
      double half = 0.5 * (hi(d) - lo(d));
      x(d) = 0.5 * (lo(d) + hi(d)) + half * gl_x[idx[d]];
      w *= half * gl_w[idx[d]];
    }
    Vec g = gradient_fd(f, x, grad_h);
    Vec gz = g.head(cfg.m), gs = g.tail(cfg.k);
    Vec z = x.head(cfg.m);
    double phi = gz.norm() == 0.0 ? 0.0 : cfg.phi.primal.value(gz);
    double psi = gs.norm() == 0.0 ? 0.0 : cfg.psi.primal.value(gs);
    double phi0 = z.norm() == 0.0 ? 0.0 : cfg.phi.dual_value(z);
    double dens = phi * phi +
                  0.25 * std::pow(phi0, 2.0 * cfg.alpha) * psi * psi;
    total += w * std::pow(dens, 0.5 * cfg.p);
    int d = 0;
    while (d < N && ++idx[d] == grid_n) idx[d++] = 0;
    if (d == N) break;
  }
  return total / cfg.p;
}

/// Rayleigh quotients of the quasilinear coefficient map on stacked gradients
/// v = (g_z, (Phi0(z)/2) g_sigma):
///   <A(v), v> = Phi(g_z)^2 + (Phi0^2/4) Psi(g_sigma)^2.
/// Also verifies that the componentwise assembly of A (via the norm gradients)
/// reproduces that quadratic form — the Euler-identity step.
struct GrowthReport {
  double gamma_min = std::numeric_limits<double>::infinity();
  double gamma_max = 0.0;
  double componentwise_residual = 0.0;
  int skipped = 0;
};

inline GrowthReport quadratic_growth_check(
    const ProductSpaceConfig& cfg, const Vec& z,
    const std::vector<std::pair<Vec, Vec>>& gradient_samples) {
  GrowthReport rep;
  double phi0 = z.norm() == 0.0 ? 0.0 : cfg.phi.dual_value(z);
  for (const auto& [gz, gs] : gradient_samples) {
    Vec v(cfg.m + cfg.k);
    v.head(cfg.m) = gz;
    v.tail(cfg.k) = 0.5 * phi0 * gs;
    if (v.norm() == 0.0) {
      ++rep.skipped;
      continue;
    }
    double phi = gz.norm() == 0.0 ? 0.0 : cfg.phi.primal.value(gz);
    double psi = gs.norm() == 0.0 ? 0.0 : cfg.psi.primal.value(gs);
    double qform = phi * phi + 0.25 * phi0 * phi0 * psi * psi;
    double quot = qform / v.squaredNorm();
    rep.gamma_min = std::min(rep.gamma_min, quot);
    rep.gamma_max = std::max(rep.gamma_max, quot);
    // componentwise A against the reduced quadratic form
    double ip = 0.0;
    if (gz.norm() > 0.0) ip += phi * cfg.phi.primal.gradient(gz).dot(gz);
    if (gs.norm() > 0.0)
      ip += 0.5 * phi0 * psi * cfg.psi.primal.gradient(gs).dot(0.5 * phi0 * gs);
    rep.componentwise_residual =
        std::max(rep.componentwise_residual, std::abs(ip - qform));
  }
  return rep;
}

/// Residual of the radial-profile PDE
///   F_t = F_rr + (m-1)/r F_r + (r^2/4)(F_ss + (k-1)/s F_s)
/// applied to kernel_profile by centered differences.
inline double profile_pde_residual(int m, int k, double r, double s, double t,
                                   const StencilSpec& st,
                                   double kernel_rel_tol = 1e-12) {
  if (r < 4.0 * st.h || s < 4.0 * st.h)
    throw ExcludedPointError("profile_pde_residual: point too close to an axis");
  QuadratureSpec spec{kernel_rel_tol, 1e-300};
  auto F = [&](double rr, double ss, double tt) {
    return kernel_profile(m, k, rr, ss, tt, spec).value;
  };
  auto resid_at = [&](double h) {
    double f0 = F(r, s, t);
    double frp = F(r + h, s, t), frm = F(r - h, s, t);
    double fsp = F(r, s + h, t), fsm = F(r, s - h, t);
    double Frr = (frp - 2.0 * f0 + frm) / (h * h);
    double Fr = (frp - frm) / (2.0 * h);
    double Fss = (fsp - 2.0 * f0 + fsm) / (h * h);
    double Fs = (fsp - fsm) / (2.0 * h);
    double Ft = (F(r, s, t + st.ht) - F(r, s, t - st.ht)) / (2.0 * st.ht);
    return Ft - (Frr + (m - 1.0) / r * Fr +
                 0.25 * r * r * (Fss + (k - 1.0) / s * Fs));
  };
  if (!st.richardson) return std::abs(resid_at(st.h));
  return std::abs((4.0 * resid_at(0.5 * st.h) - resid_at(st.h)) / 3.0);
}

}  // namespace subfinsler
