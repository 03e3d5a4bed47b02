#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "subfinsler/kernel.hpp"
#include "subfinsler/minkowski.hpp"
#include "subfinsler/quadrature.hpp"
#include "subfinsler/special.hpp"
#include "subfinsler/wulff.hpp"

namespace subfinsler {

/// Mixed-homogeneity gauge
///   Theta(z, sigma) = (Phi(z)^{2(a+1)} + 4(a+1)^2 Psi(sigma)^2)^{1/(2(a+1))}
/// built from the primal norms; theta0_gauge is the same combination of the
/// dual norms, which equals the Legendre-type transform of Theta.
inline double theta_gauge(const ProductSpaceConfig& cfg, const Vec& z, const Vec& sigma) {
  double a = cfg.alpha;
  double f = z.norm() == 0.0 ? 0.0 : cfg.phi.primal.value(z);
  double g = sigma.norm() == 0.0 ? 0.0 : cfg.psi.primal.value(sigma);
  return std::pow(std::pow(f, 2.0 * (a + 1.0)) + 4.0 * (a + 1.0) * (a + 1.0) * g * g,
                  0.5 / (a + 1.0));
}

inline double theta0_gauge(const ProductSpaceConfig& cfg, const Vec& z, const Vec& sigma) {
  double a = cfg.alpha;
  double f = z.norm() == 0.0 ? 0.0 : cfg.phi.dual_value(z);
  double g = sigma.norm() == 0.0 ? 0.0 : cfg.psi.dual_value(sigma);
  return std::pow(std::pow(f, 2.0 * (a + 1.0)) + 4.0 * (a + 1.0) * (a + 1.0) * g * g,
                  0.5 / (a + 1.0));
}

/// Variational route:
///   Theta0(z,sigma)^{a+1} = sup_{Theta(xi,tau)=1} |<z,xi>|^{a+1} + 4(a+1)^2 <sigma,tau>.
/// Projected ascent on the constraint surface; renormalisation uses the
/// anisotropic dilation (xi, tau) -> (lam xi, lam^{a+1} tau) under which
/// Theta is 1-homogeneous.
inline double theta0_variational(const ProductSpaceConfig& cfg, const Vec& z,
                                 const Vec& sigma, double tol = 1e-11,
                                 int max_iterations = 2000) {
  const int m = cfg.m, k = cfg.k;
  const double a = cfg.alpha;
  const double c4 = 4.0 * (a + 1.0) * (a + 1.0);
  if (z.norm() == 0.0 && sigma.norm() == 0.0) return 0.0;

  auto theta = [&](const Vec& xi, const Vec& tau) {
    double f = xi.norm() == 0.0 ? 0.0 : cfg.phi.primal.value(xi);
    double g = tau.norm() == 0.0 ? 0.0 : cfg.psi.primal.value(tau);
    return std::pow(std::pow(f, 2.0 * (a + 1.0)) + c4 * g * g, 0.5 / (a + 1.0));
  };
  auto normalize = [&](Vec& xi, Vec& tau) {
    double lam = 1.0 / theta(xi, tau);
    xi *= lam;
    tau *= std::pow(lam, a + 1.0);
  };
  auto objective = [&](const Vec& xi, const Vec& tau) {
    return std::pow(std::abs(z.dot(xi)), a + 1.0) + c4 * sigma.dot(tau);
  };

  std::mt19937_64 rng(4242);
  std::normal_distribution<double> gauss;
  double best = -std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 6; ++attempt) {
    Vec xi(m), tau(k);
    if (attempt == 0 && z.norm() > 0.0) {
      xi = z;
    } else {
      for (int i = 0; i < m; ++i) xi(i) = gauss(rng);
      if (z.norm() > 0.0) xi += z / z.norm();
    }
    if (attempt == 0 && sigma.norm() > 0.0) {
      tau = sigma;
    } else {
      for (int i = 0; i < k; ++i) tau(i) = gauss(rng);
      if (sigma.norm() > 0.0) tau += sigma / sigma.norm();
    }
    if (xi.norm() == 0.0) xi.setConstant(1e-3);
    normalize(xi, tau);
    double f = objective(xi, tau);
    for (int it = 0; it < max_iterations; ++it) {
      // gradient of the objective
      double ip = z.dot(xi);
      Vec gz = Vec::Zero(m), gs = c4 * sigma;
      if (ip != 0.0)
        gz = (a + 1.0) * std::pow(std::abs(ip), a) * (ip > 0 ? 1.0 : -1.0) * z;
      // gradient of the constraint Theta
      double th = theta(xi, tau);
      double phi_xi = xi.norm() == 0.0 ? 0.0 : cfg.phi.primal.value(xi);
      double psi_tau = tau.norm() == 0.0 ? 0.0 : cfg.psi.primal.value(tau);
      Vec tz = Vec::Zero(m), ts = Vec::Zero(k);
      if (xi.norm() > 0.0)
        tz = std::pow(phi_xi / th, 2.0 * a + 1.0) * cfg.phi.primal.gradient(xi);
      if (tau.norm() > 0.0)
        ts = 4.0 * (a + 1.0) * psi_tau * cfg.psi.primal.gradient(tau) /
             std::pow(th, 2.0 * a + 1.0);
      double tn2 = tz.squaredNorm() + ts.squaredNorm();
      double lam = (gz.dot(tz) + gs.dot(ts)) / tn2;
      Vec dz = gz - lam * tz, ds = gs - lam * ts;
      double gnorm = std::sqrt(dz.squaredNorm() + ds.squaredNorm());
      if (gnorm <= tol * std::max(1.0, std::abs(f))) break;
      double eta = 0.5 / std::max(1.0, gnorm);
      bool moved = false;
      for (int bt = 0; bt < 50; ++bt) {
        Vec xin = xi + eta * dz, taun = tau + eta * ds;
        normalize(xin, taun);
        double fn = objective(xin, taun);
        if (fn > f) {
          xi = xin;
          tau = taun;
          f = fn;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    best = std::max(best, f);
  }
  return std::pow(best, 1.0 / (a + 1.0));
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// sigma_{alpha,p} = sigma_Phi sigma_Psi B((m + alpha p)/(2(alpha+1)), k/2)
///                    / (2^{k+1} (alpha+1)^k).
inline double sigma_alpha_p_closed(const ProductSpaceConfig& cfg) {
  double a = cfg.alpha;
  double x = (cfg.m + a * cfg.p) / (2.0 * (a + 1.0));
  return cfg.sigma_phi * cfg.sigma_psi * beta_fn(x, 0.5 * cfg.k).value /
         (std::pow(2.0, cfg.k + 1) * std::pow(a + 1.0, cfg.k));
}

/// Same quantity from its defining Wulff-ball integral,
///   sigma_{alpha,p} = sigma_Phi sigma_Psi Q int_{K*} r^{alpha p}
///       (r^{2(a+1)} + 4(a+1)^2 s^2)^{-alpha p/(2(a+1))} r^{m-1} s^{k-1} dr ds,
/// over K* = {r^{2(a+1)} + 4(a+1)^2 s^2 < 1}, by iterated quadrature.
inline double sigma_alpha_p_numeric(const ProductSpaceConfig& cfg,
                                    double rel_tol = 1e-9) {
  double a = cfg.alpha;
  double Q = cfg.homogeneous_dim();
  double ap = a * cfg.p;
  double ex = ap / (2.0 * (a + 1.0));
  QuadratureSpec spec{rel_tol, 1e-15};
  auto outer = [&](double r) {
    double r2a = std::pow(r, 2.0 * (a + 1.0));
    double smax = std::sqrt(std::max(0.0, 1.0 - r2a)) / (2.0 * (a + 1.0));
    auto inner = [&](double s) {
      double denom = r2a + 4.0 * (a + 1.0) * (a + 1.0) * s * s;
      return std::pow(denom, -ex) * std::pow(s, cfg.k - 1);
    };
    return integrate(inner, 0.0, smax, spec).value * std::pow(r, ap + cfg.m - 1);
  };
  double I = integrate(outer, 0.0, 1.0, spec).value;
  return cfg.sigma_phi * cfg.sigma_psi * Q * I;
}

struct FundamentalConstants {
  double sigma_ap = 0.0;
  double c_ap = 0.0;
  double q = 0.0;
  std::string branch;  // "power" (p != Q) or "log" (p == Q)
};

inline FundamentalConstants fundamental_constants(const ProductSpaceConfig& cfg) {
  FundamentalConstants fc;
  fc.q = cfg.homogeneous_dim();
  fc.sigma_ap = sigma_alpha_p_closed(cfg);
  if (std::abs(cfg.p - fc.q) < 1e-12) {
    fc.branch = "log";
    fc.c_ap = std::pow(fc.sigma_ap, -1.0 / (fc.q - 1.0));
  } else {
    fc.branch = "power";
    fc.c_ap = (cfg.p - 1.0) / (fc.q - cfg.p) * std::pow(fc.sigma_ap, -1.0 / (cfg.p - 1.0));
  }
  return fc;
}

/// Alternate Gamma-function representation of C_{1,2}; valid only for
/// alpha = 1, p = 2. Must coincide with 1 / ((Q-2) sigma_{1,2}).
inline double c12_gamma_route(const ProductSpaceConfig& cfg) {
  if (cfg.alpha != 1.0 || cfg.p != 2.0)
    throw std::invalid_argument("c12_gamma_route: requires alpha = 1, p = 2");
  const double pi = std::acos(-1.0);
  double m = cfg.m, k = cfg.k;
  double ratio = euclidean_sphere_measure(cfg.m) * euclidean_sphere_measure(cfg.k) /
                 (cfg.sigma_phi * cfg.sigma_psi);
  return ratio * std::pow(2.0, 0.5 * m + 2.0 * k - 4.0) * gamma_fn(0.25 * m).value *
         gamma_fn(0.5 * (0.5 * m + k - 1.0)).value / std::pow(pi, 0.5 * (m + k + 1.0));
}

/// Fundamental solution of the stationary problem:
///   C_{a,p} Theta0^{-(Q-p)/(p-1)}  (p != Q),  C_a log Theta0  (p == Q).
inline double fundamental_solution(const ProductSpaceConfig& cfg, const Vec& z,
                                   const Vec& sigma) {
  double th = theta0_gauge(cfg, z, sigma);
  if (th == 0.0) throw DomainError("fundamental_solution: pole at the origin");
  FundamentalConstants fc = fundamental_constants(cfg);
  if (fc.branch == "log") return fc.c_ap * std::log(th);
  return fc.c_ap * std::pow(th, -(fc.q - cfg.p) / (cfg.p - 1.0));
}

// ---------------------------------------------------------------------------
// Subordination
// ---------------------------------------------------------------------------

/// int_0^inf G(X, t) dt, computed in the variable t = 1/v^2 so that the
/// algebraic large-t tail becomes a smooth v^{m+2k-3} vanishing at v = 0.
inline double kernel_time_integral(const ProductSpaceConfig& cfg, const Vec& z,
                                   const Vec& sigma, double rel_tol = 1e-8) {
  if (cfg.alpha != 1.0)
    throw std::invalid_argument("kernel_time_integral: alpha = 1 only");
  double th = theta0_gauge(cfg, z, sigma);
  if (th == 0.0) throw DomainError("kernel_time_integral: pole at the origin");
  QuadratureSpec kspec{rel_tol * 0.1, 1e-300};
  QuadratureSpec vspec{rel_tol, 1e-14};
  // scale v by 1/theta0 so the integrand peaks at v = O(1)
  auto f = [&](double v) {
    if (v <= 0.0) return 0.0;
    double w = v / th;
    double t = 1.0 / (w * w);
    return heat_kernel(cfg, z, sigma, t, kspec).value * 2.0 / (w * w * w) / th;
  };
  QuadResult q = integrate_to_infinity(f, 0.0, vspec, 1.0);
  if (!q.converged)
    throw std::runtime_error("kernel_time_integral: quadrature did not converge");
  return q.value;
}

/// Residual of the subordination identity
///   int_0^inf G dt = C_{1,2} Theta0^{-(Q-2)}  (relative).
inline double subordination_residual(const ProductSpaceConfig& cfg, const Vec& z,
                                     const Vec& sigma, double rel_tol = 1e-8) {
  double lhs = kernel_time_integral(cfg, z, sigma, rel_tol);
  double th = theta0_gauge(cfg, z, sigma);
  double rhs = fundamental_constants(cfg).c_ap * std::pow(th, -(cfg.homogeneous_dim() - 2.0));
  return std::abs(lhs - rhs) / std::abs(rhs);
}

// ---------------------------------------------------------------------------
// Hypergeometric reduction pipeline (k >= 2, r0 > 0)
// ---------------------------------------------------------------------------

/// Three routes to I(r0, s0) =
///   int_0^inf t^{m/2+k-2} int_0^inf (u/sinh u)^{m/2} e^{-t (u coth u) r0^2/4}
///                                   G_{k/2-1}(u s0 t) u^{k-1} du dt:
///   raw double integral, single integral after the Laplace-Bessel reduction
///   and the Pfaff map, and the closed Gamma x power form. All three must
///   agree; they exercise disjoint parts of the special-function layer.
struct PipelineResult {
  double raw = 0.0;
  double intermediate = 0.0;
  double closed = 0.0;
};

inline PipelineResult hypergeometric_pipeline(int m, int k, double r0, double s0,
                                              double rel_tol = 1e-9) {
  if (k < 2) throw std::invalid_argument("hypergeometric_pipeline: requires k >= 2");
  if (r0 <= 0.0) throw std::invalid_argument("hypergeometric_pipeline: requires r0 > 0");
  const double pi = std::acos(-1.0);
  const double half_m = 0.5 * m;
  const double nu = 0.5 * k - 1.0;
  PipelineResult out;

  // raw: outer t, inner u (the u-integral is a rescaled kernel profile)
  {
    QuadratureSpec uspec{rel_tol * 0.1, 1e-300};
    QuadratureSpec tspec{rel_tol, 1e-14};
    auto inner = [&](double t) {
      auto g = [&](double u) {
        return detail::sinh_ratio_pow(u, half_m) *
               std::exp(-t * detail::u_coth_u(u) * r0 * r0 / 4.0) *
               g_nu(nu, u * s0 * t).value * std::pow(u, k - 1);
      };
      double b = half_m + t * r0 * r0 / 4.0;
      double U = detail::profile_truncation(half_m + k - 1.0, b);
      double omega = s0 * t;
      QuadResult qr;
      if (0.5 * pi * omega > 745.0) return 0.0;
      if (omega * U > 8.0) {
        std::vector<double> pts;
        for (double x = 0.0; x < U; x += pi / omega) pts.push_back(x);
        pts.push_back(U);
        qr = integrate_breakpoints(g, pts, uspec);
      } else {
        qr = integrate(g, 0.0, U, uspec);
      }
      return qr.value * std::pow(t, half_m + k - 2.0);
    };
    out.raw = integrate_to_infinity(inner, 0.0, tspec, 1.0 / (r0 * r0)).value;
  }

  // intermediate: single u-integral with the 2F1 factor at negative argument
  {
    QuadratureSpec uspec{rel_tol, 1e-16};
    double A = 0.5 * (half_m + k - 1.0);
    double B = 0.25 * m + 0.5 * k;
    double C = 0.5 * k;
    double pref = std::pow(4.0, half_m + k - 1.0) * std::pow(2.0, 1.0 - 0.5 * k) *
                  gamma_fn(half_m + k - 1.0).value / gamma_fn(0.5 * k).value /
                  std::pow(r0, 2.0 * (half_m + k - 1.0));
    auto g = [&](double u) {
      double th = std::tanh(u);
      double sh = std::sinh(u);
      double wu;
      if (u < 1e-6) {
        // (1/sinh^2)^{m/4} (tanh^2)^{(m/2+k-1)/2} ~ u^{k-1}
        wu = std::pow(u, k - 1.0);
      } else {
        wu = std::pow(sh, -half_m) * std::pow(th, half_m + k - 1.0);
      }
      double zarg = -16.0 * s0 * s0 * th * th / std::pow(r0, 4.0);
      return wu * hyp2f1({A, B, C, zarg}).value;
    };
    double U = detail::profile_truncation(half_m + k - 1.0, half_m);
    out.intermediate = pref * integrate(g, 0.0, U, uspec).value;
  }

  // closed: pi^{-1/2} 2^{3m/2 + 5k/2 - 4} Gamma(m/4) Gamma((m/2+k-1)/2) Theta0^{-(Q-2)}
  {
    double th0 = std::pow(std::pow(r0, 4.0) + 16.0 * s0 * s0, 0.25);
    double Q = m + 2.0 * k;
    out.closed = std::pow(pi, -0.5) * std::pow(2.0, 1.5 * m + 2.5 * k - 4.0) *
                 gamma_fn(0.25 * m).value * gamma_fn(0.5 * (half_m + k - 1.0)).value *
                 std::pow(th0, -(Q - 2.0));
  }
  return out;
}

}  // namespace subfinsler
