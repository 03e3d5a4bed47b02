// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "subfinsler/fundsol.hpp"
#include "subfinsler/kernel.hpp"
#include "subfinsler/minkowski.hpp"
#include "subfinsler/pdecheck.hpp"
#include "subfinsler/special.hpp"
#include "subfinsler/wulff.hpp"

using namespace subfinsler;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, const char* label, bool pass, double worst, double budget_s,
            double elapsed_s) {
  bool in_budget = elapsed_s <= budget_s;
  bool ok = pass && in_budget;
  if (!ok) ++failures;
  std::printf("criterion %2d [%s]: %s (worst residual %.3e, %.1f s / budget %.0f s)\n",
              id, label, ok ? "PASS" : "FAIL", worst, elapsed_s, budget_s);
  std::fflush(stdout);
}

Mat coupled_matrix() {
  Mat A(2, 2);
  A << 2.0, 0.3, 0.3, 1.0;
  return A;
}

// --------------------------------------------------------------------------
// 1. unit mass of the heat kernel
// --------------------------------------------------------------------------
void criterion_1() {
  const double tol = 1e-5;
  Timer tm;
  double worst = 0.0;
  for (auto [m, k] : {std::pair{1, 1}, {2, 1}, {2, 2}}) {
    auto cfg = make_product_space(make_euclidean_norm(m), make_euclidean_norm(k));
    for (double t : {0.1, 1.0, 10.0})
      worst = std::max(worst, std::abs(kernel_mass(cfg, t) - 1.0));
  }
  auto aniso = make_product_space(make_quadratic_norm(coupled_matrix()),
                                  make_quartic_norm(0.1, 1));
  worst = std::max(worst, std::abs(kernel_mass(aniso, 1.0) - 1.0));
  report(1, "kernel mass", worst <= tol, worst, 60.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 2. subordination: time integral of the kernel vs the stationary solution
// --------------------------------------------------------------------------
void criterion_2() {
  const double tol = 1e-4;
  Timer tm;
  double worst = 0.0;
  std::mt19937_64 rng(1002);
  std::normal_distribution<double> gauss;

  auto iso = make_product_space(make_euclidean_norm(1), make_euclidean_norm(1));
  auto aniso = make_product_space(make_quadratic_norm(coupled_matrix()),
                                  make_pnorm(3.0, 1));
  // mixed points
  for (int i = 0; i < 3; ++i) {
    Vec z1(1), s1(1);
    z1 << 0.4 + 0.5 * std::abs(gauss(rng));
    s1 << gauss(rng);
    worst = std::max(worst, subordination_residual(iso, z1, s1));
    Vec z2(2), s2(1);
    z2 << gauss(rng), gauss(rng);
    if (aniso.phi.dual_value(z2) < 0.05) z2 << 1.0, -0.3;
    s2 << gauss(rng);
    worst = std::max(worst, subordination_residual(aniso, z2, s2));
  }
  // z-axis points (sigma = 0) with the gauge bounded away from zero
  {
    Vec z1(1), s0(1);
    z1 << 0.9;
    s0 << 0.0;
    worst = std::max(worst, subordination_residual(iso, z1, s0));
    Vec z2(2);
    z2 << 0.8, 0.5;
    worst = std::max(worst, subordination_residual(aniso, z2, s0));
  }
  // sigma-axis points (z = 0)
  {
    Vec s1(1);
    s1 << 0.7;
    worst = std::max(worst, subordination_residual(iso, Vec::Zero(1), s1));
    worst = std::max(worst, subordination_residual(aniso, Vec::Zero(2), s1));
  }
  report(2, "subordination", worst <= tol, worst, 120.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 3. two closed routes to the quadratic-case constant
// --------------------------------------------------------------------------
void criterion_3() {
  const double tol = 1e-12;
  Timer tm;
  double worst = 0.0;
  for (int m : {1, 2, 3})
    for (int k : {1, 2, 3}) {
      auto cfg = make_product_space(make_euclidean_norm(m), make_euclidean_norm(k));
      double q = cfg.homogeneous_dim();
      double a = 1.0 / ((q - 2.0) * sigma_alpha_p_closed(cfg));
      double b = c12_gamma_route(cfg);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
  report(3, "constant identity", worst <= tol, worst, 1.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 4. Beta closed form of sigma_{alpha,p} vs its defining integral
// --------------------------------------------------------------------------
void criterion_4() {
  const double tol = 1e-5;
  Timer tm;
  double worst = 0.0;
  for (int m : {1, 2, 3})
    for (int k : {1, 2, 3})
      for (double alpha : {0.5, 1.0, 2.0})
        for (double p : {1.5, 2.0, 4.0}) {
          auto cfg =
              make_product_space(make_euclidean_norm(m), make_euclidean_norm(k), alpha, p);
          double closed = sigma_alpha_p_closed(cfg);
          double numeric = sigma_alpha_p_numeric(cfg, 1e-8);
          worst = std::max(worst, std::abs(closed - numeric) / std::abs(closed));
        }
  report(4, "sigma constant quadrature", worst <= tol, worst, 10.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 5. PDE residuals: mixed operator orders, heat flow, gradient estimate
// --------------------------------------------------------------------------
void criterion_5() {
  Timer tm;
  bool pass = true;
  double worst = 0.0;

  auto cfg = make_product_space(make_euclidean_norm(2), make_euclidean_norm(1));
  SpaceTimeField G = [&](const Vec& z, const Vec& sg, double t) {
    return heat_kernel(cfg, z, sg, t, {1e-12, 1e-300}).value;
  };
  SpaceTimeField E = [&](const Vec& z, const Vec& sg, double) {
    return fundamental_solution(cfg, z, sg);
  };
  std::vector<std::pair<Vec, Vec>> pts;
  {
    std::mt19937_64 rng(1005);
    std::normal_distribution<double> gauss;
    while (pts.size() < 5) {
      Vec z(2), sg(1);
      z << gauss(rng), gauss(rng);
      sg << gauss(rng);
      if (z.norm() < 0.6 || z.norm() > 1.8) continue;
      pts.push_back({z, sg});
    }
  }
  StencilSpec st;
  st.ht = 1e-5;
  for (const auto* field : {&G, &E}) {
    for (const auto& [z, sg] : pts) {
      std::vector<double> res;
      for (double h : {0.08, 0.04, 0.02}) {
        st.h = h;
        res.push_back(mixed_operator_residual(cfg, *field, z, sg, 1.0, st));
      }
      double o1 = std::log(res[0] / res[1]) / std::log(2.0);
      double o2 = std::log(res[1] / res[2]) / std::log(2.0);
      double order = std::min(o1, o2);
      if (order < 1.5) pass = false;
      worst = std::max(worst, 1.5 - order);
    }
  }
  // heat flow and sharp gradient estimate for the Gauss-type kernel
  StencilSpec fine;
  fine.h = 1e-4;
  fine.ht = 1e-4;
  fine.richardson = true;
  for (auto h : {dual_norm(make_euclidean_norm(2)),
                 dual_norm(make_quadratic_norm(coupled_matrix()))}) {
    Vec x(2);
    x << 0.9, 0.4;
    double hr = finsler_heat_residual(h, x, 0.7, fine);
    double ly = li_yau_residual(h, x, 0.7, fine);
    if (hr > 1e-5 || ly > 1e-5) pass = false;
    worst = std::max({worst, hr, ly});
  }
  report(5, "PDE residuals", pass, worst, 300.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 6. duality identities on all builtin norms
// --------------------------------------------------------------------------
void criterion_6() {
  Timer tm;
  bool pass = true;
  double worst = 0.0;
  DualSolverOptions opts;
  opts.tolerance = 1e-9;
  std::mt19937_64 rng(1006);
  std::normal_distribution<double> gauss;
  for (int dim : {2, 3}) {
    std::vector<MinkowskiNorm> norms{make_euclidean_norm(dim),
                                     make_pnorm(3.0, dim),
                                     make_quartic_norm(0.1, dim)};
    if (dim == 2) norms.push_back(make_quadratic_norm(coupled_matrix()));
    for (const auto& n : norms) {
      auto h = dual_norm(n, opts);
      std::vector<Vec> samples;
      while ((int)samples.size() < 100) {
        Vec x(dim);
        for (int i = 0; i < dim; ++i) x(i) = gauss(rng);
        if (x.norm() > 1e-2) samples.push_back(x);
      }
      auto rep = verify_duality_identities(n, h, samples);
      double allowed = h.mode == DualMode::closed_form ? 1e-8 : 10.0 * opts.tolerance;
      if (rep.max_residual() > allowed) pass = false;
      worst = std::max(worst, rep.max_residual() / allowed);
    }
  }
  report(6, "duality identities", pass, worst, 60.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 7. Wulff measures: surface quadrature vs n * volume, Minkowski cross-check
// --------------------------------------------------------------------------
void criterion_7() {
  const double tol = 1e-4;
  Timer tm;
  double worst = 0.0;
  for (int dim : {1, 2, 3}) {
    std::vector<MinkowskiNorm> norms{make_euclidean_norm(dim),
                                     make_pnorm(3.0, dim),
                                     make_quartic_norm(0.1, dim)};
    norms.push_back(dim == 2 ? make_quadratic_norm(coupled_matrix())
                             : make_quadratic_norm(
                                   Mat(1.5 * Mat::Identity(dim, dim))));
    for (const auto& n : norms) {
      auto h = dual_norm(n);
      auto [surf, serr] = wulff_sphere_measure_surface(h, 1e-8);
      auto [coarea, cerr] = wulff_sphere_measure(h, WulffMethod::coarea_quadrature, 1e-8);
      worst = std::max(worst, std::abs(surf - coarea) / std::abs(coarea));
      if (dim == 2) {
        double mink = 2.0 * minkowski_volume_2d(h, 1e-8);
        worst = std::max(worst, std::abs(mink - coarea) / std::abs(coarea));
      }
    }
  }
  report(7, "Wulff measures", worst <= tol, worst, 120.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 8. special-function property suites
// --------------------------------------------------------------------------
void criterion_8() {
  Timer tm;
  bool pass = true;
  double worst = 0.0;
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> par(0.1, 3.0), arg(-5.0, 0.9);
  auto track = [&](double measured, double allowed) {
    if (measured > allowed) pass = false;
    worst = std::max(worst, measured / allowed);
  };
  // Kummer transformation, quadrature-backed for x <= -1      (tol 1e-7)
  for (int trial = 0; trial < 100; ++trial) {
    double x = arg(rng);
    if (std::abs(x) < 1e-3) continue;
    double a = par(rng), b = par(rng), c = par(rng) + b;
    track(verify_kummer({a, b, c, x}), 1e-7);
  }
  // Laplace transform of Bessel functions vs direct quadrature (tol 1e-7)
  std::uniform_real_distribution<double> upar(0.5, 2.5);
  for (int trial = 0; trial < 100; ++trial) {
    double nu = 0.5 * (trial % 6);  // half-integer orders 0 .. 2.5
    double mu = upar(rng), alpha = upar(rng), beta = upar(rng);
    double closed = gegenbauer_laplace_bessel(mu, nu, alpha, beta).value;
    // t = u^2 keeps the integrand smooth at the origin for all mu >= 1/2
    auto f = [&](double u) {
      double t = u * u;
      return 2.0 * u * std::pow(t, mu - 1.0) * std::exp(-alpha * t) *
             bessel_j(nu, beta * t).value;
    };
    double quad = integrate_to_infinity(f, 0.0, {1e-10, 1e-16}).value;
    track(std::abs(closed - quad) / std::max(std::abs(closed), 1e-12), 1e-7);
  }
  // Bateman integral                                           (tol 1e-7)
  for (int trial = 0; trial < 100; ++trial) {
    double a = par(rng), b = par(rng), c = par(rng);
    double g = c + par(rng);
    double x = 0.3 * arg(rng);
    track(verify_bateman(a, b, c, g, x), 1e-7);
  }
  // Legendre duplication, pure Gamma                           (tol 1e-12)
  std::uniform_real_distribution<double> xpos(0.05, 20.0);
  for (int trial = 0; trial < 100; ++trial) track(verify_duplication(xpos(rng)), 1e-12);
  // binomial collapse F(a,b;b;-x) = (1+x)^{-a}, pure algebra   (tol 1e-12)
  for (int trial = 0; trial < 100; ++trial) {
    double a = par(rng), b = par(rng), x = -arg(rng);
    if (x <= 1e-3) continue;
    double lhs = hyp2f1({a, b, b, -x}).value;
    double rhs = std::pow(1.0 + x, -a);
    track(std::abs(lhs - rhs) / std::abs(rhs), 1e-12);
  }
  report(8, "special functions", pass, worst, 120.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 9. isotropic consistency: product kernel vs reference vs Fourier route
// --------------------------------------------------------------------------
void criterion_9() {
  Timer tm;
  bool pass = true;
  double worst = 0.0;
  auto cfg = make_product_space(make_euclidean_norm(2), make_euclidean_norm(1));
  std::mt19937_64 rng(1009);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    Vec z(2), sg(1);
    z << gauss(rng), gauss(rng);
    sg << gauss(rng);
    double t = 0.2 + std::abs(gauss(rng));
    double a = heat_kernel(cfg, z, sg, t, {1e-12, 1e-300}).value;
    double b = reference_kernel(2, 1, z, sg, t, {1e-12, 1e-300}).value;
    // absolute floor covers values at the quadrature noise level
    double ratio = std::abs(a - b) / (1e-8 * std::abs(b) + 1e-16);
    if (ratio > 1.0) pass = false;
    worst = std::max(worst, ratio);
  }
  struct Pt { double r, s, t; };
  for (auto [r, s, t] : {Pt{0.5, 0.2, 1.0}, {1.5, 3.0, 0.2}, {1.0, 0.7, 0.5},
                         {0.3, 1.1, 2.0}, {2.0, 0.0, 1.0}}) {
    double a = kernel_profile(1, 1, r, s, t, {1e-12, 1e-300}).value;
    double b = reference_kernel_fourier(1, r, s, t);
    double ratio = std::abs(a - b) / (1e-6 * std::abs(b) + 1e-15);
    if (ratio > 1.0) pass = false;
    worst = std::max(worst, ratio);
  }
  report(9, "isotropic consistency", pass, worst, 60.0, tm.seconds());
}

// --------------------------------------------------------------------------
// 10. homogeneity of the kernel under anisotropic dilations
// --------------------------------------------------------------------------
void criterion_10() {
  const double tol = 1e-7;
  Timer tm;
  double worst = 0.0;
  auto cfg = make_product_space(make_quadratic_norm(coupled_matrix()),
                                make_pnorm(3.0, 1));
  double Q = cfg.homogeneous_dim();
  std::mt19937_64 rng(1010);
  std::normal_distribution<double> gauss;
  QuadratureSpec spec{1e-12, 1e-300};
  for (int trial = 0; trial < 20; ++trial) {
    Vec z(2), sg(1);
    z << gauss(rng), gauss(rng);
    sg << gauss(rng);
    double t = 0.3 + 0.5 * std::abs(gauss(rng));
    double base = heat_kernel(cfg, z, sg, t, spec).value;
    for (double lam : {0.5, 1.7, 3.0}) {
      auto [zl, sl] = dilate(z, sg, lam);
      double scaled = heat_kernel(cfg, zl, sl, lam * lam * t, spec).value;
      double rel = std::abs(scaled - std::pow(lam, -Q) * base) /
                   std::max(std::pow(lam, -Q) * base, 1e-300);
      worst = std::max(worst, rel);
    }
  }
  report(10, "dilation homogeneity", worst <= tol, worst, 60.0, tm.seconds());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
