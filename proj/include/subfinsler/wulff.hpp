#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "subfinsler/minkowski.hpp"
#include "subfinsler/quadrature.hpp"
#include "subfinsler/special.hpp"

namespace subfinsler {

enum class WulffMethod { closed_form, coarea_quadrature, monte_carlo };

/// Volume omega_M of the Wulff ball {M0 < 1} and surface measure
/// sigma_M = int_{M0=1} dH^{n-1} / |grad M0|; they satisfy sigma_M = n omega_M.
struct WulffMeasures {
  int dim = 0;
  double omega = 0.0;
  double sigma = 0.0;
  WulffMethod method = WulffMethod::coarea_quadrature;
  double error_estimate = 0.0;
};

inline double euclidean_sphere_measure(int n) {
  // sigma_{n-1} = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::acos(-1.0), 0.5 * n) / std::tgamma(0.5 * n);
}

namespace detail {

inline Vec unit2(double t) {
  Vec v(2);
  v << std::cos(t), std::sin(t);
  return v;
}

inline Vec unit3(double phi, double t) {
  Vec v(3);
  v << std::sin(phi) * std::cos(t), std::sin(phi) * std::sin(t), std::cos(phi);
  return v;
}

}  // namespace detail

/// omega_M by the radial (coarea) formula omega = (1/n) int_{S^{n-1}} M0^{-n}.
inline std::pair<double, double> wulff_ball_volume_quadrature(
    const DualNormHandle& handle, double tol = 1e-10) {
  const int n = handle.primal.dim;
  const double pi = std::acos(-1.0);
  QuadratureSpec spec{tol, 1e-15, 4000};
  if (n == 1) {
    Vec e(1);
    e << 1.0;
    return {2.0 / handle.dual_value(e), 1e-15};
  }
  if (n == 2) {
    auto f = [&](double t) { return std::pow(handle.dual_value(detail::unit2(t)), -2.0); };
    QuadResult q = integrate(f, 0.0, 2.0 * pi, spec);
    return {0.5 * q.value, 0.5 * q.error};
  }
  if (n == 3) {
    double errsum = 0.0;
    auto outer = [&](double phi) {
      auto inner = [&](double t) {
        return std::pow(handle.dual_value(detail::unit3(phi, t)), -3.0);
      };
      QuadResult qi = integrate(inner, 0.0, 2.0 * pi, spec);
      errsum += qi.error;
      return qi.value * std::sin(phi);
    };
    QuadResult q = integrate(outer, 1e-9, pi - 1e-9, spec);
    return {q.value / 3.0, (q.error + errsum) / 3.0};
  }
  throw std::invalid_argument("wulff_ball_volume: quadrature limited to dim <= 3");
}

inline std::pair<double, double> wulff_ball_volume_monte_carlo(
    const DualNormHandle& handle, long samples, unsigned seed = 42) {
  if (samples < 1000)
    throw std::invalid_argument("wulff_ball_volume: need >= 1000 Monte-Carlo samples");
  const int n = handle.primal.dim;
  // Bounding box from the sampled equivalence constant of M0.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double alpha = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 256; ++s) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = gauss(rng);
    x.normalize();
    alpha = std::min(alpha, handle.dual_value(x));
  }
  double half = 1.1 / alpha;
  std::uniform_real_distribution<double> unif(-half, half);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = unif(rng);
    if (handle.dual_value(x) < 1.0) ++hits;
  }
  double box = std::pow(2.0 * half, n);
  double p = (double)hits / (double)samples;
  double omega = box * p;
  double sd = box * std::sqrt(p * (1.0 - p) / (double)samples);
  return {omega, sd};
}

inline std::pair<double, double> wulff_ball_volume(const DualNormHandle& handle,
                                                   WulffMethod method,
                                                   double samples_or_tol = 1e-10) {
  switch (method) {
    case WulffMethod::coarea_quadrature:
      return wulff_ball_volume_quadrature(handle, samples_or_tol);
    case WulffMethod::monte_carlo:
      return wulff_ball_volume_monte_carlo(handle, (long)samples_or_tol);
    case WulffMethod::closed_form: {
      const int n = handle.primal.dim;
      double vn = std::pow(std::acos(-1.0), 0.5 * n) / std::tgamma(0.5 * n + 1.0);
      if (handle.primal.label == "euclidean") return {vn, 0.0};
      if (handle.primal.quadratic_matrix.size() > 0)
        return {vn * std::sqrt(handle.primal.quadratic_matrix.determinant()), 1e-14};
      throw std::invalid_argument("wulff_ball_volume: no closed form for this norm");
    }
  }
  throw std::logic_error("unreachable");
}

/// sigma_M by direct surface quadrature of the level set {M0 = 1},
/// parametrised radially as x = theta / M0(theta) over the Euclidean sphere.
inline std::pair<double, double> wulff_sphere_measure_surface(
    const DualNormHandle& handle, double tol = 1e-10) {
  const int n = handle.primal.dim;
  const double pi = std::acos(-1.0);
  QuadratureSpec spec{tol, 1e-15, 4000};
  if (n == 1) {
    Vec e(1);
    e << 1.0;
    double m0 = handle.dual_value(e);
    if (m0 <= 0.0) throw std::invalid_argument("invalid norm: M0 vanishes");
    return {2.0 / m0, 1e-15};
  }
  if (n == 2) {
    auto f = [&](double t) {
      Vec th = detail::unit2(t);
      double m0 = handle.dual_value(th);
      if (m0 <= 0.0) throw std::invalid_argument("invalid norm: M0 vanishes");
      Vec g = handle.dual_gradient(th);  // 0-homogeneous, same as at x
      double rho = 1.0 / m0;
      Vec thp(2);
      thp << -th(1), th(0);
      double rhop = -g.dot(thp) / (m0 * m0);
      double speed = std::sqrt(rhop * rhop + rho * rho);
      return speed / g.norm();
    };
    QuadResult q = integrate(f, 0.0, 2.0 * pi, spec);
    return {q.value, q.error};
  }
  if (n == 3) {
    double errsum = 0.0;
    auto outer = [&](double phi) {
      auto inner = [&](double t) {
        Vec th = detail::unit3(phi, t);
        double m0 = handle.dual_value(th);
        if (m0 <= 0.0) throw std::invalid_argument("invalid norm: M0 vanishes");
        Vec g = handle.dual_gradient(th);
        double rho = 1.0 / m0;
        Vec th_phi(3), th_t(3);
        th_phi << std::cos(phi) * std::cos(t), std::cos(phi) * std::sin(t), -std::sin(phi);
        th_t << -std::sin(phi) * std::sin(t), std::sin(phi) * std::cos(t), 0.0;
        double rho_phi = -g.dot(th_phi) / (m0 * m0);
        double rho_t = -g.dot(th_t) / (m0 * m0);
        Eigen::Vector3d x_phi = rho_phi * th + rho * th_phi;
        Eigen::Vector3d x_t = rho_t * th + rho * th_t;
        double area = x_phi.cross(x_t).norm();
        return area / g.norm();
      };
      QuadResult qi = integrate(inner, 0.0, 2.0 * pi, spec);
      errsum += qi.error;
      return qi.value;
    };
    QuadResult q = integrate(outer, 1e-9, pi - 1e-9, spec);
    return {q.value, q.error + errsum};
  }
  throw std::invalid_argument("wulff_sphere_measure: surface route limited to dim <= 3");
}

/// sigma_M, either via the n * omega_M identity (default) or by direct
/// surface quadrature; the two must agree within combined error estimates.
inline std::pair<double, double> wulff_sphere_measure(const DualNormHandle& handle,
                                                      WulffMethod method,
                                                      double samples_or_tol = 1e-10) {
  auto [omega, err] = wulff_ball_volume(handle, method, samples_or_tol);
  return {handle.primal.dim * omega, handle.primal.dim * err};
}

inline WulffMeasures wulff_measures(const DualNormHandle& handle,
                                    WulffMethod method = WulffMethod::coarea_quadrature,
                                    double samples_or_tol = 1e-10) {
  WulffMeasures m;
  m.dim = handle.primal.dim;
  m.method = method;
  auto [omega, err] = wulff_ball_volume(handle, method, samples_or_tol);
  m.omega = omega;
  m.sigma = m.dim * omega;
  m.error_estimate = err * m.dim;
  return m;
}

/// Minkowski volume formula omega = (1/n) int_{M0=1} <x, nu> dH, dim 2 only;
/// third independent cross-check of sigma_M = n omega_M.
inline double minkowski_volume_2d(const DualNormHandle& handle, double tol = 1e-10) {
  if (handle.primal.dim != 2)
    throw std::invalid_argument("minkowski_volume_2d: dim 2 only");
  const double pi = std::acos(-1.0);
  auto f = [&](double t) {
    Vec th = detail::unit2(t);
    double m0 = handle.dual_value(th);
    Vec g = handle.dual_gradient(th);
    double rho = 1.0 / m0;
    Vec x = rho * th;
    Vec thp(2);
    thp << -th(1), th(0);
    double rhop = -g.dot(thp) / (m0 * m0);
    double speed = std::sqrt(rhop * rhop + rho * rho);
    return x.dot(g) / g.norm() * speed;
  };
  return 0.5 * integrate(f, 0.0, 2.0 * pi, QuadratureSpec{tol, 1e-15, 4000}).value;
}

/// int_{R^n} f*(M0(x)) dx = sigma_M int_0^inf f*(r) r^{n-1} dr.
template <class F>
double radial_pushforward_integral(const DualNormHandle& handle, const F& f_star,
                                   const QuadratureSpec& spec = {1e-10, 1e-14}) {
  double sigma = wulff_measures(handle).sigma;
  const int n = handle.primal.dim;
  auto g = [&](double r) { return f_star(r) * std::pow(r, n - 1); };
  QuadResult q = integrate_to_infinity(g, 0.0, spec);
  if (!q.converged)
    throw std::runtime_error("radial_pushforward_integral: radial integral did not converge");
  return sigma * q.value;
}

/// int_{R^N} f*(Phi0(z), Psi0(sigma)) dz dsigma
///   = sigma_Phi sigma_Psi iint f*(r,s) r^{m-1} s^{k-1} dr ds.
template <class F>
double double_radial_integral(const DualNormHandle& handle_phi,
                              const DualNormHandle& handle_psi, const F& f_star,
                              const QuadratureSpec& spec = {1e-9, 1e-14}) {
  const int m = handle_phi.primal.dim;
  const int k = handle_psi.primal.dim;
  double sphi = wulff_measures(handle_phi).sigma;
  double spsi = wulff_measures(handle_psi).sigma;
  auto outer = [&](double r) {
    auto inner = [&](double s) { return f_star(r, s) * std::pow(s, k - 1); };
    return integrate_to_infinity(inner, 0.0, spec).value * std::pow(r, m - 1);
  };
  QuadResult q = integrate_to_infinity(outer, 0.0, spec);
  return sphi * spsi * q.value;
}

}  // namespace subfinsler
