#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace subfinsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A Minkowski norm: 1-homogeneous, strictly convex, M^2 in C^2 away from 0.
struct MinkowskiNorm {
  int dim = 0;
  std::string label;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian_of_square;  // full Hessian of M^2; may be empty
  Mat quadratic_matrix;  // set for the quadratic kind, empty otherwise
};

enum class DualMode { closed_form, numeric };

struct DualSolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 400;
  int restarts = 4;
};

/// A norm paired with its Legendre dual M0(x) = sup_{M(xi)=1} <x, xi>.
struct DualNormHandle {
  MinkowskiNorm primal;
  std::function<double(const Vec&)> dual_value;
  std::function<Vec(const Vec&)> dual_gradient;
  DualMode mode = DualMode::closed_form;
  DualSolverOptions solver;
};

struct DualSolverFailure : std::runtime_error {
  Vec best_iterate;
  double residual;
  DualSolverFailure(const Vec& it, double res)
      : std::runtime_error("dual norm solver failed to converge (residual " +
                           std::to_string(res) + ")"),
        best_iterate(it),
        residual(res) {}
};

// ---------------------------------------------------------------------------
// Builtin norms
// ---------------------------------------------------------------------------

inline MinkowskiNorm make_euclidean_norm(int dim) {
  if (dim < 1) throw std::invalid_argument("norm dimension must be >= 1");
  MinkowskiNorm n;
  n.dim = dim;
  n.label = "euclidean";
  n.value = [](const Vec& x) { return x.norm(); };
  n.gradient = [](const Vec& x) { return Vec(x / x.norm()); };
  n.hessian_of_square = [dim](const Vec&) { return Mat(2.0 * Mat::Identity(dim, dim)); };
  return n;
}

inline MinkowskiNorm make_quadratic_norm(const Mat& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("quadratic norm: A must be square");
  if (!A.isApprox(A.transpose(), 1e-12))
    throw std::invalid_argument("quadratic norm: A must be symmetric");
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("quadratic norm: A must be positive definite");
  MinkowskiNorm n;
  n.dim = (int)A.rows();
  n.label = "quadratic";
  n.value = [A](const Vec& x) { return std::sqrt(x.dot(A * x)); };
  n.gradient = [A](const Vec& x) {
    double m = std::sqrt(x.dot(A * x));
    return Vec((A * x) / m);
  };
  n.hessian_of_square = [A](const Vec&) { return Mat(2.0 * A); };
  n.quadratic_matrix = A;
  return n;
}

inline MinkowskiNorm make_pnorm(double p, int dim) {
  if (p <= 1.0) throw std::invalid_argument("pnorm: require p > 1");
  if (dim < 1) throw std::invalid_argument("norm dimension must be >= 1");
  MinkowskiNorm n;
  n.dim = dim;
  n.label = "pnorm(" + std::to_string(p) + ")";
  n.value = [p](const Vec& x) {
    return std::pow(x.array().abs().pow(p).sum(), 1.0 / p);
  };
  n.gradient = [p](const Vec& x) {
    double m = std::pow(x.array().abs().pow(p).sum(), 1.0 / p);
    Vec g = (x.array().sign() * x.array().abs().pow(p - 1.0)).matrix();
    return Vec(g * std::pow(m, 1.0 - p));
  };
  n.hessian_of_square = [p, dim](const Vec& x) {
    // M^2 = S^{2/p}, S = sum |x_i|^p
    double S = x.array().abs().pow(p).sum();
    Vec u = (x.array().sign() * x.array().abs().pow(p - 1.0)).matrix();
    Mat H = 2.0 * (2.0 - p) * std::pow(S, 2.0 / p - 2.0) * (u * u.transpose());
    Vec d = 2.0 * (p - 1.0) * std::pow(S, 2.0 / p - 1.0) *
            x.array().abs().pow(p - 2.0).matrix();
    for (int i = 0; i < dim; ++i) H(i, i) += d(i);
    return H;
  };
  return n;
}

/// (|x|^4 + eps * sum x_i^4)^{1/4}: smooth, strictly convex, non-Riemannian,
/// with no closed-form dual. Accepted range eps in [0, 1]; strict convexity
/// spot-checked on sphere directions at construction.
inline MinkowskiNorm make_quartic_norm(double eps, int dim) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("quartic_perturbation: eps must lie in [0, 1]");
  if (dim < 1) throw std::invalid_argument("norm dimension must be >= 1");
  MinkowskiNorm n;
  n.dim = dim;
  n.label = "quartic_perturbation(" + std::to_string(eps) + ")";
  auto V = [eps](const Vec& x) {
    double s2 = x.squaredNorm();
    return s2 * s2 + eps * x.array().pow(4).sum();
  };
  n.value = [V](const Vec& x) { return std::pow(V(x), 0.25); };
  n.gradient = [V, eps](const Vec& x) {
    double s2 = x.squaredNorm();
    Vec w = s2 * x + eps * x.array().cube().matrix();  // (1/4) grad V
    return Vec(std::pow(V(x), -0.75) * w);
  };
  n.hessian_of_square = [V, eps, dim](const Vec& x) {
    double s2 = x.squaredNorm();
    double v = V(x);
    Vec w = s2 * x + eps * x.array().cube().matrix();
    Mat H = 2.0 / std::sqrt(v) * (s2 * Mat::Identity(dim, dim) + 2.0 * x * x.transpose());
    Vec d = 2.0 / std::sqrt(v) * 3.0 * eps * x.array().square().matrix();
    for (int i = 0; i < dim; ++i) H(i, i) += d(i);
    H -= 4.0 * std::pow(v, -1.5) * (w * w.transpose());
    return H;
  };
  // strict convexity probe on sphere directions
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < 64; ++s) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x(i) = gauss(rng);
    x.normalize();
    Eigen::SelfAdjointEigenSolver<Mat> es(n.hessian_of_square(x));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("quartic_perturbation: not strictly convex");
  }
  return n;
}

/// Tagged builtin-norm descriptor (matches the CLI config records).
struct NormSpec {
  std::string kind;  // euclidean | quadratic | pnorm | quartic_perturbation
  int dim = 0;
  Mat matrix;        // quadratic
  double p = 2.0;    // pnorm
  double eps = 0.0;  // quartic_perturbation
};

inline MinkowskiNorm make_builtin_norm(const NormSpec& spec) {
  if (spec.kind == "euclidean") return make_euclidean_norm(spec.dim);
  if (spec.kind == "quadratic") return make_quadratic_norm(spec.matrix);
  if (spec.kind == "pnorm") return make_pnorm(spec.p, spec.dim);
  if (spec.kind == "quartic_perturbation") return make_quartic_norm(spec.eps, spec.dim);
  throw std::invalid_argument("unknown norm kind: " + spec.kind);
}

// ---------------------------------------------------------------------------
// Dual norm
// ---------------------------------------------------------------------------

namespace detail {

/// Maximise <x, xi> over {M(xi) = 1}: projected gradient ascent with
/// backtracking, then Newton polish on the Lagrange system when a Hessian
/// is available. Returns the maximiser; the dual value is <x, xi*>.
inline Vec solve_dual_maximizer(const MinkowskiNorm& norm, const Vec& x,
                                const DualSolverOptions& opts) {
  const double xn = x.norm();
  if (xn == 0.0) throw std::invalid_argument("dual solver: x must be nonzero");
  // One Newton step on the Lagrange system [x - mu grad M(xi); M(xi) - 1] = 0;
  // returns true if the stationarity residual improved.
  auto newton_step = [&](Vec& xi, double& res) {
    Vec g = norm.gradient(xi);
    double mu = x.dot(xi);
    if (!norm.hessian_of_square || mu <= 0.0) return false;
    Mat Hsq = norm.hessian_of_square(xi);
    Mat HM = Hsq * 0.5 - g * g.transpose();  // Hessian of M on {M = 1}
    Mat J(norm.dim + 1, norm.dim + 1);
    J.setZero();
    J.topLeftCorner(norm.dim, norm.dim) = -mu * HM;
    J.topRightCorner(norm.dim, 1) = -g;
    J.bottomLeftCorner(1, norm.dim) = g.transpose();
    Vec F(norm.dim + 1);
    F.head(norm.dim) = x - mu * g;
    F(norm.dim) = norm.value(xi) - 1.0;
    Vec step = J.fullPivLu().solve(-F);
    Vec xi_new = xi + step.head(norm.dim);
    double m_new = norm.value(xi_new);
    if (!(m_new > 0.0) || !std::isfinite(m_new)) return false;
    xi_new /= m_new;
    double res_new = (x - x.dot(xi_new) * norm.gradient(xi_new)).norm();
    if (res_new >= res) return false;
    xi = xi_new;
    res = res_new;
    return true;
  };
  std::mt19937_64 rng(9001);
  std::normal_distribution<double> gauss;
  Vec best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    Vec xi;
    if (attempt == 0) {
      xi = x;
    } else {
      xi = Vec(norm.dim);
      for (int i = 0; i < norm.dim; ++i) xi(i) = gauss(rng);
      xi += x / xn;  // bias toward the relevant half-space
    }
    xi /= norm.value(xi);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations; ++it) {
      Vec g = norm.gradient(xi);
      double mu = x.dot(xi);  // multiplier estimate (Euler identity at M=1)
      Vec tang = x - (x.dot(g) / g.squaredNorm()) * g;
      res = (x - mu * g).norm();
      if (res <= opts.tolerance * xn) break;
      if (res < 0.3 * xn && newton_step(xi, res)) continue;
      // Backtracking ascent step along the tangential direction.
      double eta = 1.0 / std::max(1.0, xn);
      double f0 = x.dot(xi);
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        Vec cand = xi + eta * tang;
        cand /= norm.value(cand);
        if (x.dot(cand) > f0) {
          xi = cand;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;  // at numerical stationarity
    }
    if (res <= opts.tolerance * xn) {
      // a few extra Newton steps push the stationarity residual well below
      // the tolerance, so downstream identities see no amplified error
      for (int polish = 0; polish < 3; ++polish)
        if (!newton_step(xi, res)) break;
      return xi;
    }
    if (res < best_res) {
      best_res = res;
      best = xi;
    }
  }
  throw DualSolverFailure(best, best_res);
}

}  // namespace detail

/// Construct the dual handle. Closed forms for euclidean / quadratic / pnorm;
/// numeric constrained maximisation otherwise.
inline DualNormHandle dual_norm(const MinkowskiNorm& norm, const DualSolverOptions& opts = {});

inline DualNormHandle make_dual_handle_closed(const MinkowskiNorm& primal,
                                              std::function<double(const Vec&)> dv,
                                              std::function<Vec(const Vec&)> dg) {
  DualNormHandle h;
  h.primal = primal;
  h.dual_value = std::move(dv);
  h.dual_gradient = std::move(dg);
  h.mode = DualMode::closed_form;
  return h;
}

inline DualNormHandle dual_norm(const MinkowskiNorm& norm, const DualSolverOptions& opts) {
  if (norm.label == "euclidean") {
    return make_dual_handle_closed(
        norm, [](const Vec& x) { return x.norm(); },
        [](const Vec& x) { return Vec(x / x.norm()); });
  }
  if (norm.quadratic_matrix.size() > 0) {
    const Mat& A = norm.quadratic_matrix;
    Mat Ainv = A.llt().solve(Mat::Identity(A.rows(), A.cols()));
    return make_dual_handle_closed(
        norm, [Ainv](const Vec& x) { return std::sqrt(x.dot(Ainv * x)); },
        [Ainv](const Vec& x) {
          double m = std::sqrt(x.dot(Ainv * x));
          return Vec((Ainv * x) / m);
        });
  }
  DualNormHandle h;
  h.primal = norm;
  h.solver = opts;
  h.mode = DualMode::numeric;
  MinkowskiNorm n = norm;
  h.dual_value = [n, opts](const Vec& x) {
    if (x.norm() == 0.0) return 0.0;
    Vec xi = detail::solve_dual_maximizer(n, x, opts);
    return x.dot(xi);
  };
  // Envelope theorem: grad M0(x) = xi*(x).
  h.dual_gradient = [n, opts](const Vec& x) {
    return detail::solve_dual_maximizer(n, x, opts);
  };
  return h;
}

/// grad M0(x) from the handle; for numeric handles this is the maximiser
/// xi*(x) by the envelope theorem.
inline Vec dual_gradient(const DualNormHandle& handle, const Vec& x) {
  if (x.norm() == 0.0)
    throw std::invalid_argument("dual_gradient: norm not differentiable at origin");
  return handle.dual_gradient(x);
}

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

struct IdentityReport {
  double euler = 0.0;           // |<grad M(x), x> - M(x)|
  double finabla_primal = 0.0;  // |M(grad M0(x)) - 1|
  double finabla_dual = 0.0;    // |M0(grad M(x)) - 1|
  double bp_primal = 0.0;       // |M0(x) grad M(grad M0(x)) - x|
  double bp_dual = 0.0;         // |M(x) grad M0(grad M(x)) - x|
  double cauchy_schwarz = 0.0;  // positive part of |<x,y>| - M(x) M0(y)
  double max_residual() const {
    return std::max({euler, finabla_primal, finabla_dual, bp_primal, bp_dual,
                     cauchy_schwarz});
  }
};

inline IdentityReport verify_duality_identities(const MinkowskiNorm& norm,
                                                const DualNormHandle& handle,
                                                const std::vector<Vec>& sample_points) {
  IdentityReport rep;
  for (size_t i = 0; i < sample_points.size(); ++i) {
    const Vec& x = sample_points[i];
    double m = norm.value(x);
    Vec gm = norm.gradient(x);
    rep.euler = std::max(rep.euler, std::abs(gm.dot(x) - m));
    Vec gd = handle.dual_gradient(x);
    rep.finabla_primal = std::max(rep.finabla_primal, std::abs(norm.value(gd) - 1.0));
    rep.finabla_dual = std::max(rep.finabla_dual, std::abs(handle.dual_value(gm) - 1.0));
    double m0 = handle.dual_value(x);
    rep.bp_primal = std::max(rep.bp_primal, (m0 * norm.gradient(gd) - x).norm());
    rep.bp_dual = std::max(rep.bp_dual, (m * handle.dual_gradient(gm) - x).norm());
    const Vec& y = sample_points[(i + 1) % sample_points.size()];
    double slack = std::abs(x.dot(y)) - norm.value(x) * handle.dual_value(y);
    rep.cauchy_schwarz = std::max(rep.cauchy_schwarz, std::max(0.0, slack));
  }
  return rep;
}

/// Sampled equivalence constants alpha, beta with alpha |x| <= M(x) <= beta |x|.
inline std::pair<double, double> equivalence_constants(const MinkowskiNorm& norm,
                                                       int samples = 512,
                                                       unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x(norm.dim);
    for (int i = 0; i < norm.dim; ++i) x(i) = gauss(rng);
    x.normalize();
    double v = norm.value(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace subfinsler
