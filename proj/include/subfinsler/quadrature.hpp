#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace subfinsler {

/// Tolerance and subdivision policy for adaptive quadrature.
struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_panels = 100000;
  double truncation_safety = 2.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK dqk15).
inline constexpr double kGK15Nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kGK15WeightsG[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGK15Nodes[i]);
    fv[14 - i] = f(c + h * kGK15Nodes[i]);
  }
  fv[7] = f(c);
  double resk = kGK15WeightsK[7] * fv[7];
  double resg = kGK15WeightsG[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kGK15WeightsK[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * (fv[i] + fv[14 - i]);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * h;
  double diff = std::abs(resk - resg) * std::abs(h);
  // QUADPACK-style error sharpening.
  p.error = diff < 1.0 ? std::pow(200.0 * diff, 1.5) : diff;
  if (p.error > diff) p.error = diff;
  p.error = std::max(p.error, diff * 1e-3);
  return p;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<detail::Panel> heap;
  detail::Panel root = detail::gk15(f, a, b);
  double total = root.value, toterr = root.error;
  heap.push(root);
  int panels = 1;
  while (toterr > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) &&
         panels < spec.max_panels) {
    detail::Panel worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      heap.push(worst);  // interval exhausted at machine precision
      break;
    }
    detail::Panel l = detail::gk15(f, worst.a, mid);
    detail::Panel r = detail::gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    toterr += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++panels;
  }
  out.value = total;
  out.error = toterr;
  out.panels = panels;
  out.converged = toterr <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) * 1.001 ||
                  toterr <= spec.abs_tol;
  return out;
}

/// Integrate over a partition given by breakpoints, summing panels in order
/// and stopping once trailing panels fall below the truncation threshold.
template <class F>
QuadResult integrate_breakpoints(const F& f, const std::vector<double>& pts,
                                 const QuadratureSpec& spec = {},
                                 double panel_cutoff = 1e-14) {
  QuadResult out;
  double acc = 0.0, err = 0.0;
  int tiny_streak = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    QuadResult p = integrate(f, pts[i], pts[i + 1], spec);
    acc += p.value;
    err += p.error;
    out.panels += p.panels;
    if (std::abs(p.value) < panel_cutoff * std::max(std::abs(acc), spec.abs_tol)) {
      if (++tiny_streak >= 3) break;
    } else {
      tiny_streak = 0;
    }
    if (out.panels > spec.max_panels) {
      out.converged = false;
      break;
    }
  }
  out.value = acc;
  out.error = err;
  return out;
}

/// Integrate f over [a, inf) by geometrically growing blocks. Throws if the
/// block contributions fail to decay (divergence test).
template <class F>
QuadResult integrate_to_infinity(const F& f, double a, const QuadratureSpec& spec = {},
                                 double first_block = 1.0) {
  QuadResult out;
  double acc = 0.0, err = 0.0;
  double lo = a, len = first_block;
  double prev_block = std::numeric_limits<double>::infinity();
  int grow_streak = 0, tiny_streak = 0;
  for (int blk = 0; blk < 200; ++blk) {
    double hi = lo + len;
    if (!std::isfinite(hi)) {
      out.value = acc;
      out.error = err;
      out.converged = false;
      return out;
    }
    QuadResult p = integrate(f, lo, hi, spec);
    acc += p.value;
    err += p.error;
    out.panels += p.panels;
    double mag = std::abs(p.value);
    if (mag > std::abs(prev_block) * 1.5 && blk > 3) {
      if (++grow_streak >= 4)
        throw std::runtime_error("integrate_to_infinity: tail does not decay");
    } else {
      grow_streak = 0;
    }
    if (mag < std::max(spec.abs_tol, 0.5 * spec.rel_tol * std::abs(acc))) {
      if (++tiny_streak >= 2) {
        out.value = acc;
        out.error = err + mag;
        return out;
      }
    } else {
      tiny_streak = 0;
    }
    prev_block = mag;
    lo = hi;
    len *= 2.0;
  }
  out.value = acc;
  out.error = err;
  out.converged = false;
  return out;
}

}  // namespace subfinsler
