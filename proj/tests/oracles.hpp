#pragma once

// Test-only oracles, independent of the library's formula paths: metric
// integration along geodesics, a parallel-transport integrator, and a
// bisection fixed-point solver.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "horolab/moebius.hpp"

namespace horolab::oracle {

// Length of the straight Euclidean-parameterized path from z to w under the
// hyperbolic metric... not geodesic in general, so instead integrate along
// the circular geodesic arc connecting z and w.
inline double integrated_distance(std::complex<double> z, std::complex<double> w,
                                  int steps = 200000) {
  double dx = w.real() - z.real();
  double total = 0.0;
  if (std::abs(dx) < 1e-14) {
    // vertical: integrate |dy|/y exactly via quadrature anyway
    double y0 = z.imag(), y1 = w.imag();
    double h = (y1 - y0) / steps;
    for (int i = 0; i < steps; ++i) {
      double ya = y0 + h * i, yb = ya + h, ym = ya + h / 2;
      total += std::abs(h) / 6.0 * (1.0 / ya + 4.0 / ym + 1.0 / yb);
    }
    return std::abs(total);
  }
  double xc = (std::norm(w) - std::norm(z)) / (2.0 * dx);
  double r = std::abs(z - xc);
  double t0 = std::atan2(z.imag(), z.real() - xc);
  double t1 = std::atan2(w.imag(), w.real() - xc);
  double h = (t1 - t0) / steps;
  // |dz| = r dt, y = r sin t
  for (int i = 0; i < steps; ++i) {
    double ta = t0 + h * i, tb = ta + h, tm = ta + h / 2;
    total += std::abs(h) / 6.0 *
             (1.0 / std::sin(ta) + 4.0 / std::sin(tm) + 1.0 / std::sin(tb));
  }
  return std::abs(total);
}

// Parallel transport of a direction angle along the geodesic from z to w by
// integrating the transport equation d(theta)/dt = -x'(t)/y(t) with RK4.
inline double transported_direction(std::complex<double> z, std::complex<double> w,
                                    double theta, int steps = 20000) {
  double dx = w.real() - z.real();
  if (std::abs(dx) < 1e-14) return theta;  // vertical: no rotation
  double xc = (std::norm(w) - std::norm(z)) / (2.0 * dx);
  double t0 = std::atan2(z.imag(), z.real() - xc);
  double t1 = std::atan2(w.imag(), w.real() - xc);
  double h = (t1 - t0) / steps;
  double theta_cur = theta;
  auto f = [&](double t) {
    double y = std::sin(t);
    double dxdt = -std::sin(t);
    return -dxdt / y;
  };
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    double k1 = f(t), k2 = f(t + h / 2), k3 = f(t + h / 2), k4 = f(t + h);
    theta_cur += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return wrap_angle(theta_cur);
}

// Fixed points of a linear-fractional map by bisection on f(x) = m(x) - x.
inline std::vector<double> fixed_points_bisect(const MoebiusElement& m) {
  auto f = [&](double x) { return m.apply_boundary(x) - x; };
  std::vector<double> roots;
  double prev_x = -1e4, prev_v = f(prev_x);
  for (double x = -1e4 + 0.001; x <= 1e4; x += 0.001) {
    double v = f(x);
    if (std::isfinite(prev_v) && std::isfinite(v) && prev_v * v < 0 &&
        std::abs(prev_x - x) < 0.01) {
      double lo = prev_x, hi = x;
      for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0) hi = mid; else lo = mid;
      }
      double r = 0.5 * (lo + hi);
      if (std::abs(f(r)) < 1e-6) roots.push_back(r);  // not the pole
    }
    prev_x = x;
    prev_v = v;
  }
  return roots;
}

}  // namespace horolab::oracle
