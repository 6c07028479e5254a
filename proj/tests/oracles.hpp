#pragma once

// Test-only numerical oracles, independent of the library implementation
// paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracles {

inline double adaptive_simpson_(const std::function<double(double)>& f,
                                double a, double b, double fa, double fm,
                                double fb, double whole, double tol,
                                int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson_(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a,b]; tol is absolute, so integrands should be
// normalized to O(1) by the caller.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11, int max_depth = 30) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// log of int exp(logf(t)) dt over [lo,hi], peak-normalized so the adaptive
// rule works at a relative tolerance.
inline double log_integral_exp(const std::function<double(double)>& logf,
                               double lo, double hi, double tol = 1e-12) {
  double peak = -1e308;
  const int ngrid = 400;
  for (int i = 0; i <= ngrid; ++i) {
    peak = std::max(peak, logf(lo + (hi - lo) * i / ngrid));
  }
  auto g = [&](double t) { return std::exp(logf(t) - peak); };
  return peak + std::log(integrate(g, lo, hi, tol));
}

// log K_nu(x) by quadrature of (1/2) int_0^inf y^(nu-1) exp(-x(y+1/y)/2) dy
// with y = e^t.
inline double log_bessel_k_quad(double nu, double x) {
  auto logf = [nu, x](double t) { return nu * t - x * std::cosh(t); };
  double thi = 2.0;
  while (std::abs(nu) * thi - x * std::cosh(thi) >
         std::abs(nu) * 2.0 - x - 80.0) {
    thi += 1.0;
  }
  return -std::log(2.0) + log_integral_exp(logf, -thi, thi);
}

inline double bessel_k_quad(double nu, double x) {
  return std::exp(log_bessel_k_quad(nu, x));
}

// GIG(e,h,gamma): log int_0^inf w(y) * y^(gamma-1) exp(-(e y + h/y)/2) dy
// (unnormalized), with y = e^t and log-scale weight logw(t) given y = e^t.
inline double gig_log_weighted_integral(
    double e, double h, double gamma,
    const std::function<double(double)>& logw_of_t) {
  auto base = [=](double t) {
    const double y = std::exp(t);
    return gamma * t - 0.5 * (e * y + h / y);
  };
  auto logf = [=](double t) { return logw_of_t(t) + base(t); };
  const double ystar = (gamma + std::sqrt(gamma * gamma + e * h)) / e;
  const double peak0 = base(std::log(ystar));
  double tlo = std::log(ystar) - 1.0, thi = std::log(ystar) + 1.0;
  while (base(tlo) > peak0 - 120.0) tlo -= 1.0;
  while (base(thi) > peak0 - 120.0) thi += 1.0;
  return log_integral_exp(logf, tlo, thi);
}

}  // namespace oracles
