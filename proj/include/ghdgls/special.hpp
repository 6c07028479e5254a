#pragma once

// Modified Bessel function of the third kind K_nu(x), evaluated in log
// space so that densities at large omega / small x stay representable.
// Temme's series for x <= 2, a Steed-type continued fraction for x > 2,
// then upward recurrence in the order carried in log space.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghdgls::special {

namespace detail {

inline double chebev(double x, const double* c, int m) {
  double d = 0.0, dd = 0.0;
  const double y2 = 2.0 * x;
  for (int j = m - 1; j >= 1; --j) {
    const double sv = d;
    d = y2 * d - dd + c[j];
    dd = sv;
  }
  return x * d - dd + 0.5 * c[0];
}

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) and
// gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2 via Chebyshev fits in
// 8 mu^2 - 1, valid for |mu| <= 1/2; avoids the cancellation a direct
// 1/tgamma difference suffers near mu = 0.
inline void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                         double& gammi) {
  static const double c1[] = {-1.142022680371168e0, 6.5165112670737e-3,
                              3.087090173086e-4,    -3.4706269649e-6,
                              6.9437664e-9,         3.67795e-11,
                              -1.356e-13};
  static const double c2[] = {1.843740587300905e0, -7.68528408447867e-2,
                              1.2719271366546e-3,  -4.9717367042e-6,
                              -3.31261198e-8,      2.423096e-10,
                              -1.702e-13,          -1.49e-15};
  const double xx = 8.0 * mu * mu - 1.0;
  gam1 = chebev(xx, c1, 7);
  gam2 = chebev(xx, c2, 8);
  gampl = gam2 - mu * gam1;
  gammi = gam2 + mu * gam1;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, returned as logs.
inline void log_k_pair_seed(double mu, double x, double& log_kmu,
                            double& log_kmu1) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 10000;
  const double mu2 = mu * mu;
  if (x <= 2.0) {
    // Temme series.
    const double xh = 0.5 * x;
    const double pimu = M_PI * mu;
    const double fact = (std::abs(pimu) < eps) ? 1.0 : pimu / std::sin(pimu);
    const double d = -std::log(xh);
    const double e = mu * d;
    const double fact2 = (std::abs(e) < eps) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    const double ee = std::exp(e);
    double p = 0.5 * ee / gampl;
    double q = 0.5 / (ee * gammi);
    double c = 1.0;
    const double d2 = xh * xh;
    double sum1 = p;
    for (int i = 1; i <= max_iter; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d2 / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    log_kmu = std::log(sum);
    log_kmu1 = std::log(sum1 * 2.0 / x);
  } else {
    // Continued fraction CF2 (Thompson & Barnett as in Steed's method).
    const double a1 = 0.25 - mu2;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= max_iter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < eps) break;
    }
    h = a1 * h;
    log_kmu = 0.5 * std::log(M_PI / (2.0 * x)) - x - std::log(s);
    log_kmu1 = log_kmu + std::log((mu + x + 0.5 - h) / x);
  }
}

// log K_nu(x) and log K_{nu+1}(x) for nu >= 0.
inline void log_k_pair(double nu, double x, double& log_knu,
                       double& log_knu1) {
  const int n = static_cast<int>(nu + 0.5);
  const double mu = nu - n;  // in [-1/2, 1/2]
  double lk, lk1;
  log_k_pair_seed(mu, x, lk, lk1);
  // K_{v+1} = (2v/x) K_v + K_{v-1}, carried as logs.
  for (int i = 1; i <= n; ++i) {
    const double v = mu + i;
    // log(t*K_v + K_{v-1}) = lk1 + log(t + exp(lk - lk1)), t = 2v/x
    const double lnew = lk1 + std::log(2.0 * v / x + std::exp(lk - lk1));
    lk = lk1;
    lk1 = lnew;
  }
  log_knu = lk;
  log_knu1 = lk1;
}

inline void check_args(double order, double x) {
  if (!std::isfinite(order) || !std::isfinite(x)) {
    throw std::domain_error("log_bessel_k: non-finite argument");
  }
  if (x <= 0.0) {
    throw std::domain_error("log_bessel_k: requires x > 0");
  }
}

}  // namespace detail

/// log K_order(x); symmetric in the order, K_{-nu} = K_nu.
inline double log_bessel_k(double order, double x) {
  detail::check_args(order, x);
  double lk, lk1;
  detail::log_k_pair(std::abs(order), x, lk, lk1);
  return lk;
}

/// K_{order+1}(x) / K_order(x), computed in log space.
inline double bessel_ratio(double order, double x) {
  detail::check_args(order, x);
  if (order >= 0.0) {
    double lk, lk1;
    detail::log_k_pair(order, x, lk, lk1);
    return std::exp(lk1 - lk);
  }
  // negative orders via K_{-nu} = K_nu
  return std::exp(log_bessel_k(order + 1.0, x) - log_bessel_k(order, x));
}

/// d/dnu log K_nu(x) by central finite difference,
/// step max(1e-5, 1e-5 |nu|).
inline double dlog_bessel_k_dorder(double order, double x) {
  detail::check_args(order, x);
  const double h = std::max(1e-5, 1e-5 * std::abs(order));
  return (log_bessel_k(order + h, x) - log_bessel_k(order - h, x)) /
         (2.0 * h);
}

}  // namespace ghdgls::special
