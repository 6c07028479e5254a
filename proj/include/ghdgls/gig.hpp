#pragma once

// Generalized inverse Gaussian distribution GIG(e, h, gamma):
//   f(y) = (e/h)^(gamma/2) y^(gamma-1) / (2 K_gamma(sqrt(eh)))
//          * exp{-(e y + h/y)/2},  y > 0.
// Density, the conditional-expectation formulas E[Y], E[1/Y], E[log Y],
// the (omega, eta, gamma) parameterization, and a mode-shifted
// ratio-of-uniforms sampler.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ghdgls/special.hpp"

namespace ghdgls::gig {

struct GigParams {
  double e;      // first rate parameter, > 0
  double h;      // second rate parameter, > 0
  double gamma;  // index

  void validate() const {
    if (!(e > 0.0) || !(h > 0.0) || !std::isfinite(gamma)) {
      throw std::domain_error("GigParams: requires e > 0, h > 0, finite gamma");
    }
  }
};

// Concentration/scale form: omega = sqrt(e h), eta = sqrt(e/h).
struct GigParamsI {
  double omega;
  double eta;
  double gamma;
};

inline GigParamsI to_concentration_form(const GigParams& p) {
  p.validate();
  return {std::sqrt(p.e * p.h), std::sqrt(p.e / p.h), p.gamma};
}

inline GigParams from_concentration_form(const GigParamsI& q) {
  if (!(q.omega > 0.0) || !(q.eta > 0.0)) {
    throw std::domain_error("GigParamsI: requires omega > 0, eta > 0");
  }
  return {q.omega * q.eta, q.omega / q.eta, q.gamma};
}

inline double gig_log_density(const GigParams& p, double y) {
  p.validate();
  if (!(y > 0.0)) {
    throw std::domain_error("gig_log_density: requires y > 0");
  }
  const double omega = std::sqrt(p.e * p.h);
  return 0.5 * p.gamma * (std::log(p.e) - std::log(p.h)) +
         (p.gamma - 1.0) * std::log(y) - std::log(2.0) -
         special::log_bessel_k(p.gamma, omega) - 0.5 * (p.e * y + p.h / y);
}

struct GigMoments {
  double mean;      // E[Y]
  double mean_inv;  // E[1/Y]
  double mean_log;  // E[log Y]
};

inline GigMoments gig_moments(const GigParams& p) {
  p.validate();
  const double omega = std::sqrt(p.e * p.h);
  const double ratio = special::bessel_ratio(p.gamma, omega);
  const double half_log_he = 0.5 * (std::log(p.h) - std::log(p.e));
  GigMoments m;
  m.mean = std::exp(half_log_he) * ratio;
  m.mean_inv = std::exp(-half_log_he) * ratio - 2.0 * p.gamma / p.h;
  m.mean_log =
      half_log_he + special::dlog_bessel_k_dorder(p.gamma, omega);
  return m;
}

namespace detail {

// Mode-shifted ratio of uniforms. The GIG density has exponential decay
// at both ends of the support for e, h > 0, so the (u, v) region is
// bounded and the unshifted pathologies of heavy tails do not arise.
class RatioOfUniformsGig {
 public:
  explicit RatioOfUniformsGig(const GigParams& p) : p_(p) {
    p.validate();
    const double gm1 = p.gamma - 1.0;
    mode_ = (gm1 + std::sqrt(gm1 * gm1 + p.e * p.h)) / p.e;
    log_f_mode_ = log_unnorm(mode_);
    vplus_ = find_extreme(true);
    vminus_ = find_extreme(false);
  }

  template <class Rng>
  double draw(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (;;) {
      const double u = unif(rng);
      const double v = vminus_ + (vplus_ - vminus_) * unif(rng);
      if (u <= 0.0) continue;
      const double y = mode_ + v / u;
      if (y <= 0.0) continue;
      if (2.0 * std::log(u) <= log_unnorm(y) - log_f_mode_) return y;
    }
  }

 private:
  double log_unnorm(double y) const {
    return (p_.gamma - 1.0) * std::log(y) - 0.5 * (p_.e * y + p_.h / y);
  }
  double dlog_unnorm(double y) const {
    return (p_.gamma - 1.0) / y - 0.5 * p_.e + 0.5 * p_.h / (y * y);
  }

  // Extreme of (y - mode) sqrt(f(y)/f(mode)) on one side of the mode;
  // stationarity condition is phi(y) = 1/(y - mode) + f'/(2f) = 0.
  // phi is positive at the outer end of the bracket near y = 0 or at
  // y = mode+ and negative at the other end, on both sides.
  double find_extreme(bool upper) const {
    auto phi = [&](double y) {
      return 1.0 / (y - mode_) + 0.5 * dlog_unnorm(y);
    };
    const double tiny = 1e-10 * std::max(mode_, 1.0);
    double lo, hi;  // phi(lo) > 0, phi(hi) < 0
    if (upper) {
      lo = mode_ + tiny;
      hi = mode_ + std::max(mode_, 1.0);
      while (phi(hi) > 0.0) hi = mode_ + 2.0 * (hi - mode_);
    } else {
      hi = mode_ - tiny;
      lo = 0.5 * mode_;
      while (phi(lo) < 0.0) lo *= 0.5;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (phi(mid) > 0.0) lo = mid;
      else hi = mid;
    }
    const double ystar = 0.5 * (lo + hi);
    return (ystar - mode_) *
           std::exp(0.5 * (log_unnorm(ystar) - log_f_mode_));
  }

  GigParams p_;
  double mode_, log_f_mode_, vminus_, vplus_;
};

}  // namespace detail

inline std::vector<double> gig_sample(const GigParams& p, std::size_t n,
                                      std::uint64_t seed) {
  std::vector<double> out;
  if (n == 0) return out;
  detail::RatioOfUniformsGig sampler(p);
  std::mt19937_64 rng(seed);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw(rng));
  return out;
}

}  // namespace ghdgls::gig
