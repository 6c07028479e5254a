#pragma once

// Multivariate generalized hyperbolic distribution in the variance-mean
// mixture form X = mu + W alpha + sqrt(W) U, U ~ N(0, Sigma),
// W ~ I(omega, 1, gamma). Component state keeps the scale matrix and the
// concentration matrix C = Sigma^{-1} synchronized through one update
// path; the density is evaluated from C.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "ghdgls/gig.hpp"
#include "ghdgls/special.hpp"

namespace ghdgls::ghd {

class GhdComponent {
 public:
  // Construct from the concentration matrix; Sigma and log|Sigma| are
  // derived from its Cholesky factor (log|Sigma| = -log|C|).
  static GhdComponent from_concentration(Eigen::VectorXd mu,
                                         Eigen::VectorXd alpha,
                                         const Eigen::MatrixXd& concentration,
                                         double omega, double gamma) {
    GhdComponent c;
    c.mu_ = std::move(mu);
    c.alpha_ = std::move(alpha);
    c.set_concentration(concentration);
    c.omega_ = omega;
    c.gamma_ = gamma;
    c.validate();
    return c;
  }

  static GhdComponent from_sigma(Eigen::VectorXd mu, Eigen::VectorXd alpha,
                                 const Eigen::MatrixXd& sigma, double omega,
                                 double gamma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("GhdComponent: sigma is not SPD");
    }
    const Eigen::MatrixXd conc = llt.solve(
        Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
    return from_concentration(std::move(mu), std::move(alpha),
                              0.5 * (conc + conc.transpose()), omega, gamma);
  }

  Eigen::Index dim() const { return mu_.size(); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& concentration() const { return concentration_; }
  double omega() const { return omega_; }
  double gamma() const { return gamma_; }
  double log_det_sigma() const { return -log_det_conc_; }

  void set_concentration(const Eigen::MatrixXd& concentration) {
    Eigen::LLT<Eigen::MatrixXd> llt(concentration);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument(
          "GhdComponent: concentration matrix is not SPD");
    }
    concentration_ = concentration;
    sigma_ = llt.solve(
        Eigen::MatrixXd::Identity(concentration.rows(), concentration.cols()));
    sigma_ = 0.5 * (sigma_ + sigma_.transpose());
    log_det_conc_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array()
                              .log().sum();
  }

  void set_location(Eigen::VectorXd mu) { mu_ = std::move(mu); }
  void set_skewness(Eigen::VectorXd alpha) { alpha_ = std::move(alpha); }
  void set_index(double omega, double gamma) {
    omega_ = omega;
    gamma_ = gamma;
    validate();
  }

  void validate() const {
    if (mu_.size() != alpha_.size() ||
        mu_.size() != concentration_.rows()) {
      throw std::invalid_argument("GhdComponent: dimension mismatch");
    }
    if (!(omega_ > 0.0) || !std::isfinite(gamma_)) {
      throw std::invalid_argument(
          "GhdComponent: requires omega > 0 and finite gamma");
    }
  }

 private:
  Eigen::VectorXd mu_, alpha_;
  Eigen::MatrixXd sigma_, concentration_;
  double omega_ = 1.0, gamma_ = -0.5;
  double log_det_conc_ = 0.0;
};

/// delta(x, mu; Sigma) = (x - mu)' C (x - mu)
inline double mahalanobis(const Eigen::VectorXd& x, const GhdComponent& comp) {
  if (x.size() != comp.dim()) {
    throw std::invalid_argument("mahalanobis: dimension mismatch");
  }
  const Eigen::VectorXd d = x - comp.mu();
  return d.dot(comp.concentration() * d);
}

inline double ghd_log_density(const Eigen::VectorXd& x,
                              const GhdComponent& comp) {
  if (x.size() != comp.dim()) {
    throw std::invalid_argument("ghd_log_density: dimension mismatch");
  }
  const double p = static_cast<double>(comp.dim());
  const Eigen::VectorXd d = x - comp.mu();
  const Eigen::VectorXd calpha = comp.concentration() * comp.alpha();
  const double skew_term = d.dot(calpha);
  const double delta = d.dot(comp.concentration() * d);
  const double aca = comp.alpha().dot(calpha);
  const double nu = comp.gamma() - 0.5 * p;
  const double a = comp.omega() + aca;
  const double b = comp.omega() + delta;
  return skew_term + 0.5 * nu * (std::log(b) - std::log(a)) +
         special::log_bessel_k(nu, std::sqrt(a * b)) -
         0.5 * p * std::log(2.0 * M_PI) - 0.5 * comp.log_det_sigma() -
         special::log_bessel_k(comp.gamma(), comp.omega());
}

/// Posterior law of the latent W given x and component membership:
/// GIG(omega + alpha' C alpha, omega + delta(x, mu; Sigma), gamma - p/2).
inline gig::GigParams conditional_w_params(const Eigen::VectorXd& x,
                                           const GhdComponent& comp) {
  const Eigen::VectorXd calpha = comp.concentration() * comp.alpha();
  return {comp.omega() + comp.alpha().dot(calpha),
          comp.omega() + mahalanobis(x, comp),
          comp.gamma() - 0.5 * static_cast<double>(comp.dim())};
}

inline Eigen::MatrixXd ghd_sample(const GhdComponent& comp, std::size_t n,
                                  std::uint64_t seed) {
  comp.validate();
  const Eigen::Index p = comp.dim();
  // W ~ I(omega, 1, gamma), i.e. GIG(omega, omega, gamma)
  const gig::GigParams wpar =
      gig::from_concentration_form({comp.omega(), 1.0, comp.gamma()});
  gig::detail::RatioOfUniformsGig wsampler(wpar);
  Eigen::LLT<Eigen::MatrixXd> llt(comp.sigma());
  const Eigen::MatrixXd chol = llt.matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd out(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = wsampler.draw(rng);
    Eigen::VectorXd z(p);
    for (Eigen::Index j = 0; j < p; ++j) z(j) = gauss(rng);
    out.row(i) = (comp.mu() + w * comp.alpha() +
                  std::sqrt(w) * (chol * z)).transpose();
  }
  return out;
}

}  // namespace ghdgls::ghd
