#pragma once

// Penalized EM for mixtures of generalized hyperbolic distributions with
// a gamma-Lasso penalty on the component concentration matrices. The
// E-step computes posterior memberships and conditional GIG moments of
// the latent mixing variable; the M-step combines closed-form updates
// for the proportions, locations, and skewness with safeguarded
// fixed-point / Newton updates for the index parameters and a graphical
// lasso solve for each concentration matrix.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghdgls/ghd.hpp"
#include "ghdgls/gig.hpp"
#include "ghdgls/glasso.hpp"
#include "ghdgls/special.hpp"

namespace ghdgls::em {

struct PenaltyHyper {
  double s = 1.0;  // gamma shape
  double r = 1.0;  // gamma rate

  void validate() const {
    if (!(s > 0.0) || !(r > 0.0)) {
      throw std::invalid_argument("PenaltyHyper: requires s > 0 and r > 0");
    }
  }
};

struct MixtureModel {
  std::vector<ghd::GhdComponent> components;
  Eigen::VectorXd proportions;  // pi_g, positive, sums to one
  Eigen::VectorXd lambda;       // penalty rates lambda_g, positive

  int groups() const { return int(components.size()); }
  Eigen::Index dim() const {
    return components.empty() ? 0 : components.front().dim();
  }

  void validate() const {
    if (components.empty() || proportions.size() != groups() ||
        lambda.size() != groups()) {
      throw std::invalid_argument("MixtureModel: inconsistent sizes");
    }
    if (proportions.minCoeff() <= 0.0 ||
        std::abs(proportions.sum() - 1.0) > 1e-12) {
      throw std::invalid_argument(
          "MixtureModel: proportions must be positive and sum to one");
    }
    if (lambda.minCoeff() <= 0.0) {
      throw std::invalid_argument("MixtureModel: lambda must be positive");
    }
    for (const auto& c : components) c.validate();
  }
};

struct EStepCache {
  Eigen::MatrixXd z;  // n x G posterior memberships
  Eigen::MatrixXd a;  // E[W | x, z=1]
  Eigen::MatrixXd b;  // E[1/W | x, z=1]
  Eigen::MatrixXd c;  // E[log W | x, z=1]
  Eigen::VectorXd n_g;
  Eigen::VectorXd abar, bbar, cbar;
};

enum class AitkenForm {
  standard,       // compare l_inf^{(t+1)} against l^{(t+1)}
  paper_literal,  // compare l_inf^{(t+1)} against l^{(t)} as printed
};

struct FitConfig {
  PenaltyHyper hyper;
  double eps = 1e-5;  // Aitken threshold
  int max_iter = 1000;
  double glasso_tol = 1e-6;
  int glasso_max_sweeps = 500;
  AitkenForm aitken = AitkenForm::standard;
  std::uint64_t seed = 0;
  int retry_budget = 5;
  // Bounds on the index parameters. The penalty favors shrinking every
  // concentration entry, and the model can absorb that by inflating the
  // scale matrices while the latent W drifts small (gamma -> -inf,
  // omega -> 0); boxing (gamma, omega) removes that escape direction.
  double gamma_min = -2.0;
  double gamma_max = 6.0;
  double omega_min = 0.5;
  double omega_max = 100.0;
  // Scale-matrix eigenvalue floor, relative to the average data variance.
  // A near-empty component can drive its scale matrix toward singularity
  // (the adaptive rate lambda_g vanishes as ||C_g||_1 grows, so the
  // penalty cannot stop it); concentration updates whose spectrum would
  // cross 1/floor are rejected, as in constrained EM.
  double sigma_floor_rel = 1e-4;
};

struct FitReport {
  MixtureModel model;
  std::vector<double> loglik_trace;  // penalized observed log-likelihood
  bool converged = false;
  int iterations = 0;
  std::vector<int> assignments;
  EStepCache cache;
  int restarts_used = 0;
};

class DegenerateComponent : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Eigen::MatrixXd log_component_matrix(const Eigen::MatrixXd& data,
                                            const MixtureModel& model) {
  const Eigen::Index n = data.rows();
  const int g_count = model.groups();
  Eigen::MatrixXd lp(n, g_count);
  for (int g = 0; g < g_count; ++g) {
    const double lpi = std::log(model.proportions(g));
    for (Eigen::Index i = 0; i < n; ++i) {
      lp(i, g) =
          lpi + ghd::ghd_log_density(data.row(i).transpose(),
                                     model.components[g]);
    }
  }
  return lp;
}

inline double log_sum_exp_row(const Eigen::RowVectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// log of the marginal gamma-Lasso prior f(c_g) for one component.
inline double log_penalty(const Eigen::MatrixXd& conc,
                          const PenaltyHyper& hyper) {
  const double p = double(conc.rows());
  const double l1 = conc.cwiseAbs().sum();  // all p^2 entries
  return hyper.s * std::log(hyper.r) - std::lgamma(hyper.s) -
         p * std::log(2.0) + std::lgamma(hyper.s + p * p) -
         (hyper.s + p * p) * std::log(hyper.r + l1);
}

}  // namespace detail

inline double penalized_loglik(const Eigen::MatrixXd& data,
                               const MixtureModel& model,
                               const PenaltyHyper& hyper) {
  model.validate();
  if (data.rows() < 1 || data.cols() != model.dim()) {
    throw std::invalid_argument("penalized_loglik: bad data shape");
  }
  const Eigen::MatrixXd lp = detail::log_component_matrix(data, model);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    total += detail::log_sum_exp_row(lp.row(i));
  }
  for (const auto& comp : model.components) {
    total += detail::log_penalty(comp.concentration(), hyper);
  }
  return total;
}

/// Unpenalized observed mixture log-likelihood (the data term only).
inline double observed_loglik(const Eigen::MatrixXd& data,
                              const MixtureModel& model) {
  const Eigen::MatrixXd lp = detail::log_component_matrix(data, model);
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    total += detail::log_sum_exp_row(lp.row(i));
  }
  return total;
}

inline EStepCache e_step(const Eigen::MatrixXd& data,
                         const MixtureModel& model) {
  model.validate();
  const Eigen::Index n = data.rows();
  const int g_count = model.groups();
  const double p = double(model.dim());

  EStepCache cache;
  cache.z.resize(n, g_count);
  cache.a.resize(n, g_count);
  cache.b.resize(n, g_count);
  cache.c.resize(n, g_count);

  const Eigen::MatrixXd lp = detail::log_component_matrix(data, model);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = detail::log_sum_exp_row(lp.row(i));
    if (!std::isfinite(norm)) {
      throw std::runtime_error(
          "e_step: responsibilities underflow for observation " +
          std::to_string(i));
    }
    cache.z.row(i) = (lp.row(i).array() - norm).exp();
  }

  for (int g = 0; g < g_count; ++g) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const gig::GigParams post =
          ghd::conditional_w_params(data.row(i).transpose(),
                                    model.components[g]);
      const gig::GigMoments m = gig::gig_moments(post);
      cache.a(i, g) = m.mean;
      cache.b(i, g) = m.mean_inv;
      cache.c(i, g) = m.mean_log;
    }
  }

  cache.n_g = cache.z.colwise().sum().transpose();
  const double n_floor = std::max(1e-8, p * 1e-3);
  if (cache.n_g.minCoeff() < n_floor) {
    throw DegenerateComponent("e_step: component weight below threshold");
  }
  cache.abar = (cache.z.cwiseProduct(cache.a).colwise().sum().transpose()
                    .array() / cache.n_g.array()).matrix();
  cache.bbar = (cache.z.cwiseProduct(cache.b).colwise().sum().transpose()
                    .array() / cache.n_g.array()).matrix();
  cache.cbar = (cache.z.cwiseProduct(cache.c).colwise().sum().transpose()
                    .array() / cache.n_g.array()).matrix();
  return cache;
}

/// lambda_g = (s + p^2) / (||C_g||_1 + r), the posterior mean of the
/// gamma-Lasso rate given the current concentration matrix.
inline Eigen::VectorXd update_lambda(const MixtureModel& model,
                                     const PenaltyHyper& hyper) {
  hyper.validate();
  const double p = double(model.dim());
  Eigen::VectorXd out(model.groups());
  for (int g = 0; g < model.groups(); ++g) {
    const double l1 = model.components[g].concentration().cwiseAbs().sum();
    out(g) = (hyper.s + p * p) / (l1 + hyper.r);
  }
  return out;
}

struct MomentUpdates {
  Eigen::VectorXd pi;
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::VectorXd> alpha;
};

inline MomentUpdates m_step_moments(const Eigen::MatrixXd& data,
                                    const EStepCache& cache) {
  const Eigen::Index n = data.rows();
  const int g_count = int(cache.z.cols());
  MomentUpdates upd;
  upd.pi = cache.n_g / double(n);
  upd.mu.resize(g_count);
  upd.alpha.resize(g_count);
  for (int g = 0; g < g_count; ++g) {
    const double abar = cache.abar(g);
    const double bbar = cache.bbar(g);
    Eigen::VectorXd num_mu = Eigen::VectorXd::Zero(data.cols());
    Eigen::VectorXd num_alpha = Eigen::VectorXd::Zero(data.cols());
    double denom = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double zi = cache.z(i, g);
      const double w_mu = abar * cache.b(i, g) - 1.0;
      num_mu += zi * w_mu * data.row(i).transpose();
      num_alpha += zi * (bbar - cache.b(i, g)) * data.row(i).transpose();
      denom += zi * w_mu;
    }
    if (std::abs(denom) < 1e-10 * cache.n_g(g)) {
      throw DegenerateComponent(
          "m_step_moments: degenerate weights, skewness unidentifiable");
    }
    upd.mu[g] = num_mu / denom;
    upd.alpha[g] = num_alpha / denom;
  }
  return upd;
}

namespace detail {

// Expected complete-data terms that involve (gamma, omega) for one
// component, per unit weight:  gamma*cbar - log K_gamma(omega)
// - omega*(abar+bbar)/2.  Both index updates are safeguarded against
// decreasing this quantity.
inline double q_index(double gamma, double omega, double abar, double bbar,
                      double cbar) {
  return gamma * cbar - special::log_bessel_k(gamma, omega) -
         0.5 * omega * (abar + bbar);
}

inline double q_omega_d1(double gamma, double omega, double abar,
                         double bbar) {
  const double rp = special::bessel_ratio(gamma, omega);
  const double rm = special::bessel_ratio(-gamma, omega);
  return 0.5 * (rp + rm - (abar + bbar));
}

inline double q_omega_d2(double gamma, double omega) {
  const double rp = special::bessel_ratio(gamma, omega);
  const double rm = special::bessel_ratio(-gamma, omega);
  return 0.5 * (rp * rp - (1.0 + 2.0 * gamma) / omega * rp - 1.0 + rm * rm -
                (1.0 - 2.0 * gamma) / omega * rm - 1.0);
}

}  // namespace detail

/// Fixed-point update for the index gamma, clamped to one unit of
/// movement and rejected if it lowers the expected complete-data terms.
inline Eigen::VectorXd update_gamma(
    const EStepCache& cache, const MixtureModel& model,
    double gamma_min = -std::numeric_limits<double>::infinity(),
    double gamma_max = std::numeric_limits<double>::infinity()) {
  Eigen::VectorXd out(model.groups());
  for (int g = 0; g < model.groups(); ++g) {
    const double omega = model.components[g].omega();
    double gamma_old = model.components[g].gamma();
    const double cbar = cache.cbar(g);
    if (gamma_old == 0.0) {
      // multiplicative update stalls at zero; nudge off it
      if (cbar == 0.0) {
        out(g) = 0.0;
        continue;
      }
      gamma_old = (cbar > 0.0 ? 1.0 : -1.0) * 1e-3;
    }
    const double deriv = special::dlog_bessel_k_dorder(gamma_old, omega);
    double gamma_new = cbar * gamma_old / deriv;
    if (!std::isfinite(gamma_new)) gamma_new = gamma_old;
    gamma_new = std::clamp(gamma_new, gamma_old - 1.0, gamma_old + 1.0);
    gamma_new = std::clamp(gamma_new, gamma_min, gamma_max);
    const double q_old = detail::q_index(gamma_old, omega, cache.abar(g),
                                         cache.bbar(g), cbar);
    const double q_new = detail::q_index(gamma_new, omega, cache.abar(g),
                                         cache.bbar(g), cbar);
    out(g) = (std::isfinite(q_new) && q_new >= q_old)
                 ? gamma_new
                 : model.components[g].gamma();
  }
  return out;
}

/// One safeguarded Newton step for omega at the updated gamma; the step
/// is halved until omega stays positive and the expected complete-data
/// terms do not decrease, then abandoned after ten halvings.
inline Eigen::VectorXd update_omega(
    const EStepCache& cache, const MixtureModel& model,
    const Eigen::VectorXd& gamma_new, double omega_min = 0.0,
    double omega_max = std::numeric_limits<double>::infinity()) {
  Eigen::VectorXd out(model.groups());
  for (int g = 0; g < model.groups(); ++g) {
    const double omega = model.components[g].omega();
    const double gamma = gamma_new(g);
    const double abar = cache.abar(g), bbar = cache.bbar(g);
    const double d1 = detail::q_omega_d1(gamma, omega, abar, bbar);
    const double d2 = detail::q_omega_d2(gamma, omega);
    double step;
    if (std::isfinite(d1) && std::isfinite(d2) && d2 < 0.0) {
      step = -d1 / d2;
    } else {
      step = (d1 > 0.0 ? 0.5 : -0.5) * omega;  // gradient-sign fallback
    }
    const double q_old =
        detail::q_index(gamma, omega, abar, bbar, cache.cbar(g));
    double accepted = omega;
    for (int halving = 0; halving < 10; ++halving) {
      double cand = omega + step;
      if (cand > 0.0) {
        cand = std::clamp(cand, std::max(omega_min, 1e-12), omega_max);
        if (cand == omega) break;
        const double q_new =
            detail::q_index(gamma, cand, abar, bbar, cache.cbar(g));
        if (std::isfinite(q_new) && q_new >= q_old) {
          accepted = cand;
          break;
        }
      }
      step *= 0.5;
    }
    out(g) = accepted;
  }
  return out;
}

inline std::vector<Eigen::MatrixXd> m_step_scatter(
    const Eigen::MatrixXd& data, const EStepCache& cache,
    const std::vector<Eigen::VectorXd>& mu_new,
    const std::vector<Eigen::VectorXd>& alpha_new) {
  const Eigen::Index n = data.rows(), p = data.cols();
  const int g_count = int(cache.z.cols());
  std::vector<Eigen::MatrixXd> out(g_count);
  for (int g = 0; g < g_count; ++g) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
    double za = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double zi = cache.z(i, g);
      const Eigen::VectorXd d = data.row(i).transpose() - mu_new[g];
      m.noalias() += zi * cache.b(i, g) * d * d.transpose();
      v += zi * d;
      za += zi * cache.a(i, g);
    }
    const Eigen::VectorXd& alpha = alpha_new[g];
    m.noalias() -= v * alpha.transpose();
    m.noalias() -= alpha * v.transpose();
    m.noalias() += za * alpha * alpha.transpose();
    out[g] = (0.5 * (m + m.transpose())) / cache.n_g(g);
  }
  return out;
}

/// Concentration update via the graphical lasso at rho = lambda_g / n_g,
/// warm-started from the previous iterate, and kept only when it does
/// not lower the penalized expected complete-data objective
/// (n_g/2)[log|C| - tr(C S_g)] - lambda_g ||C||_1.
inline glasso::GlassoSolution update_concentration(
    const Eigen::MatrixXd& s_g, double lambda_g, double n_g,
    const Eigen::MatrixXd& warm, double tol = 1e-6, int max_sweeps = 500) {
  if (!(n_g > 0.0) || !(lambda_g > 0.0)) {
    throw std::invalid_argument(
        "update_concentration: requires n_g > 0 and lambda_g > 0");
  }
  glasso::GlassoProblem prob;
  prob.s_matrix = s_g;
  prob.s_matrix.diagonal() =
      prob.s_matrix.diagonal().cwiseMax(1e-12);  // PSD scatter, roundoff
  prob.rho = lambda_g / n_g;
  prob.tol = tol;
  prob.max_sweeps = max_sweeps;
  return glasso_solve(prob, warm);
}

enum class StopDecision { kContinue, kStop };

/// Aitken-acceleration stopping rule on three consecutive penalized
/// log-likelihood values.
inline StopDecision aitken_stop(double l0, double l1, double l2, double eps,
                                AitkenForm form = AitkenForm::standard) {
  if (!(eps > 0.0)) throw std::invalid_argument("aitken_stop: eps > 0");
  const double d0 = l1 - l0, d1 = l2 - l1;
  if (std::abs(d0) < 1e-12) {
    // plateau fallback: accelerant undefined
    return std::abs(d1) < 1e-12 ? StopDecision::kStop
                                : StopDecision::kContinue;
  }
  const double accel = d1 / d0;
  if (accel >= 1.0 - 1e-12) {
    if (std::abs(d1) < 1e-12) return StopDecision::kStop;
    return StopDecision::kContinue;  // divergent extrapolation
  }
  const double l_inf = l1 + d1 / (1.0 - accel);
  const double diff = l_inf - (form == AitkenForm::standard ? l2 : l1);
  return (diff >= 0.0 && diff < eps) ? StopDecision::kStop
                                     : StopDecision::kContinue;
}

namespace detail {

// Seeded k-means hard partition used for initialization.
inline std::vector<int> kmeans_partition(const Eigen::MatrixXd& data, int k,
                                         std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Eigen::MatrixXd centers(k, data.cols());
  for (int g = 0; g < k; ++g) centers.row(g) = data.row(order[g]);

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 25; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int bestg = 0;
      double bestd = std::numeric_limits<double>::infinity();
      for (int g = 0; g < k; ++g) {
        const double d = (data.row(i) - centers.row(g)).squaredNorm();
        if (d < bestd) {
          bestd = d;
          bestg = g;
        }
      }
      if (labels[i] != bestg) {
        labels[i] = bestg;
        changed = true;
      }
    }
    for (int g = 0; g < k; ++g) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(data.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (labels[i] == g) {
          mean += data.row(i);
          ++count;
        }
      }
      if (count == 0) {
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        const Eigen::Index j = pick(rng);
        labels[j] = g;
        centers.row(g) = data.row(j);
        changed = true;
      } else {
        centers.row(g) = mean / double(count);
      }
    }
    if (!changed) break;
  }
  return labels;
}

inline MixtureModel initial_model(const Eigen::MatrixXd& data, int g_count,
                                  const FitConfig& config, std::uint64_t seed,
                                  double sigma_floor) {
  const Eigen::Index n = data.rows(), p = data.cols();
  const auto labels = kmeans_partition(data, g_count, seed);

  MixtureModel model;
  model.proportions.resize(g_count);
  model.lambda.resize(g_count);
  for (int g = 0; g < g_count; ++g) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
    int count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (labels[i] == g) {
        mean += data.row(i).transpose();
        ++count;
      }
    }
    if (count == 0) throw DegenerateComponent("initial_model: empty cluster");
    mean /= double(count);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (labels[i] == g) {
        const Eigen::VectorXd d = data.row(i).transpose() - mean;
        cov.noalias() += d * d.transpose();
      }
    }
    cov /= double(std::max(count, 2) - 1);
    cov.diagonal().array() +=
        1e-6 * std::max(cov.trace() / double(p), 1e-8) + 1e-8;
    // start inside the constrained region: eigenvalues at or above floor
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.eigenvalues().minCoeff() < sigma_floor) {
      cov = eig.eigenvectors() *
            eig.eigenvalues().cwiseMax(sigma_floor).asDiagonal() *
            eig.eigenvectors().transpose();
    }
    model.components.push_back(ghd::GhdComponent::from_sigma(
        mean, Eigen::VectorXd::Zero(p), cov, 1.0, -0.5));
    model.proportions(g) = double(count) / double(n);
    model.lambda(g) =
        (config.hyper.s + double(p) * double(p)) / (config.hyper.r + double(p));
  }
  // guard against zero-count roundoff in proportions
  model.proportions = model.proportions.cwiseMax(1e-12);
  model.proportions /= model.proportions.sum();
  return model;
}

}  // namespace detail

inline FitReport fit(const Eigen::MatrixXd& data, int g_count,
                     const FitConfig& config) {
  if (data.rows() <= g_count || data.cols() < 1) {
    throw std::invalid_argument("fit: requires n > G and p >= 1");
  }
  config.hyper.validate();
  if (!(config.eps > 0.0) || config.max_iter < 2) {
    throw std::invalid_argument("fit: requires eps > 0 and max_iter >= 2");
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config.retry_budget; ++attempt) {
    try {
      const std::uint64_t seed =
          config.seed + 0x9e3779b97f4a7c15ULL * std::uint64_t(attempt);
      const Eigen::RowVectorXd col_mean = data.colwise().mean();
      const double data_var =
          (data.rowwise() - col_mean).squaredNorm() /
          double((data.rows() - 1) * data.cols());
      const double sigma_floor =
          config.sigma_floor_rel * std::max(data_var, 1e-300);
      const double conc_eig_cap = 1.0 / sigma_floor;
      MixtureModel model =
          detail::initial_model(data, g_count, config, seed, sigma_floor);

      FitReport report;
      report.restarts_used = attempt;
      double n_total = double(data.rows());
      EStepCache cache;

      for (int iter = 1; iter <= config.max_iter; ++iter) {
        cache = e_step(data, model);
        const Eigen::VectorXd lambda = update_lambda(model, config.hyper);
        const MomentUpdates mom = m_step_moments(data, cache);
        const Eigen::VectorXd gamma_new =
            update_gamma(cache, model, config.gamma_min, config.gamma_max);
        const Eigen::VectorXd omega_new = update_omega(
            cache, model, gamma_new, config.omega_min, config.omega_max);
        const auto scatters =
            m_step_scatter(data, cache, mom.mu, mom.alpha);

        for (int g = 0; g < g_count; ++g) {
          auto& comp = model.components[g];
          const Eigen::MatrixXd warm = comp.concentration();
          comp.set_location(mom.mu[g]);
          comp.set_skewness(mom.alpha[g]);
          comp.set_index(omega_new(g), gamma_new(g));

          Eigen::MatrixXd c_new;
          try {
            const glasso::GlassoSolution sol = update_concentration(
                scatters[g], lambda(g), cache.n_g(g), warm,
                config.glasso_tol, config.glasso_max_sweeps);
            c_new = sol.concentration;
          } catch (const glasso::GlassoNonConvergence& e) {
            c_new = e.best_iterate.concentration;
          }
          // keep the update only if it improves the penalized
          // expected complete-data objective for this component
          auto obj = [&](const Eigen::MatrixXd& c) {
            Eigen::LLT<Eigen::MatrixXd> llt(c);
            if (llt.info() != Eigen::Success)
              return -std::numeric_limits<double>::infinity();
            const double logdet = 2.0 * llt.matrixL().toDenseMatrix()
                                            .diagonal().array().log().sum();
            return 0.5 * cache.n_g(g) *
                       (logdet - scatters[g].cwiseProduct(c).sum()) -
                   lambda(g) * c.cwiseAbs().sum();
          };
          const bool feasible =
              c_new.size() > 0 &&
              Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c_new)
                      .eigenvalues()
                      .maxCoeff() <= conc_eig_cap;
          if (feasible && obj(c_new) >= obj(warm)) {
            comp.set_concentration(c_new);
          }
        }
        model.proportions = mom.pi.cwiseMax(1e-300);
        model.proportions /= model.proportions.sum();
        model.lambda = lambda;

        report.loglik_trace.push_back(
            penalized_loglik(data, model, config.hyper));
        report.iterations = iter;
        const auto& tr = report.loglik_trace;
        if (tr.size() >= 3 &&
            aitken_stop(tr[tr.size() - 3], tr[tr.size() - 2], tr.back(),
                        config.eps, config.aitken) == StopDecision::kStop) {
          report.converged = true;
          break;
        }
      }

      cache = e_step(data, model);
      report.assignments.resize(data.rows());
      for (Eigen::Index i = 0; i < data.rows(); ++i) {
        Eigen::Index arg;
        cache.z.row(i).maxCoeff(&arg);
        report.assignments[i] = int(arg);
      }
      report.cache = std::move(cache);
      report.model = std::move(model);
      (void)n_total;
      return report;
    } catch (const DegenerateComponent& e) {
      last_error = e.what();
    }
  }
  throw DegenerateComponent("fit: retry budget exhausted: " + last_error);
}

}  // namespace ghdgls::em
