#pragma once

// L1-penalized precision matrix estimation: maximize
//   f(C) = log det(C) - tr(SC) - rho ||C||_1,
// with ||C||_1 summing absolute values of ALL entries, diagonal included.
// Block coordinate descent over columns with a coordinate-descent lasso
// subproblem per column; convergence is declared on the exact KKT
// residual evaluated with the inverse of the recovered concentration.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace ghdgls::glasso {

struct GlassoProblem {
  Eigen::MatrixXd s_matrix;  // empirical scatter S, symmetric, diag > 0
  double rho = 0.0;          // penalty, >= 0
  double tol = 1e-6;         // KKT residual tolerance
  int max_sweeps = 500;

  void validate() const {
    if (s_matrix.rows() != s_matrix.cols()) {
      throw std::invalid_argument("GlassoProblem: S must be square");
    }
    if ((s_matrix - s_matrix.transpose()).cwiseAbs().maxCoeff() >
        1e-8 * (1.0 + s_matrix.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("GlassoProblem: S must be symmetric");
    }
    if (s_matrix.diagonal().minCoeff() <= 0.0) {
      throw std::invalid_argument(
          "GlassoProblem: S must have positive diagonal");
    }
    if (!(rho >= 0.0)) {
      throw std::invalid_argument("GlassoProblem: rho must be >= 0");
    }
  }
};

struct GlassoSolution {
  Eigen::MatrixXd concentration;
  Eigen::MatrixXd covariance;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int sweeps = 0;
};

class GlassoNonConvergence : public std::runtime_error {
 public:
  GlassoNonConvergence(std::string what, GlassoSolution best)
      : std::runtime_error(std::move(what)), best_iterate(std::move(best)) {}
  GlassoSolution best_iterate;
};

inline double glasso_objective(const Eigen::MatrixXd& c,
                               const GlassoProblem& problem) {
  problem.validate();
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("glasso_objective: C is not SPD");
  }
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return logdet - problem.s_matrix.cwiseProduct(c).sum() -
         problem.rho * c.cwiseAbs().sum();
}

namespace detail {

// max_{i<=j} distance of W - S from a valid subgradient of rho||C||_1,
// with exact zeros of C taken from the soft-threshold pattern.
inline double kkt_residual(const Eigen::MatrixXd& c, const Eigen::MatrixXd& w,
                           const Eigen::MatrixXd& s, double rho) {
  double worst = 0.0;
  const Eigen::Index p = s.rows();
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double d = w(i, j) - s(i, j);
      double r;
      if (i == j) {
        r = std::abs(d - rho);  // C_ii > 0 for SPD C
      } else if (c(i, j) != 0.0) {
        r = std::abs(d - rho * (c(i, j) > 0.0 ? 1.0 : -1.0));
      } else {
        r = std::max(0.0, std::abs(d) - rho);
      }
      worst = std::max(worst, r);
    }
  }
  return worst;
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace detail

inline GlassoSolution glasso_solve(
    const GlassoProblem& problem,
    const std::optional<Eigen::MatrixXd>& warm = std::nullopt) {
  problem.validate();
  const Eigen::Index p = problem.s_matrix.rows();
  const Eigen::MatrixXd& s = problem.s_matrix;

  GlassoSolution out;

  if (problem.rho == 0.0) {
    // unpenalized MLE: C = S^{-1}
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    const Eigen::VectorXd ldiag = llt.matrixL().toDenseMatrix().diagonal();
    if (llt.info() != Eigen::Success ||
        ldiag.minCoeff() < 1e-6 * ldiag.maxCoeff()) {
      throw std::invalid_argument(
          "glasso_solve: singular or indefinite S with rho = 0");
    }
    Eigen::MatrixXd c = llt.solve(Eigen::MatrixXd::Identity(p, p));
    out.concentration = 0.5 * (c + c.transpose());
    out.covariance = s;
    out.objective = glasso_objective(out.concentration, problem);
    out.kkt_residual =
        detail::kkt_residual(out.concentration, s, s, 0.0);
    return out;
  }

  const double rho = problem.rho;
  Eigen::MatrixXd w;
  if (warm && warm->rows() == p) {
    Eigen::LLT<Eigen::MatrixXd> llt(*warm);
    if (llt.info() == Eigen::Success) {
      w = llt.solve(Eigen::MatrixXd::Identity(p, p));
      w = 0.5 * (w + w.transpose());
    }
  }
  if (w.size() == 0) w = s;
  w.diagonal() = s.diagonal().array() + rho;  // fixed by the KKT system

  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);  // column lasso coeffs

  auto recover = [&](Eigen::MatrixXd& c) -> bool {
    c.resize(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i != j) dot += w(i, j) * beta(i, j);
      }
      const double c_jj_inv = w(j, j) - dot;
      if (!(c_jj_inv > 0.0)) return false;
      c(j, j) = 1.0 / c_jj_inv;
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i != j) c(i, j) = -beta(i, j) * c(j, j);
      }
    }
    // exact zeros are symmetric near convergence; keep them exact
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        if (c(i, j) == 0.0 || c(j, i) == 0.0) {
          c(i, j) = c(j, i) = 0.0;
        } else {
          const double v = 0.5 * (c(i, j) + c(j, i));
          c(i, j) = c(j, i) = v;
        }
      }
    }
    return true;
  };

  GlassoSolution best;
  double best_resid = std::numeric_limits<double>::infinity();

  for (int sweep = 1; sweep <= problem.max_sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < p; ++j) {
      // lasso for column j: min 1/2 b'W11 b - b's12 + rho|b|_1
      for (int inner = 0; inner < 100; ++inner) {
        double max_delta = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
          if (k == j) continue;
          double r = s(k, j);
          for (Eigen::Index l = 0; l < p; ++l) {
            if (l != j && l != k) r -= w(k, l) * beta(l, j);
          }
          const double newb = detail::soft_threshold(r, rho) / w(k, k);
          max_delta = std::max(max_delta, std::abs(newb - beta(k, j)));
          beta(k, j) = newb;
        }
        if (max_delta < 1e-4 * problem.tol * (1.0 + s.cwiseAbs().maxCoeff()))
          break;
      }
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i == j) continue;
        double v = 0.0;
        for (Eigen::Index l = 0; l < p; ++l) {
          if (l != j) v += w(i, l) * beta(l, j);
        }
        w(i, j) = w(j, i) = v;
      }
    }

    Eigen::MatrixXd c;
    if (!recover(c)) continue;
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(p, p));
    cov = 0.5 * (cov + cov.transpose());
    const double resid = detail::kkt_residual(c, cov, s, rho);
    if (resid < best_resid) {
      best_resid = resid;
      best.concentration = c;
      best.covariance = cov;
      best.kkt_residual = resid;
      best.sweeps = sweep;
    }
    if (resid <= problem.tol) {
      best.objective = glasso_objective(best.concentration, problem);
      return best;
    }
  }

  if (best.concentration.size() > 0) {
    best.objective = glasso_objective(best.concentration, problem);
  }
  throw GlassoNonConvergence(
      "glasso_solve: KKT residual " + std::to_string(best_resid) +
          " above tol after " + std::to_string(problem.max_sweeps) +
          " sweeps",
      best);
}

}  // namespace ghdgls::glasso
