#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ghdgls/glasso.hpp"

using namespace ghdgls::glasso;

namespace {

Eigen::MatrixXd random_spd(int p, unsigned seed, double jitter = 0.5) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = g(rng);
  return a * a.transpose() / double(p) +
         jitter * Eigen::MatrixXd::Identity(p, p);
}

int nnz_offdiag(const Eigen::MatrixXd& c, double cut = 1e-8) {
  int n = 0;
  for (int j = 0; j < c.cols(); ++j)
    for (int i = 0; i < j; ++i)
      if (std::abs(c(i, j)) > cut) ++n;
  return n;
}

}  // namespace

TEST_CASE("objective direct substitution") {
  const int p = 3;
  GlassoProblem prob{Eigen::MatrixXd::Identity(p, p), 0.0};
  CHECK(glasso_objective(Eigen::MatrixXd::Identity(p, p), prob) ==
        doctest::Approx(-double(p)).epsilon(1e-14));

  // rho = 0, C = S^{-1} gives -log det S - p
  const Eigen::MatrixXd s = random_spd(4, 1);
  GlassoProblem prob2{s, 0.0};
  CHECK(glasso_objective(s.inverse(), prob2) ==
        doctest::Approx(-std::log(s.determinant()) - 4.0).epsilon(1e-10));

  // random instance matches independent componentwise evaluation
  const Eigen::MatrixXd c = random_spd(3, 2);
  const Eigen::MatrixXd s3 = random_spd(3, 3);
  GlassoProblem prob3{s3, 0.37};
  double expect = std::log(c.determinant());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      expect += -s3(i, j) * c(j, i) - 0.37 * std::abs(c(i, j));
  CHECK(glasso_objective(c, prob3) == doctest::Approx(expect).epsilon(1e-10));

  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 3.0, 3.0, 1.0;
  CHECK_THROWS_AS(glasso_objective(indef, prob), std::invalid_argument);
}

TEST_CASE("rho = 0 returns the direct inverse") {
  const Eigen::MatrixXd s = random_spd(6, 5);
  const GlassoSolution sol = glasso_solve({s, 0.0});
  CHECK((sol.concentration - s.inverse()).cwiseAbs().maxCoeff() <
        1e-8 * s.inverse().cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(glasso_solve({Eigen::MatrixXd::Ones(3, 3) +
                                    1e-14 * Eigen::MatrixXd::Identity(3, 3),
                                0.0}),
                  std::invalid_argument);
}

TEST_CASE("large rho decouples to the diagonal solution") {
  const Eigen::MatrixXd s = random_spd(5, 8);
  double maxoff = 0.0;
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < j; ++i) maxoff = std::max(maxoff, std::abs(s(i, j)));
  const double rho = maxoff * 1.05;
  const GlassoSolution sol = glasso_solve({s, rho, 1e-8});
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 5; ++i) {
      if (i == j) {
        CHECK(sol.concentration(i, i) ==
              doctest::Approx(1.0 / (s(i, i) + rho)).epsilon(1e-8));
      } else {
        CHECK(sol.concentration(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("2x2 instance matches brute-force grid search") {
  Eigen::MatrixXd s(2, 2);
  s << 2.0, 0.8, 0.8, 1.0;
  GlassoProblem prob{s, 0.3, 1e-9};
  const GlassoSolution sol = glasso_solve(prob);

  // dense grid + local refinement over the 3 free entries
  double best = -1e300;
  Eigen::Vector3d argbest;  // (c11, c22, c12)
  auto eval = [&](double c11, double c22, double c12) {
    const double det = c11 * c22 - c12 * c12;
    if (det <= 0.0 || c11 <= 0.0) return -1e300;
    return std::log(det) - (s(0, 0) * c11 + s(1, 1) * c22 +
                            2.0 * s(0, 1) * c12) -
           0.3 * (std::abs(c11) + std::abs(c22) + 2.0 * std::abs(c12));
  };
  double lo[3] = {0.05, 0.05, -1.5}, hi[3] = {3.0, 3.0, 1.5};
  for (int pass = 0; pass < 8; ++pass) {
    const int ngrid = 40;
    best = -1e300;
    for (int i = 0; i <= ngrid; ++i)
      for (int j = 0; j <= ngrid; ++j)
        for (int k = 0; k <= ngrid; ++k) {
          const double c11 = lo[0] + (hi[0] - lo[0]) * i / ngrid;
          const double c22 = lo[1] + (hi[1] - lo[1]) * j / ngrid;
          const double c12 = lo[2] + (hi[2] - lo[2]) * k / ngrid;
          const double v = eval(c11, c22, c12);
          if (v > best) {
            best = v;
            argbest << c11, c22, c12;
          }
        }
    for (int d = 0; d < 3; ++d) {
      const double w = (hi[d] - lo[d]) / 40.0 * 3.0;
      lo[d] = argbest(d) - w;
      hi[d] = argbest(d) + w;
    }
  }
  CHECK(sol.concentration(0, 0) == doctest::Approx(argbest(0)).epsilon(1e-4));
  CHECK(sol.concentration(1, 1) == doctest::Approx(argbest(1)).epsilon(1e-4));
  CHECK(sol.concentration(0, 1) ==
        doctest::Approx(argbest(2)).epsilon(1e-4).scale(1.0));
  CHECK(sol.objective >= best - 1e-8);
}

TEST_CASE("KKT residual, symmetry, inverse consistency on random instances") {
  for (int rep = 0; rep < 15; ++rep) {
    const int p = 2 + rep % 9;
    const Eigen::MatrixXd s = random_spd(p, 100 + rep);
    GlassoProblem prob{s, 0.05 + 0.02 * (rep % 5), 1e-6};
    const GlassoSolution sol = glasso_solve(prob);
    CHECK(sol.kkt_residual <= 1e-6);
    CHECK((sol.concentration - sol.concentration.transpose())
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    const Eigen::MatrixXd prod = sol.covariance * sol.concentration;
    CHECK((prod - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() <
          1e-6);
    // objective at least as good as scaled-identity and S^{-1} fallbacks
    const Eigen::MatrixXd diag_sol =
        (s.diagonal().array() + prob.rho).inverse().matrix().asDiagonal();
    CHECK(sol.objective >= glasso_objective(diag_sol, prob) - 1e-8);
    CHECK(sol.objective >= glasso_objective(s.inverse(), prob) - 1e-8);
  }
}

TEST_CASE("sparsity is monotone along an increasing rho path") {
  const Eigen::MatrixXd s = random_spd(8, 77);
  int prev = 1000;
  for (double rho : {0.01, 0.03, 0.08, 0.15, 0.3, 0.6}) {
    const GlassoSolution sol = glasso_solve({s, rho, 1e-7});
    const int nnz = nnz_offdiag(sol.concentration);
    CHECK(nnz <= prev);
    prev = nnz;
  }
}

TEST_CASE("warm start is no worse than cold start") {
  const Eigen::MatrixXd s = random_spd(6, 31);
  const GlassoSolution cold = glasso_solve({s, 0.1, 1e-8});
  // perturb S slightly, as consecutive EM iterations do
  Eigen::MatrixXd s2 = s;
  s2.array() *= 1.02;
  const GlassoSolution cold2 = glasso_solve({s2, 0.1, 1e-8});
  const GlassoSolution warm2 =
      glasso_solve({s2, 0.1, 1e-8}, cold.concentration);
  CHECK(warm2.objective >= cold2.objective - 1e-6);
  CHECK(warm2.sweeps <= cold2.sweeps + 1);
}

TEST_CASE("rank-deficient S is regularized by the penalty") {
  // n < p style scatter: rank 2 in dimension 5
  std::mt19937 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(2, 5);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j) x(i, j) = g(rng);
  Eigen::MatrixXd s = x.transpose() * x / 2.0;
  s.diagonal().array() += 1e-8;  // keep diag > 0 requirement honest
  const GlassoSolution sol = glasso_solve({s, 0.2, 1e-6});
  CHECK(sol.kkt_residual <= 1e-6);
  Eigen::LLT<Eigen::MatrixXd> llt(sol.concentration);
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("non-convergence carries the best iterate") {
  const Eigen::MatrixXd s = random_spd(10, 55);
  GlassoProblem prob{s, 0.05, 1e-15, 2};  // unreachable tol, 2 sweeps
  try {
    glasso_solve(prob);
    FAIL("expected GlassoNonConvergence");
  } catch (const GlassoNonConvergence& e) {
    CHECK(e.best_iterate.concentration.rows() == 10);
    CHECK(e.best_iterate.kkt_residual < 1.0);
  }
}
