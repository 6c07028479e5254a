#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ghdgls/gig.hpp"
#include "ghdgls/simgen.hpp"

using namespace ghdgls;

TEST_CASE("labels, sizes, proportions, determinism") {
  simgen::ScenarioSpec spec;
  spec.kind = simgen::ScenarioKind::spherical;
  spec.p = 4;
  spec.g = 3;
  spec.n_g = 20;
  spec.seed = 5;
  const auto one = simgen::generate(spec);
  const auto two = simgen::generate(spec);
  REQUIRE(one.data.rows() == 60);
  REQUIRE(one.data.cols() == 4);
  CHECK(one.data == two.data);
  CHECK(one.labels == two.labels);
  std::vector<int> counts(3, 0);
  for (int lab : one.labels) ++counts[lab];
  for (int c : counts) CHECK(c == 20);
  CHECK(one.truth.proportions.isApproxToConstant(1.0 / 3.0));
  CHECK(one.truth.groups() == 3);

  spec.p = 1;
  CHECK_THROWS_AS(simgen::generate(spec), std::invalid_argument);
}

TEST_CASE("spherical groups have near-spherical sample covariance") {
  simgen::ScenarioSpec spec;
  spec.kind = simgen::ScenarioKind::spherical;
  spec.p = 4;
  spec.g = 2;
  spec.n_g = 500;
  spec.seed = 11;
  const auto sim = simgen::generate(spec);
  for (int g = 0; g < 2; ++g) {
    const Eigen::MatrixXd block = sim.data.middleRows(g * 500, 500);
    const Eigen::RowVectorXd mean = block.colwise().mean();
    const Eigen::MatrixXd centered = block.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / 499.0;
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < 4; ++i) {
      diag += cov(i, i);
      for (int j = 0; j < 4; ++j) {
        if (i != j) off += std::abs(cov(i, j));
      }
    }
    CHECK(off / diag < 0.2);
  }
}

TEST_CASE("block truths are exactly sparse and SPD") {
  for (auto kind : {simgen::ScenarioKind::block_pattern_1,
                    simgen::ScenarioKind::block_pattern_2}) {
    simgen::ScenarioSpec spec;
    spec.kind = kind;
    spec.p = 12;
    spec.g = 2;
    spec.n_g = 5;
    spec.seed = 3;
    const auto sim = simgen::generate(spec);
    for (const auto& comp : sim.truth.components) {
      const Eigen::MatrixXd& sigma = comp.sigma();
      Eigen::LLT<Eigen::MatrixXd> llt(sigma);
      CHECK(llt.info() == Eigen::Success);
      int zeros = 0;
      for (int i = 0; i < 12; ++i) {
        for (int j = i + 1; j < 12; ++j) {
          if (sigma(i, j) == 0.0) ++zeros;
        }
      }
      CHECK(zeros > 0);  // strictly sparse off-block structure
      // concentration inherits block sparsity for block-diagonal sigma
      if (kind == simgen::ScenarioKind::block_pattern_1) {
        const Eigen::MatrixXd conc = sigma.inverse();
        int conc_zeros = 0;
        for (int i = 0; i < 12; ++i) {
          for (int j = i + 1; j < 12; ++j) {
            if (std::abs(conc(i, j)) < 1e-10) ++conc_zeros;
          }
        }
        CHECK(conc_zeros >= zeros);
      }
    }
  }
}

TEST_CASE("per-group empirical means match mu + E[W] alpha") {
  simgen::ScenarioSpec spec;
  spec.kind = simgen::ScenarioKind::block_pattern_1;
  spec.p = 8;
  spec.g = 2;
  spec.n_g = 2000;
  spec.seed = 17;
  const auto sim = simgen::generate(spec);
  for (int g = 0; g < 2; ++g) {
    const auto& comp = sim.truth.components[g];
    const gig::GigMoments m = gig::gig_moments(
        gig::GigParams{comp.omega(), comp.omega(), comp.gamma()});
    const Eigen::VectorXd expect = comp.mu() + m.mean * comp.alpha();
    const Eigen::MatrixXd block = sim.data.middleRows(g * 2000, 2000);
    const Eigen::VectorXd got = block.colwise().mean().transpose();
    // conservative per-coordinate spread bound from the mixture variance
    for (int j = 0; j < 8; ++j) {
      const double var = m.mean * comp.sigma()(j, j) +
                         (m.mean_inv * 0.0 + 1.0) * comp.alpha()(j) *
                             comp.alpha()(j) * 4.0;
      const double se = std::sqrt(var / 2000.0);
      CHECK(std::abs(got(j) - expect(j)) < 4.0 * se + 4e-2);
    }
  }
}

TEST_CASE("gaussian limit has symmetric groups") {
  simgen::ScenarioSpec spec;
  spec.kind = simgen::ScenarioKind::gaussian_blocks;
  spec.p = 6;
  spec.g = 2;
  spec.n_g = 3000;
  spec.seed = 23;
  const auto sim = simgen::generate(spec);
  for (const auto& comp : sim.truth.components) {
    CHECK(comp.alpha().norm() == 0.0);
  }
  // per-group skewness of each coordinate close to zero
  for (int g = 0; g < 2; ++g) {
    const Eigen::MatrixXd block = sim.data.middleRows(g * 3000, 3000);
    for (int j = 0; j < 6; ++j) {
      const double mean = block.col(j).mean();
      const Eigen::ArrayXd d = block.col(j).array() - mean;
      const double sd = std::sqrt(d.square().mean());
      const double skew = (d / sd).cube().mean();
      CHECK(std::abs(skew) < 0.15);
    }
  }
}
