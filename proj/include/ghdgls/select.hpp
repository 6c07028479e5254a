#pragma once

// Model selection across numbers of groups: effective parameter counts
// that credit sparsity in the concentration matrices, BIC, a sweep
// driver with restarts, and the adjusted Rand index for comparing
// partitions.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ghdgls/em.hpp"

namespace ghdgls::select {

/// Effective free-parameter count for a fitted mixture. Mixing weights
/// contribute G-1, each component 2p (location and skewness) plus 2
/// (index pair), and each concentration matrix its diagonal plus the
/// surviving upper-triangle entries above the cutoff.
inline int count_effective_params(const em::MixtureModel& model,
                                  double cutoff = 1e-5) {
  if (!(cutoff >= 0.0)) {
    throw std::invalid_argument("count_effective_params: cutoff >= 0");
  }
  const int g_count = model.groups();
  const int p = int(model.dim());
  int k = (g_count - 1) + g_count * (2 * p + 2);
  for (const auto& comp : model.components) {
    const Eigen::MatrixXd& c = comp.concentration();
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) {
        if (i == j || std::abs(c(i, j)) > cutoff) ++k;
      }
    }
  }
  return k;
}

/// BIC = -2 * observed log-likelihood + k * log n, to be minimized. The
/// likelihood term is unpenalized; the penalty enters only through the
/// sparsity of the fitted concentration matrices.
inline double bic(const Eigen::MatrixXd& data, const em::MixtureModel& model,
                  double cutoff = 1e-5) {
  const double ll = em::observed_loglik(data, model);
  const int k = count_effective_params(model, cutoff);
  return -2.0 * ll + double(k) * std::log(double(data.rows()));
}

struct SweepEntry {
  int groups = 0;
  double bic_value = std::numeric_limits<double>::quiet_NaN();
  bool fitted = false;
  em::FitReport report;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  int best_groups = 0;

  const SweepEntry& best() const {
    for (const auto& e : entries) {
      if (e.groups == best_groups) return e;
    }
    throw std::logic_error("SweepResult: no fitted entry");
  }
};

/// Fits G = gmin..gmax, each with `starts` seeded restarts, keeping the
/// best penalized log-likelihood per G, and selects the G with the
/// smallest BIC. Group counts whose every start fails are recorded as
/// unfitted and skipped.
inline SweepResult sweep(const Eigen::MatrixXd& data, int gmin, int gmax,
                         const em::FitConfig& base_config, int starts = 1,
                         double cutoff = 1e-5) {
  if (gmin < 1 || gmax < gmin) {
    throw std::invalid_argument("sweep: requires 1 <= gmin <= gmax");
  }
  if (starts < 1) throw std::invalid_argument("sweep: starts >= 1");

  SweepResult result;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int g = gmin; g <= gmax; ++g) {
    SweepEntry entry;
    entry.groups = g;
    double best_pll = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
      em::FitConfig config = base_config;
      config.seed = base_config.seed + 1000003ULL * std::uint64_t(s);
      try {
        em::FitReport report = em::fit(data, g, config);
        const double pll = report.loglik_trace.back();
        if (pll > best_pll) {
          best_pll = pll;
          entry.report = std::move(report);
          entry.fitted = true;
        }
      } catch (const em::DegenerateComponent&) {
        // this start failed even after its internal retries; move on
      }
    }
    if (entry.fitted) {
      entry.bic_value = bic(data, entry.report.model, cutoff);
      if (entry.bic_value < best_bic) {
        best_bic = entry.bic_value;
        result.best_groups = g;
      }
    }
    result.entries.push_back(std::move(entry));
  }
  if (result.best_groups == 0) {
    throw std::runtime_error("sweep: no group count could be fitted");
  }
  return result;
}

/// Contingency table between two labelings of the same items.
inline Eigen::MatrixXi cross_tabulate(const std::vector<int>& one,
                                      const std::vector<int>& two) {
  if (one.size() != two.size() || one.empty()) {
    throw std::invalid_argument("cross_tabulate: size mismatch or empty");
  }
  int rmax = 0, cmax = 0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    if (one[i] < 0 || two[i] < 0) {
      throw std::invalid_argument("cross_tabulate: labels must be >= 0");
    }
    rmax = std::max(rmax, one[i]);
    cmax = std::max(cmax, two[i]);
  }
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(rmax + 1, cmax + 1);
  for (std::size_t i = 0; i < one.size(); ++i) ++table(one[i], two[i]);
  return table;
}

/// Hubert-Arabie adjusted Rand index from a contingency table.
inline double ari_from_table(const Eigen::MatrixXi& table) {
  const double n = double(table.sum());
  if (n < 2.0) throw std::invalid_argument("ari_from_table: needs n >= 2");
  auto choose2 = [](double m) { return 0.5 * m * (m - 1.0); };
  double sum_cells = 0.0;
  for (int i = 0; i < table.rows(); ++i) {
    for (int j = 0; j < table.cols(); ++j) {
      sum_cells += choose2(double(table(i, j)));
    }
  }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (int i = 0; i < table.rows(); ++i) {
    sum_rows += choose2(double(table.row(i).sum()));
  }
  for (int j = 0; j < table.cols(); ++j) {
    sum_cols += choose2(double(table.col(j).sum()));
  }
  const double expect = sum_rows * sum_cols / choose2(n);
  const double maxi = 0.5 * (sum_rows + sum_cols);
  if (std::abs(maxi - expect) < 1e-300) return 1.0;  // both partitions trivial
  return (sum_cells - expect) / (maxi - expect);
}

inline double adjusted_rand_index(const std::vector<int>& one,
                                  const std::vector<int>& two) {
  return ari_from_table(cross_tabulate(one, two));
}

}  // namespace ghdgls::select
