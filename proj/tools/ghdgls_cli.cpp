// Command-line front end: `fit` runs the penalized EM sweep over a range
// of group counts and writes a JSON result document plus per-component
// covariance / correlation / support CSV grids; `simulate` writes a
// synthetic dataset with labels and its generating parameters.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ghdgls/em.hpp"
#include "ghdgls/ghd.hpp"
#include "ghdgls/io.hpp"
#include "ghdgls/select.hpp"
#include "ghdgls/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ghdgls;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

struct FitFlags {
  std::string data_path;
  int labels_col = -1;
  int id_col = -1;
  int gmin = 1, gmax = 3;
  double shape = 1.0, rate = 1.0;
  double eps = 1e-5;
  int max_iter = 1000;
  int starts = 5;
  std::uint64_t seed = 0;
  bool standardize = false;
  bool no_header = false;
  double cutoff = 1e-5;
  std::string out_dir = ".";
};

int run_fit(const FitFlags& flags) {
  io::IngestOptions opt;
  opt.header = !flags.no_header;
  opt.label_column = flags.labels_col;
  opt.id_column = flags.id_col;
  const io::Dataset ds = io::ingest_csv(flags.data_path, opt);
  if (ds.matrix.rows() < 2) {
    throw std::runtime_error("fit: need at least two rows");
  }

  Eigen::MatrixXd work = ds.matrix;
  Eigen::RowVectorXd center = Eigen::RowVectorXd::Zero(work.cols());
  Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(work.cols());
  if (flags.standardize) {
    center = work.colwise().mean();
    work.rowwise() -= center;
    for (Eigen::Index j = 0; j < work.cols(); ++j) {
      const double sd =
          std::sqrt(work.col(j).squaredNorm() / double(work.rows() - 1));
      scale(j) = sd > 0.0 ? sd : 1.0;
      work.col(j) /= scale(j);
    }
  }

  em::FitConfig config;
  config.hyper.s = flags.shape;
  config.hyper.r = flags.rate;
  config.eps = flags.eps;
  config.max_iter = flags.max_iter;
  config.seed = flags.seed;
  const select::SweepResult sweep = select::sweep(
      work, flags.gmin, flags.gmax, config, flags.starts, flags.cutoff);
  const select::SweepEntry& best = sweep.best();
  const em::MixtureModel& model = best.report.model;

  fs::create_directories(flags.out_dir);
  json doc;
  doc["data"] = {{"path", flags.data_path},
                 {"n", ds.matrix.rows()},
                 {"p", ds.matrix.cols()},
                 {"rows_rejected", ds.rows_rejected},
                 {"standardized", flags.standardize},
                 {"columns", ds.column_names}};
  doc["config"] = {{"gmin", flags.gmin},     {"gmax", flags.gmax},
                   {"shape", flags.shape},   {"rate", flags.rate},
                   {"eps", flags.eps},       {"max_iter", flags.max_iter},
                   {"starts", flags.starts}, {"seed", flags.seed},
                   {"cutoff", flags.cutoff}};

  json scores = json::array();
  for (const auto& entry : sweep.entries) {
    json row;
    row["groups"] = entry.groups;
    row["fitted"] = entry.fitted;
    if (entry.fitted) {
      row["bic"] = entry.bic_value;
      row["effective_params"] =
          select::count_effective_params(entry.report.model, flags.cutoff);
      row["loglik"] = em::observed_loglik(work, entry.report.model);
      row["penalized_loglik"] = entry.report.loglik_trace.back();
      row["iterations"] = entry.report.iterations;
      row["converged"] = entry.report.converged;
    }
    scores.push_back(row);
  }
  doc["scores"] = scores;
  doc["best_groups"] = sweep.best_groups;

  json components = json::array();
  for (int g = 0; g < model.groups(); ++g) {
    const auto& comp = model.components[g];
    // back-transform to original units when standardized
    Eigen::VectorXd mu = comp.mu();
    Eigen::VectorXd alpha = comp.alpha();
    Eigen::MatrixXd sigma = comp.sigma();
    if (flags.standardize) {
      for (Eigen::Index j = 0; j < mu.size(); ++j) {
        mu(j) = mu(j) * scale(j) + center(j);
        alpha(j) *= scale(j);
      }
      sigma = scale.transpose().asDiagonal() * sigma *
              scale.transpose().asDiagonal();
    }
    json c;
    c["pi"] = model.proportions(g);
    c["lambda"] = model.lambda(g);
    c["omega"] = comp.omega();
    c["gamma"] = comp.gamma();
    c["mu"] = vector_to_json(mu);
    c["alpha"] = vector_to_json(alpha);
    c["sigma"] = matrix_to_json(sigma);
    c["concentration"] = matrix_to_json(comp.concentration());
    components.push_back(c);

    // heat-map grids in fitted (possibly standardized) units
    const Eigen::MatrixXd& cov = comp.sigma();
    Eigen::MatrixXd corr = cov;
    const Eigen::VectorXd d = cov.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      for (Eigen::Index j = 0; j < cov.cols(); ++j) {
        corr(i, j) = cov(i, j) / (d(i) * d(j));
      }
    }
    Eigen::MatrixXd support = comp.concentration();
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
      for (Eigen::Index j = 0; j < support.cols(); ++j) {
        support(i, j) = std::abs(support(i, j)) > flags.cutoff ? 1.0 : 0.0;
      }
    }
    const std::string tag = "component_" + std::to_string(g + 1);
    io::emit_csv(flags.out_dir + "/" + tag + "_covariance.csv", cov,
                 ds.column_names);
    io::emit_csv(flags.out_dir + "/" + tag + "_correlation.csv", corr,
                 ds.column_names);
    io::emit_csv(flags.out_dir + "/" + tag + "_support.csv", support,
                 ds.column_names);
  }
  doc["components"] = components;
  doc["assignments"] = best.report.assignments;
  doc["loglik_trace"] = best.report.loglik_trace;

  if (ds.labels) {
    const Eigen::MatrixXi table =
        select::cross_tabulate(*ds.labels, best.report.assignments);
    json tab = json::array();
    for (int i = 0; i < table.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < table.cols(); ++j) row.push_back(table(i, j));
      tab.push_back(row);
    }
    doc["cross_tab"] = tab;
    doc["label_names"] = ds.label_names;
    doc["ari"] =
        select::adjusted_rand_index(*ds.labels, best.report.assignments);
  }

  std::ofstream out(flags.out_dir + "/result.json");
  if (!out) throw std::runtime_error("fit: cannot write result.json");
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("fit: write failed for result.json");
  std::cout << "best G = " << sweep.best_groups << ", results in "
            << flags.out_dir << "\n";
  return 0;
}

struct SimulateFlags {
  std::string kind = "spherical";
  int p = 4;
  int g = 2;
  int ng = 100;
  std::uint64_t seed = 0;
  double separation = 3.0;
  std::string out_dir = ".";
};

int run_simulate(const SimulateFlags& flags) {
  simgen::ScenarioSpec spec;
  if (flags.kind == "spherical") {
    spec.kind = simgen::ScenarioKind::spherical;
  } else if (flags.kind == "block_pattern_1") {
    spec.kind = simgen::ScenarioKind::block_pattern_1;
  } else if (flags.kind == "block_pattern_2") {
    spec.kind = simgen::ScenarioKind::block_pattern_2;
  } else if (flags.kind == "gaussian_blocks") {
    spec.kind = simgen::ScenarioKind::gaussian_blocks;
  } else {
    throw CLI::ValidationError("--kind", "unknown scenario " + flags.kind);
  }
  spec.p = flags.p;
  spec.g = flags.g;
  spec.n_g = flags.ng;
  spec.seed = flags.seed;
  spec.separation = flags.separation;

  const simgen::GeneratedData sim = simgen::generate(spec);
  fs::create_directories(flags.out_dir);

  std::vector<std::string> names;
  for (int j = 0; j < spec.p; ++j) names.push_back("V" + std::to_string(j + 1));
  io::emit_csv(flags.out_dir + "/data.csv", sim.data, names);

  Eigen::MatrixXd labels(sim.labels.size(), 1);
  for (std::size_t i = 0; i < sim.labels.size(); ++i) {
    labels(Eigen::Index(i), 0) = sim.labels[i];
  }
  io::emit_csv(flags.out_dir + "/labels.csv", labels, {"label"});

  json truth;
  truth["kind"] = flags.kind;
  truth["p"] = spec.p;
  truth["g"] = spec.g;
  truth["n_g"] = spec.n_g;
  truth["seed"] = spec.seed;
  truth["separation"] = spec.separation;
  json comps = json::array();
  for (int g = 0; g < sim.truth.groups(); ++g) {
    const auto& comp = sim.truth.components[g];
    json c;
    c["pi"] = sim.truth.proportions(g);
    c["omega"] = comp.omega();
    c["gamma"] = comp.gamma();
    c["mu"] = vector_to_json(comp.mu());
    c["alpha"] = vector_to_json(comp.alpha());
    c["sigma"] = matrix_to_json(comp.sigma());
    c["concentration"] = matrix_to_json(comp.concentration());
    comps.push_back(c);
  }
  truth["components"] = comps;
  std::ofstream out(flags.out_dir + "/truth.json");
  if (!out) throw std::runtime_error("simulate: cannot write truth.json");
  out << truth.dump(2) << "\n";
  if (!out) throw std::runtime_error("simulate: write failed for truth.json");
  std::cout << "wrote " << sim.data.rows() << " rows to " << flags.out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized mixtures of generalized hyperbolic distributions"};
  app.require_subcommand(1);

  FitFlags fit_flags;
  CLI::App* fit = app.add_subcommand("fit", "fit a mixture to CSV data");
  fit->add_option("--data", fit_flags.data_path, "input CSV path")
      ->required();
  fit->add_option("--labels-col", fit_flags.labels_col,
                  "0-based index of a true-class column");
  fit->add_option("--id-col", fit_flags.id_col,
                  "0-based index of an identifier column");
  fit->add_option("--gmin", fit_flags.gmin, "smallest group count");
  fit->add_option("--gmax", fit_flags.gmax, "largest group count");
  fit->add_option("--shape", fit_flags.shape, "penalty shape s");
  fit->add_option("--rate", fit_flags.rate, "penalty rate r");
  fit->add_option("--eps", fit_flags.eps, "stopping threshold");
  fit->add_option("--max-iter", fit_flags.max_iter, "iteration cap");
  fit->add_option("--starts", fit_flags.starts, "restarts per group count");
  fit->add_option("--seed", fit_flags.seed, "random seed");
  fit->add_flag("--standardize", fit_flags.standardize,
                "z-score columns before fitting");
  fit->add_flag("--no-header", fit_flags.no_header,
                "input CSV has no header row");
  fit->add_option("--cutoff", fit_flags.cutoff,
                  "magnitude below which concentration entries count as 0");
  fit->add_option("--out", fit_flags.out_dir, "output directory");

  SimulateFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "generate synthetic data");
  sim->add_option("--kind", sim_flags.kind,
                  "spherical | block_pattern_1 | block_pattern_2 | "
                  "gaussian_blocks");
  sim->add_option("--p", sim_flags.p, "dimension");
  sim->add_option("--g", sim_flags.g, "number of components");
  sim->add_option("--ng", sim_flags.ng, "rows per component");
  sim->add_option("--seed", sim_flags.seed, "random seed");
  sim->add_option("--separation", sim_flags.separation,
                  "distance scale between component locations");
  sim->add_option("--out", sim_flags.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*fit) return run_fit(fit_flags);
    if (*sim) return run_simulate(sim_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
