// icmaxent: generate synthetic problems, fit single constraint files, and run the
// feature-selection and joint-interventional experiments.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bench/experiments.hpp"
#include "bench/io.hpp"
#include "icmaxent/errors.hpp"
#include "icmaxent/identify.hpp"
#include "icmaxent/solver.hpp"
#include "icmaxent/synth.hpp"

namespace fs = std::filesystem;
using namespace icmaxent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

struct CommonFlags {
  std::string structure = "a";
  std::size_t n_graphs = 200;
  std::optional<std::size_t> n_samples;
  std::uint64_t seed = 0;
  double tolerance = SolverOptions{}.tolerance;
  int max_restarts = SolverOptions{}.max_restarts;
  std::string out = ".";
  std::string px = "exact";
  bool allow_unidentifiable = false;
};

struct FitFlags {
  std::string constraints;
  std::string joint;
  std::string marginals;
  std::string graph;
};

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tolerance", f.tolerance, "Residual-norm tolerance (sum of squares)")->capture_default_str();
  cmd->add_option("--max-restarts", f.max_restarts, "Restarts from the last multipliers")->capture_default_str();
  cmd->add_flag("--allow-unidentifiable", f.allow_unidentifiable,
                "Admit interventional constraints that fail the identifiability gate");
}

void add_experiment_flags(CLI::App* cmd, CommonFlags& f, std::size_t default_samples) {
  cmd->add_option("--structure", f.structure, "a, b, c or a graph file")->capture_default_str();
  cmd->add_option("--n-graphs", f.n_graphs, "Sampled graphs")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--n-samples", f.n_samples,
                  "Samples per dataset (default " + std::to_string(default_samples) + ")")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Run seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--px", f.px, "P(X) given to the solver")
      ->check(CLI::IsMember({"exact", "marginals"}))
      ->capture_default_str();
  add_solver_flags(cmd, f);
}

SolverOptions solver_options(const CommonFlags& f) {
  SolverOptions o;
  o.tolerance = f.tolerance;
  o.max_restarts = f.max_restarts;
  o.allow_unidentifiable = f.allow_unidentifiable;
  o.validate();
  return o;
}

bench::ExperimentConfig experiment_config(const CommonFlags& f, std::size_t default_samples) {
  bench::ExperimentConfig c;
  c.structure = bench::resolve_structure(f.structure);
  c.n_graphs = f.n_graphs;
  c.n_samples = f.n_samples.value_or(default_samples);
  c.seed = f.seed;
  c.solver = solver_options(f);
  c.px = bench::parse_px_mode(f.px);
  c.log = &std::cerr;
  c.validate();
  return c;
}

fs::path output_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

template <typename Write, typename Rows>
void write_csv(const fs::path& path, Write write, const Rows& rows) {
  std::ofstream os(path);
  if (!os) throw Error(path.string() + ": cannot open for writing");
  write(os, rows);
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// --- gen -------------------------------------------------------------------

int cmd_gen(const CommonFlags& f) {
  const GraphSpec structure = bench::resolve_structure(f.structure);
  const std::size_t n = f.n_samples.value_or(100);
  const fs::path dir = output_dir(f.out);
  const ScmInstance scm = sample_scm(structure, mix_seed(f.seed, 0));
  const std::size_t d = scm.n_causes();

  io::GraphFile graph{{}, scm.graph()};
  for (std::size_t i = 0; i < d; ++i) graph.cause_names.push_back("X" + std::to_string(i + 1));
  io::write_json(dir / "graph.json", io::graph_to_json(graph));
  io::write_json(dir / "scm.json", io::scm_to_json(scm));
  const JointTable joint = exact_joint_X(scm);
  io::write_json(dir / "joint.json", io::joint_to_json(joint));
  std::vector<double> marginals;
  for (std::uint32_t i = 0; i < d; ++i) marginals.push_back(joint.probability(Config{{VarId{i}}, {1}}));
  io::write_json(dir / "marginals.json", io::marginals_to_json(marginals));

  const Dataset obs = ancestral_sample(scm, n, std::nullopt, mix_seed(f.seed, 1));
  io::write_dataset_csv(dir / "observational.csv", obs);

  io::ConstraintFile conditional{d, {}};
  io::ConstraintFile interventional{d, {}};
  const GraphSpec unlabeled = scm.graph().with_y_parents(std::nullopt);
  for (std::uint32_t i = 0; i < d; ++i) {
    const VarSet v{VarId{i}};
    std::vector<Dataset> clamped;
    for (std::uint8_t value = 0; value < 2; ++value) {
      clamped.push_back(ancestral_sample(scm, n, Intervention{v, {value}}, mix_seed(f.seed, 2 + 2 * i + value)));
      io::write_dataset_csv(dir / ("do_X" + std::to_string(i + 1) + "_" + std::to_string(value) + ".csv"),
                            clamped.back());
    }
    const auto cond = empirical_averages(std::span<const Dataset>(&obs, 1),
                                         ConstraintTemplate{ConstraintKind::conditional, v, {}, {}});
    conditional.constraints.push_back(cond);
    if (f.allow_unidentifiable || intervenable(unlabeled, v.front()).admissible) {
      interventional.constraints.push_back(
          empirical_averages(clamped, ConstraintTemplate{ConstraintKind::interventional, {}, v, {}}));
    } else {
      interventional.constraints.push_back(cond);
    }
  }
  io::write_json(dir / "constraints_conditional.json", io::constraints_to_json(conditional));
  io::write_json(dir / "constraints_interventional.json", io::constraints_to_json(interventional));
  std::cout << "wrote " << dir.string() << " (D=" << d << ", n=" << n << " per dataset)\n";
  return kExitOk;
}

// --- fit -------------------------------------------------------------------

int cmd_fit(const CommonFlags& f, const FitFlags& ff) {
  const auto constraints = io::load(ff.constraints, io::constraints_from_json);
  JointTable px;
  if (!ff.joint.empty()) {
    px = io::load(ff.joint, io::joint_from_json);
  } else {
    px = merge_marginals_maxent(io::load(ff.marginals, io::marginals_from_json));
  }
  if (px.n_causes() != constraints.n_causes) {
    throw io::SchemaError("P(X) covers " + std::to_string(px.n_causes()) + " causes but the constraints " +
                          std::to_string(constraints.n_causes));
  }
  GraphSpec graph(constraints.n_causes, {});
  if (!ff.graph.empty()) graph = io::load(ff.graph, io::graph_from_json).graph;
  if (graph.n_causes() != constraints.n_causes) throw io::SchemaError("graph and constraints disagree on D");

  const SolverOptions options = solver_options(f);
  if (!px.strictly_positive()) px = smooth_joint(px, options.epsilon_smoothing);
  const FitResult result = fit(constraints.constraints, px, graph, options);

  const fs::path dir = output_dir(f.out);
  io::write_json(dir / "model.json", io::model_to_json(result));
  const auto& r = result.report;
  std::cout << "residual_norm " << r.residual_norm << "\nrestarts " << r.restarts << "\nconverged "
            << (r.converged ? "true" : "false") << "\nconditional_entropy " << r.conditional_entropy << '\n';
  return r.converged ? kExitOk : kExitNotConverged;
}

// --- experiments -----------------------------------------------------------

int cmd_setting1(const CommonFlags& f) {
  const auto config = experiment_config(f, 100);
  const auto rows = bench::run_setting1(config);
  write_csv(output_dir(f.out) / "setting1.csv", bench::write_setting1_csv, rows);
  for (const auto method : {bench::Method::icmaxent, bench::Method::cmaxent}) {
    for (const auto px : {bench::PxMode::exact, bench::PxMode::marginals}) {
      std::cout << "AUC " << bench::to_string(method) << ' ' << bench::to_string(px) << ' '
                << fixed(bench::auc(rows, method, px)) << '\n';
    }
  }
  return kExitOk;
}

int cmd_setting2(const CommonFlags& f) {
  const auto config = experiment_config(f, 100);
  const auto rows = bench::run_setting2(config);
  write_csv(output_dir(f.out) / "setting2.csv", bench::write_setting2_csv, rows);
  const std::size_t pool = bench::admissible_pool(config.structure).size();
  for (std::size_t k = 0; k <= pool; ++k) std::cout << "AUC k=" << k << ' ' << fixed(bench::auc(rows, k)) << '\n';
  return kExitOk;
}

int cmd_joint(const CommonFlags& f) {
  const auto config = experiment_config(f, 1000);
  const auto rows = bench::run_joint(config);
  write_csv(output_dir(f.out) / "joint.csv", bench::write_joint_csv, rows);
  for (int s = 1; s <= bench::kJointScenarios; ++s) {
    std::vector<double> abs_res;
    std::vector<double> res;
    for (const auto& r : rows) {
      if (r.scenario != s) continue;
      abs_res.push_back(std::abs(r.residual));
      res.push_back(r.residual);
    }
    std::cout << "scenario " << s << " median|residual| " << fixed(bench::median(abs_res)) << " IQR "
              << fixed(bench::interquartile_range(res)) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-entropy causal models from mixed observational and interventional averages"};
  app.require_subcommand(1);

  CommonFlags flags;
  FitFlags fit_flags;

  auto* gen = app.add_subcommand("gen", "Sample one SCM and write its graph, data and constraint files");
  gen->add_option("--structure", flags.structure, "a, b, c or a graph file")->capture_default_str();
  gen->add_option("--n-samples", flags.n_samples, "Rows per dataset (default 100)")->check(CLI::PositiveNumber);
  gen->add_option("--seed", flags.seed, "Seed")->capture_default_str();
  gen->add_option("--out", flags.out, "Output directory")->capture_default_str();
  gen->add_flag("--allow-unidentifiable", flags.allow_unidentifiable,
                "Write interventional constraints even where the gate refuses them");

  auto* fit_cmd = app.add_subcommand("fit", "Fit one constraint file");
  fit_cmd->add_option("--constraints", fit_flags.constraints, "Constraint file")->required()->check(CLI::ExistingFile);
  auto* joint_opt = fit_cmd->add_option("--joint", fit_flags.joint, "Joint P(X) file")->check(CLI::ExistingFile);
  auto* marg_opt =
      fit_cmd->add_option("--marginals", fit_flags.marginals, "Marginals file (merged by MAXENT)")->check(CLI::ExistingFile);
  joint_opt->excludes(marg_opt);
  fit_cmd->add_option("--graph", fit_flags.graph, "Graph file (default: no edges)")->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", flags.out, "Output directory for model.json")->capture_default_str();
  add_solver_flags(fit_cmd, flags);

  auto* s1 = app.add_subcommand("setting1", "Feature selection, all causes intervened");
  add_experiment_flags(s1, flags, 100);
  auto* s2 = app.add_subcommand("setting2", "Feature selection, k of the admissible causes intervened");
  add_experiment_flags(s2, flags, 100);
  auto* joint = app.add_subcommand("joint", "Joint interventional estimation from single interventions");
  add_experiment_flags(joint, flags, 1000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen) return cmd_gen(flags);
    if (*fit_cmd) {
      if (fit_flags.joint.empty() && fit_flags.marginals.empty()) {
        std::cerr << "error: fit needs --joint or --marginals\n";
        return kExitInput;
      }
      return cmd_fit(flags, fit_flags);
    }
    if (*s1) return cmd_setting1(flags);
    if (*s2) return cmd_setting2(flags);
    if (*joint) return cmd_joint(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
