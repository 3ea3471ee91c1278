// Command-line driver for the convergence and contraction experiments.
//
//   rtmg convergence --domain square --problem darcy --levels 2..6
//   rtmg contraction --domain lshape --cycle w --m 10,20,40,80 --format md

#include "rtmg/assembly.hpp"
#include "rtmg/harness.hpp"
#include "rtmg/norms.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace {

struct Options {
  std::string domain = "square";
  std::string problem = "darcy";
  std::string cycle = "w";
  std::string levels;
  std::string m_list = "10,20,40,80";
  std::string format = "csv";
  std::string out_path;
  std::string plot_path;
  std::string solver = "direct";
  std::string dump_mesh;
  std::string dump_matrices;
  double tol = 1e-10;
  std::uint64_t seed = 20240101;
  bool history = false;
  bool deep = false;
  bool check = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--domain", o.domain, "square | lshape")->capture_default_str();
  cmd->add_option("--problem", o.problem, "darcy | cd")->capture_default_str();
  cmd->add_option("--cycle", o.cycle, "w | v")->capture_default_str();
  cmd->add_option("--levels", o.levels, "level range A..B (1 <= A <= B <= 7)");
  cmd->add_option("--tol", o.tol, "solver tolerance")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for the power iterations")->capture_default_str();
  cmd->add_option("--format", o.format, "csv | md")->capture_default_str();
  cmd->add_option("--out", o.out_path, "output file (default: stdout)");
  cmd->add_option("--dump-mesh", o.dump_mesh, "write the finest mesh to this file");
  cmd->add_option("--dump-matrices", o.dump_matrices, "write K of the finest level to this file");
  cmd->add_flag("--history", o.history, "print residual or ratio histories to stderr");
  cmd->add_flag("--check", o.check, "compare with the reference tables; exit 1 on a mismatch");
}

rtmg::ExperimentSpec make_spec(rtmg::ExperimentKind kind, const Options& o) {
  using namespace rtmg;
  ExperimentSpec spec = default_spec(kind, parse_domain(o.domain), parse_problem(o.problem));
  spec.cycle = parse_cycle(o.cycle);
  spec.format = parse_format(o.format);
  spec.tol = o.tol;
  spec.seed = o.seed;
  if (kind == ExperimentKind::convergence && o.deep) spec.level_max = 7;
  if (!o.levels.empty()) std::tie(spec.level_min, spec.level_max) = parse_level_range(o.levels);
  if (kind == ExperimentKind::contraction) spec.m_values = parse_int_list(o.m_list);
  if (o.solver == "mg") {
    spec.solver = ConvergenceSolver::multigrid;
  } else if (o.solver != "direct") {
    throw ConfigError("unknown solver '" + o.solver + "' (expected direct or mg)");
  }
  spec.validate();
  return spec;
}

void dump_debug(const rtmg::ExperimentSpec& spec, const Options& o) {
  using namespace rtmg;
  if (o.dump_mesh.empty() && o.dump_matrices.empty()) return;
  const SpaceHierarchy spaces(spec.domain, spec.level_max);
  const int k = spec.level_max;
  if (!o.dump_mesh.empty()) {
    std::ofstream f(o.dump_mesh);
    if (!f) throw ConfigError("cannot write " + o.dump_mesh);
    write_mesh(f, spaces.mesh(k));
  }
  if (!o.dump_matrices.empty()) {
    std::ofstream f(o.dump_matrices);
    if (!f) throw ConfigError("cannot write " + o.dump_matrices);
    write_matrix(f, assemble_saddle(spaces.rt(k), spaces.dg(k), make_problem(spec.domain, spec.problem)).K);
  }
}

// Runs `write` against --out or stdout.
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw rtmg::ConfigError("cannot write " + path);
  write(f);
}

int run_convergence_cmd(const Options& o) {
  using namespace rtmg;
  const ExperimentSpec spec = make_spec(ExperimentKind::convergence, o);
  dump_debug(spec, o);
  const auto rows = run_convergence(spec);
  with_output(o.out_path, [&](std::ostream& out) { emit(rows, spec.format, out); });
  if (o.history) {
    for (const auto& r : rows) {
      std::cerr << "level " << r.level << ":";
      for (double h : r.history) std::cerr << ' ' << h;
      std::cerr << '\n';
    }
  }
  if (o.check && !check_convergence(rows, spec, std::cerr)) return 1;
  return 0;
}

int run_contraction_cmd(const Options& o) {
  using namespace rtmg;
  const ExperimentSpec spec = make_spec(ExperimentKind::contraction, o);
  dump_debug(spec, o);
  const ContractionTable table = run_contraction(spec);
  with_output(o.out_path, [&](std::ostream& out) { emit(table, spec.format, out); });
  if (!o.plot_path.empty()) {
    with_output(o.plot_path, [&](std::ostream& out) { emit_plot_data(table, out); });
  }
  for (const auto& row : table.rows) {
    for (int k = table.level_min; k <= table.level_max; ++k) {
      const auto& c = row.cells[k - table.level_min];
      if (!c.error.empty()) std::cerr << "m=" << row.m << " k=" << k << ": " << c.error << '\n';
      if (o.history) {
        std::cerr << "m=" << row.m << " k=" << k << " ratios:";
        for (double r : c.ratios) std::cerr << ' ' << r;
        std::cerr << '\n';
      }
    }
  }
  if (o.check && !check_contraction(table, spec, std::cerr)) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RT1 mixed finite elements with block-preconditioned multigrid"};
  app.require_subcommand(1);
  Options o;

  auto* conv = app.add_subcommand("convergence", "discretization errors and rates per level");
  add_common(conv, o);
  conv->add_option("--solver", o.solver, "direct | mg")->capture_default_str();
  conv->add_flag("--deep", o.deep, "extend the default level range to 7 (h = 1/128)");

  auto* contr = app.add_subcommand("contraction", "multigrid contraction numbers");
  add_common(contr, o);
  contr->add_option("--m", o.m_list, "comma-separated smoothing counts")->capture_default_str();
  contr->add_option("--plot", o.plot_path, "write (m, contraction) plot data per level");

  CLI11_PARSE(app, argc, argv);
  try {
    if (conv->parsed()) return run_convergence_cmd(o);
    return run_contraction_cmd(o);
  } catch (const rtmg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
