#pragma once

#include "rtmg/assembly.hpp"
#include "rtmg/mesh.hpp"
#include "rtmg/multigrid.hpp"

#include <cstdint>
#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtmg {

enum class ExperimentKind { convergence, contraction };
enum class OutputFormat { csv, markdown };
enum class ConvergenceSolver { direct, multigrid };

ProblemKind parse_problem(std::string_view name);  // "darcy" | "cd"
std::string_view to_string(ProblemKind kind);
CycleType parse_cycle(std::string_view name);  // "w" | "v"
std::string_view to_string(CycleType cycle);
OutputFormat parse_format(std::string_view name);  // "csv" | "md"

/// Parses "A..B" or a single level "A".
std::pair<int, int> parse_level_range(std::string_view text);
/// Parses a comma-separated list of positive integers.
std::vector<int> parse_int_list(std::string_view text);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::convergence;
  DomainTag domain = DomainTag::unit_square;
  ProblemKind problem = ProblemKind::darcy;
  CycleType cycle = CycleType::W;
  int level_min = 2;
  int level_max = 6;
  std::vector<int> m_values = {10, 20, 40, 80};
  double tol = 1e-10;
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 20240101;
  /// Only used for convergence runs.
  ConvergenceSolver solver = ConvergenceSolver::direct;
  int max_cycles = 200;
  double expected_alpha = 1.0;

  /// Throws ConfigError unless 1 <= level_min <= level_max <= 7, all m > 0
  /// and tol > 0.
  void validate() const;
};

/// Defaults that reproduce one of the published tables.
ExperimentSpec default_spec(ExperimentKind kind, DomainTag domain, ProblemKind problem);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double e_u = 0.0;
  double e_p = 0.0;
  std::optional<double> rate_u;
  std::optional<double> rate_p;
  /// Multigrid residual history (empty for direct solves).
  std::vector<double> history;
};

struct ContractionCell {
  std::optional<double> value;
  int iterations = 0;
  std::vector<double> ratios;
  std::string error;
};

struct ContractionRow {
  int m = 0;
  std::vector<ContractionCell> cells;  // one per level, level_min .. level_max
};

struct ContractionTable {
  CycleType cycle = CycleType::W;
  int level_min = 1;
  int level_max = 1;
  std::vector<ContractionRow> rows;
};

/// log2(previous / current).
double convergence_rate(double previous, double current);

/// Solves each level, evaluates the mesh-dependent errors and fills rates.
/// A multigrid failure is rethrown as SolverError naming the level.
std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec);

/// Contraction number for every (m, k); failures are stored per cell.
ContractionTable run_contraction(const ExperimentSpec& spec);

void emit(const std::vector<ConvergenceRow>& rows, OutputFormat format, std::ostream& out);
void emit(const ContractionTable& table, OutputFormat format, std::ostream& out);

/// Two columns "m contraction" per level, blocks separated by a blank line.
void emit_plot_data(const ContractionTable& table, std::ostream& out);

/// Reference errors for h = 1/4 .. 1/128 (levels 2..7).
struct ReferenceConvergence {
  std::array<double, 6> e_u;
  std::array<double, 6> e_p;
};
std::optional<ReferenceConvergence> reference_convergence(DomainTag domain, ProblemKind problem);

/// Reference contraction numbers for k = 1..6, keyed by m.
using ReferenceContraction = std::map<int, std::array<double, 6>>;
std::optional<ReferenceContraction> reference_contraction(DomainTag domain, ProblemKind problem,
                                                          CycleType cycle);

/// Compares against the reference tables (errors within 2% on the square and
/// 5% on the L-shape; rates within 0.05 / 0.02 of 2 / 1 on the square from
/// level 4 on), printing one PASS/FAIL line per check. Returns true if all pass.
bool check_convergence(const std::vector<ConvergenceRow>& rows, const ExperimentSpec& spec,
                       std::ostream& out);

/// Contraction numbers within 0.08 of the reference and varying by at most
/// 0.03 across levels >= 2 for each m.
bool check_contraction(const ContractionTable& table, const ExperimentSpec& spec, std::ostream& out);

}  // namespace rtmg
