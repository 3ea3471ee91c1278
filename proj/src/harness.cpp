#include "rtmg/harness.hpp"

#include "rtmg/norms.hpp"
#include "rtmg/spaces.hpp"

#include <Eigen/SparseLU>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <string>

namespace rtmg {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

int parse_int(std::string_view text) {
  int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("not an integer: '" + std::string(text) + "'");
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

Vector solve_sparse_lu(const SparseMatrix& k, const Vector& load) {
  Eigen::SparseMatrix<double> a = k;
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage(), {});
  return lu.solve(load);
}

}  // namespace

ProblemKind parse_problem(std::string_view name) {
  if (name == "darcy") return ProblemKind::darcy;
  if (name == "cd" || name == "general") return ProblemKind::general;
  throw ConfigError("unknown problem '" + std::string(name) + "' (expected darcy or cd)");
}

std::string_view to_string(ProblemKind kind) { return kind == ProblemKind::darcy ? "darcy" : "cd"; }

CycleType parse_cycle(std::string_view name) {
  if (name == "w" || name == "W") return CycleType::W;
  if (name == "v" || name == "V") return CycleType::V;
  throw ConfigError("unknown cycle '" + std::string(name) + "' (expected w or v)");
}

std::string_view to_string(CycleType cycle) { return cycle == CycleType::W ? "W" : "V"; }

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "md" || name == "markdown") return OutputFormat::markdown;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or md)");
}

std::pair<int, int> parse_level_range(std::string_view text) {
  text = trim(text);
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const int k = parse_int(text);
    return {k, k};
  }
  return {parse_int(trim(text.substr(0, dots))), parse_int(trim(text.substr(dots + 2)))};
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_int(trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void ExperimentSpec::validate() const {
  if (level_min < 1 || level_max > 7 || level_min > level_max) {
    throw ConfigError("levels must satisfy 1 <= A <= B <= 7 (got " + std::to_string(level_min) + ".." +
                      std::to_string(level_max) + ")");
  }
  if (kind == ExperimentKind::contraction && m_values.empty()) throw ConfigError("no smoothing counts given");
  for (int m : m_values) {
    if (m <= 0) throw ConfigError("smoothing counts must be positive");
  }
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (max_cycles <= 0) throw ConfigError("max_cycles must be positive");
}

ExperimentSpec default_spec(ExperimentKind kind, DomainTag domain, ProblemKind problem) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.domain = domain;
  spec.problem = problem;
  spec.expected_alpha = domain == DomainTag::l_shape ? 2.0 / 3.0 : 1.0;
  if (kind == ExperimentKind::contraction) {
    spec.level_min = 1;
    spec.level_max = 6;
  }
  return spec;
}

double convergence_rate(double previous, double current) { return std::log2(previous / current); }

std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec) {
  spec.validate();
  auto spaces = std::make_shared<SpaceHierarchy>(spec.domain, spec.level_max);
  const ProblemSpec problem = make_problem(spec.domain, spec.problem);
  const ExactSolution exact = make_exact(spec.domain, spec.problem);

  std::optional<MGState> state;
  if (spec.solver == ConvergenceSolver::multigrid) {
    MGConfig cfg;
    cfg.cycle = spec.cycle;
    cfg.power_iter.seed = spec.seed;
    state = setup(spaces, problem, cfg);
  }

  std::vector<ConvergenceRow> rows;
  for (int k = spec.level_min; k <= spec.level_max; ++k) {
    const RTSpace& rt = spaces->rt(k);
    const DGSpace& dg = spaces->dg(k);
    const BlockVector load = assemble_rhs(rt, dg, problem.f);
    ConvergenceRow row;
    row.level = k;
    row.h = spaces->mesh(k).h_grid;
    Vector x;
    if (state) {
      try {
        SolveResult r = solve(*state, k, load.data(), spec.tol, spec.max_cycles);
        x = std::move(r.x);
        row.history = std::move(r.history);
      } catch (const SolverError& e) {
        throw SolverError("level " + std::to_string(k) + ": " + e.what(), e.history());
      }
    } else {
      x = solve_sparse_lu(assemble_saddle(rt, dg, problem).K, load.data());
    }
    const int nv = rt.dim();
    const ErrorReport err = error_norms(rt, dg, as_span(x.head(nv)), as_span(x.tail(x.size() - nv)), exact);
    row.e_u = err.e_u;
    row.e_p = err.e_p;
    if (!rows.empty()) {
      row.rate_u = convergence_rate(rows.back().e_u, row.e_u);
      row.rate_p = convergence_rate(rows.back().e_p, row.e_p);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ContractionTable run_contraction(const ExperimentSpec& spec) {
  spec.validate();
  auto spaces = std::make_shared<SpaceHierarchy>(spec.domain, spec.level_max);
  MGConfig cfg;
  cfg.cycle = spec.cycle;
  cfg.power_iter.seed = spec.seed;
  const MGState base = setup(spaces, make_problem(spec.domain, spec.problem), cfg);

  ContractionTable table;
  table.cycle = spec.cycle;
  table.level_min = spec.level_min;
  table.level_max = spec.level_max;
  for (int m : spec.m_values) {
    const MGState state = base.with_smoothing(m, m, spec.cycle);
    ContractionRow row;
    row.m = m;
    for (int k = spec.level_min; k <= spec.level_max; ++k) {
      ContractionCell cell;
      try {
        ContractionResult r = contraction_number(state, k);
        cell.value = r.value;
        cell.iterations = r.iterations;
        cell.ratios = std::move(r.ratios);
      } catch (const SolverError& e) {
        cell.error = e.what();
        cell.ratios = e.history();
      }
      row.cells.push_back(std::move(cell));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void emit(const std::vector<ConvergenceRow>& rows, OutputFormat format, std::ostream& out) {
  if (rows.empty()) throw ConfigError("nothing to emit");
  auto opt = [](const std::optional<double>& r, bool md) {
    if (!r) return std::string();
    return md ? fixed(*r, 3) : sci(*r);
  };
  if (format == OutputFormat::csv) {
    out << "h,e_u,rate_u,e_p,rate_p\n";
    for (const auto& r : rows) {
      out << sci(r.h) << ',' << sci(r.e_u) << ',' << opt(r.rate_u, false) << ',' << sci(r.e_p) << ','
          << opt(r.rate_p, false) << '\n';
    }
    return;
  }
  out << "| h | e_u | rate | e_p | rate |\n|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| 1/" << std::lround(1.0 / r.h) << " | " << sci(r.e_u) << " | " << opt(r.rate_u, true) << " | "
        << sci(r.e_p) << " | " << opt(r.rate_p, true) << " |\n";
  }
}

void emit(const ContractionTable& table, OutputFormat format, std::ostream& out) {
  if (table.rows.empty()) throw ConfigError("nothing to emit");
  auto value = [&](const ContractionCell& c) {
    if (!c.value) return std::string(format == OutputFormat::csv ? "" : "n/a");
    return format == OutputFormat::csv ? sci(*c.value) : fixed(*c.value, 2);
  };
  if (format == OutputFormat::csv) {
    out << 'm';
    for (int k = table.level_min; k <= table.level_max; ++k) out << ",k=" << k;
    out << '\n';
    for (const auto& row : table.rows) {
      out << row.m;
      for (const auto& c : row.cells) out << ',' << value(c);
      out << '\n';
    }
    return;
  }
  out << "| " << to_string(table.cycle) << "-cycle |";
  for (int k = table.level_min; k <= table.level_max; ++k) out << " k=" << k << " |";
  out << "\n|---|";
  for (int k = table.level_min; k <= table.level_max; ++k) out << "---|";
  out << '\n';
  for (const auto& row : table.rows) {
    out << "| m=" << row.m << " |";
    for (const auto& c : row.cells) out << ' ' << value(c) << " |";
    out << '\n';
  }
}

void emit_plot_data(const ContractionTable& table, std::ostream& out) {
  for (int k = table.level_min; k <= table.level_max; ++k) {
    if (k > table.level_min) out << '\n';
    out << "# level " << k << "\n# m contraction\n";
    for (const auto& row : table.rows) {
      const auto& c = row.cells[k - table.level_min];
      if (c.value) out << row.m << ' ' << sci(*c.value) << '\n';
    }
  }
}

}  // namespace rtmg

namespace rtmg {

std::optional<ReferenceConvergence> reference_convergence(DomainTag domain, ProblemKind problem) {
  if (domain == DomainTag::unit_square && problem == ProblemKind::darcy) {
    return ReferenceConvergence{{4.213e-2, 1.026e-2, 2.529e-3, 6.281e-4, 1.565e-4, 3.905e-5},
                                {3.462e-1, 1.722e-1, 8.594e-2, 4.297e-2, 2.149e-2, 1.074e-2}};
  }
  if (domain == DomainTag::unit_square) {
    return ReferenceConvergence{{9.188e-2, 2.345e-2, 5.904e-3, 1.480e-3, 3.705e-4, 9.268e-5},
                                {3.492e-1, 1.727e-1, 8.600e-2, 4.298e-2, 2.150e-2, 1.075e-2}};
  }
  if (problem == ProblemKind::darcy) {
    return ReferenceConvergence{{1.121e-1, 6.654e-2, 4.144e-2, 2.605e-2, 1.640e-2, 1.033e-2},
                                {1.131e-1, 5.964e-2, 3.244e-2, 1.818e-2, 1.048e-2, 6.186e-3}};
  }
  return ReferenceConvergence{{1.306e-1, 7.025e-2, 4.231e-2, 2.629e-2, 1.647e-2, 1.035e-2},
                              {1.156e-1, 6.023e-2, 3.260e-2, 1.823e-2, 1.049e-2, 6.191e-3}};
}

std::optional<ReferenceContraction> reference_contraction(DomainTag domain, ProblemKind problem,
                                                          CycleType cycle) {
  const bool darcy = problem == ProblemKind::darcy;
  if (domain == DomainTag::unit_square && cycle == CycleType::W) {
    if (darcy) {
      return ReferenceContraction{{10, {0.80, 0.81, 0.81, 0.81, 0.81, 0.81}},
                                  {20, {0.66, 0.67, 0.67, 0.67, 0.67, 0.67}},
                                  {40, {0.47, 0.48, 0.48, 0.48, 0.48, 0.48}},
                                  {80, {0.24, 0.24, 0.24, 0.24, 0.24, 0.24}}};
    }
    return ReferenceContraction{{10, {0.80, 0.81, 0.81, 0.81, 0.81, 0.81}},
                                {20, {0.67, 0.68, 0.67, 0.67, 0.67, 0.67}},
                                {40, {0.48, 0.48, 0.48, 0.48, 0.48, 0.48}},
                                {80, {0.24, 0.24, 0.24, 0.24, 0.24, 0.25}}};
  }
  if (domain == DomainTag::unit_square) {
    if (darcy) {
      return ReferenceContraction{{10, {0.80, 0.82, 0.81, 0.82, 0.82, 0.82}},
                                  {20, {0.66, 0.68, 0.68, 0.68, 0.68, 0.68}},
                                  {40, {0.47, 0.48, 0.48, 0.48, 0.48, 0.48}},
                                  {80, {0.24, 0.25, 0.25, 0.25, 0.25, 0.25}}};
    }
    return ReferenceContraction{{10, {0.80, 0.82, 0.82, 0.82, 0.82, 0.82}},
                                {20, {0.67, 0.68, 0.68, 0.68, 0.68, 0.68}},
                                {40, {0.48, 0.49, 0.49, 0.49, 0.49, 0.49}},
                                {80, {0.24, 0.25, 0.25, 0.25, 0.25, 0.25}}};
  }
  if (cycle == CycleType::V) return std::nullopt;
  if (darcy) {
    return ReferenceContraction{{10, {0.81, 0.82, 0.82, 0.82, 0.82, 0.82}},
                                {20, {0.70, 0.70, 0.70, 0.70, 0.70, 0.70}},
                                {40, {0.51, 0.51, 0.51, 0.51, 0.51, 0.51}},
                                {80, {0.28, 0.28, 0.28, 0.28, 0.28, 0.28}}};
  }
  return ReferenceContraction{{10, {0.81, 0.82, 0.82, 0.82, 0.82, 0.82}},
                              {20, {0.70, 0.70, 0.70, 0.70, 0.70, 0.70}},
                              {40, {0.52, 0.52, 0.52, 0.52, 0.52, 0.52}},
                              {80, {0.29, 0.29, 0.29, 0.29, 0.29, 0.29}}};
}

namespace {

bool report(std::ostream& out, bool ok, const std::string& what) {
  out << (ok ? "PASS " : "FAIL ") << what << '\n';
  return ok;
}

}  // namespace

bool check_convergence(const std::vector<ConvergenceRow>& rows, const ExperimentSpec& spec,
                       std::ostream& out) {
  const auto ref = reference_convergence(spec.domain, spec.problem);
  const bool square = spec.domain == DomainTag::unit_square;
  const double rel_tol = square ? 0.02 : 0.05;
  bool all = true;
  for (const auto& r : rows) {
    const int i = r.level - 2;
    const std::string at = " at h=1/" + std::to_string(std::lround(1.0 / r.h));
    if (ref && i >= 0 && i < 6) {
      const double du = std::abs(r.e_u / ref->e_u[i] - 1.0);
      const double dp = std::abs(r.e_p / ref->e_p[i] - 1.0);
      all &= report(out, du <= rel_tol, "e_u" + at + ": " + sci(r.e_u) + " vs " + sci(ref->e_u[i]));
      all &= report(out, dp <= rel_tol, "e_p" + at + ": " + sci(r.e_p) + " vs " + sci(ref->e_p[i]));
    }
    if (square && r.level >= 4 && r.rate_u && r.rate_p) {
      all &= report(out, std::abs(*r.rate_u - 2.0) <= 0.05, "rate_u" + at + ": " + fixed(*r.rate_u, 3));
      all &= report(out, std::abs(*r.rate_p - 1.0) <= 0.02, "rate_p" + at + ": " + fixed(*r.rate_p, 3));
    }
  }
  return all;
}

bool check_contraction(const ContractionTable& table, const ExperimentSpec& spec, std::ostream& out) {
  const auto ref = reference_contraction(spec.domain, spec.problem, table.cycle);
  bool all = true;
  for (const auto& row : table.rows) {
    double lo = 1e300, hi = -1e300;
    for (int k = table.level_min; k <= table.level_max; ++k) {
      const auto& c = row.cells[k - table.level_min];
      const std::string at = "m=" + std::to_string(row.m) + " k=" + std::to_string(k);
      if (!c.value) {
        all &= report(out, false, "contraction " + at + ": " + c.error);
        continue;
      }
      if (k >= 2) {
        lo = std::min(lo, *c.value);
        hi = std::max(hi, *c.value);
      }
      if (ref && ref->count(row.m) && k <= 6) {
        const double expected = ref->at(row.m)[k - 1];
        all &= report(out, std::abs(*c.value - expected) <= 0.08,
                      "contraction " + at + ": " + fixed(*c.value, 3) + " vs " + fixed(expected, 2));
      }
    }
    if (hi >= lo) {
      all &= report(out, hi - lo <= 0.03,
                    "level spread m=" + std::to_string(row.m) + ": " + fixed(hi - lo, 4));
    }
  }
  return all;
}

}  // namespace rtmg
