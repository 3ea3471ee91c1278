// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include "rtmg/assembly.hpp"
#include "rtmg/harness.hpp"
#include "rtmg/multigrid.hpp"
#include "rtmg/norms.hpp"
#include "rtmg/quadrature.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

namespace {

using namespace rtmg;

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  // Records one sub-check; returns ok.
  bool expect(bool ok, const std::string& what) {
    details_ << "    " << (ok ? "ok   " : "miss ") << what << '\n';
    all_ &= ok;
    return ok;
  }
  void note(const std::string& what) { details_ << "    " << what << '\n'; }

  bool finish() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::cout << (all_ ? "PASS" : "FAIL") << " criterion " << id_ << ": " << title_ << " (" << fmt(secs, 1)
              << " s)\n"
              << details_.str() << std::flush;
    return all_;
  }

  static std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
  }
  static std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }

 private:
  int id_;
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  std::ostringstream details_;
  bool all_ = true;
};

using C = Criterion;

Vector random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

std::array<double, 3> random_bary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double a = d(rng), b = d(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return {1.0 - a - b, a, b};
}

std::vector<ConvergenceRow> convergence(DomainTag d, ProblemKind p) {
  ExperimentSpec spec = default_spec(ExperimentKind::convergence, d, p);
  spec.level_min = 2;
  spec.level_max = 6;
  return run_convergence(spec);
}

// Value check against a reference list starting at h = 1/4.
void check_values(Criterion& c, const std::vector<ConvergenceRow>& rows, const std::array<double, 6>& ref,
                  bool velocity, double rel) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double got = velocity ? rows[i].e_u : rows[i].e_p;
    const double dev = std::abs(got / ref[i] - 1.0);
    c.expect(dev <= rel, std::string(velocity ? "e_u" : "e_p") + " h=1/" + std::to_string(std::lround(1 / rows[i].h)) +
                             ": " + C::sci(got) + " vs " + C::sci(ref[i]) + " (" + C::fmt(100 * dev, 1) + "%)");
  }
}

void check_rates(Criterion& c, const std::vector<ConvergenceRow>& rows, bool velocity, double target, double tol,
                 double h_from) {
  for (const auto& r : rows) {
    if (!r.rate_u || r.h > h_from * (1 + 1e-12)) continue;
    const double rate = velocity ? *r.rate_u : *r.rate_p;
    c.expect(std::abs(rate - target) <= tol, std::string(velocity ? "rate_u" : "rate_p") + " h=1/" +
                                                 std::to_string(std::lround(1 / r.h)) + ": " + C::fmt(rate, 3) +
                                                 " (target " + C::fmt(target, 3) + " +- " + C::fmt(tol, 3) + ")");
  }
}

bool criterion1() {
  Criterion c(1, "Darcy unit-square convergence");
  const auto rows = convergence(DomainTag::unit_square, ProblemKind::darcy);
  const auto ref = *reference_convergence(DomainTag::unit_square, ProblemKind::darcy);
  check_values(c, rows, ref.e_u, true, 0.02);
  check_values(c, rows, ref.e_p, false, 0.02);
  check_rates(c, rows, true, 2.0, 0.05, 1.0 / 16);
  check_rates(c, rows, false, 1.0, 0.02, 1.0 / 16);
  return c.finish();
}

bool criterion2() {
  Criterion c(2, "convection-diffusion unit-square convergence");
  const auto rows = convergence(DomainTag::unit_square, ProblemKind::general);
  const auto ref = *reference_convergence(DomainTag::unit_square, ProblemKind::general);
  check_values(c, rows, ref.e_u, true, 0.02);
  check_rates(c, rows, true, 2.0, 0.05, 1.0 / 16);
  check_rates(c, rows, false, 1.0, 0.02, 1.0 / 16);
  return c.finish();
}

bool criterion3() {
  Criterion c(3, "Darcy L-shape convergence");
  const auto rows = convergence(DomainTag::l_shape, ProblemKind::darcy);
  const auto ref = *reference_convergence(DomainTag::l_shape, ProblemKind::darcy);
  check_values(c, rows, ref.e_u, true, 0.05);
  c.expect(std::abs(*rows.back().rate_u - 2.0 / 3.0) <= 0.015,
           "rate_u h=1/64: " + C::fmt(*rows.back().rate_u, 4) + " (target 0.667 +- 0.015)");
  const double p_ref[] = {0.923, 0.879, 0.835, 0.795};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r = *rows[i].rate_p;
    c.expect(std::abs(r - p_ref[i - 1]) <= 0.03,
             "rate_p h=1/" + std::to_string(std::lround(1 / rows[i].h)) + ": " + C::fmt(r, 3) + " vs " + C::fmt(p_ref[i - 1], 3));
    if (i > 1) c.expect(r < *rows[i - 1].rate_p, "rate_p decreasing at h=1/" + std::to_string(std::lround(1 / rows[i].h)));
  }
  return c.finish();
}

ContractionTable contraction(DomainTag d, CycleType cycle, std::vector<int> m) {
  ExperimentSpec spec = default_spec(ExperimentKind::contraction, d, ProblemKind::darcy);
  spec.cycle = cycle;
  spec.level_min = 2;
  spec.level_max = 5;
  spec.m_values = std::move(m);
  return run_contraction(spec);
}

// value[m][k]
using Values = std::map<int, std::map<int, double>>;

Values values_of(Criterion& c, const ContractionTable& t, const std::string& label) {
  Values v;
  for (const auto& row : t.rows) {
    std::string line = label + " m=" + std::to_string(row.m) + ":";
    for (int k = t.level_min; k <= t.level_max; ++k) {
      const auto& cell = row.cells[k - t.level_min];
      if (cell.value) {
        v[row.m][k] = *cell.value;
        line += " " + C::fmt(*cell.value, 3);
      } else {
        c.expect(false, label + " m=" + std::to_string(row.m) + " k=" + std::to_string(k) + ": " + cell.error);
      }
    }
    c.note(line);
  }
  return v;
}

bool criterion4(Values& square_w) {
  Criterion c(4, "W-cycle contraction, Darcy unit square");
  const ContractionTable t = contraction(DomainTag::unit_square, CycleType::W, {10, 20, 40, 80});
  square_w = values_of(c, t, "W square");
  const std::map<int, double> ref = {{10, 0.81}, {20, 0.67}, {40, 0.48}, {80, 0.24}};
  for (const auto& [m, by_k] : square_w) {
    double lo = 1e300, hi = -1e300, worst = 0.0;
    for (const auto& [k, v] : by_k) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      worst = std::max(worst, std::abs(v - ref.at(m)));
    }
    c.expect(worst <= 0.08, "m=" + std::to_string(m) + " max deviation from " + C::fmt(ref.at(m), 2) + ": " + C::fmt(worst, 3));
    c.expect(hi - lo <= 0.03, "m=" + std::to_string(m) + " spread across k: " + C::fmt(hi - lo, 4));
  }
  for (int k = 2; k <= 5; ++k) {
    if (!square_w[40].count(k) || !square_w[80].count(k)) continue;
    const double r = square_w[80][k] / square_w[40][k];
    c.expect(r >= 0.35 && r <= 0.65, "k=" + std::to_string(k) + " c(80)/c(40) = " + C::fmt(r, 3));
  }
  return c.finish();
}

bool criterion5(const Values& square_w) {
  Criterion c(5, "contraction ordering (L-shape vs square, V vs W)");
  const Values l_w = values_of(c, contraction(DomainTag::l_shape, CycleType::W, {40, 80}), "W L-shape");
  for (const auto& [m, by_k] : l_w) {
    for (const auto& [k, v] : by_k) {
      const double sq = square_w.at(m).at(k);
      c.expect(v >= sq, "m=" + std::to_string(m) + " k=" + std::to_string(k) + ": L-shape " + C::fmt(v, 4) +
                            " >= square " + C::fmt(sq, 4) + " (diff " + C::fmt(v - sq, 4) + ")");
    }
  }
  const Values sq_v = values_of(c, contraction(DomainTag::unit_square, CycleType::V, {10, 20, 40, 80}), "V square");
  for (const auto& [m, by_k] : sq_v) {
    double worst = 0.0;
    for (const auto& [k, v] : by_k) worst = std::max(worst, std::abs(v - square_w.at(m).at(k)));
    c.expect(worst <= 0.05, "m=" + std::to_string(m) + " max |V - W|: " + C::fmt(worst, 4));
  }
  return c.finish();
}

MGState make_state(const std::shared_ptr<const SpaceHierarchy>& spaces, ProblemKind p,
                   std::optional<SystemKind> kind = std::nullopt) {
  return setup(spaces, make_problem(spaces->domain(), p), MGConfig{}, kind);
}

bool criterion6() {
  Criterion c(6, "exact-identity suite");
  constexpr int kSamples = 50;
  std::mt19937_64 rng(20240101);
  const TriangleRule& tr = triangle_rule(6);
  const EdgeRule& er = edge_rule(6);
  double ibp = 0.0, infsup = 0.0, duality = 0.0, adjoint = 0.0, nested = 0.0;

  for (DomainTag d : {DomainTag::unit_square, DomainTag::l_shape}) {
    const auto spaces = std::make_shared<const SpaceHierarchy>(d, 3);
    for (int k = 0; k <= 3; ++k) {
      const RTSpace& rt = spaces->rt(k);
      const DGSpace& dg = spaces->dg(k);
      const TriangleMesh& m = rt.mesh();
      const SparseMatrix b = assemble_b(rt, dg);
      for (int s = 0; s < kSamples; ++s) {
        const Vector v = random_vector(rt.dim(), rng);
        const Vector q = random_vector(dg.dim(), rng);
        double rhs = 0.0, scale = 0.0;
        for (int t = 0; t < m.num_triangles(); ++t) {
          const Vec2 g = dg.grad_eval(as_span(q), t);
          for (std::size_t i = 0; i < tr.points.size(); ++i) {
            const double term = tr.weights[i] * m.area(t) * rt.eval(as_span(v), t, m.map_point(t, tr.points[i])).dot(g);
            rhs += term;
            scale += std::abs(term);
          }
          for (int l = 0; l < 3; ++l) {
            const int e = m.edge_of_triangle[t][l].edge;
            const Vec2 n = m.outward_normal(t, l);
            for (std::size_t i = 0; i < er.points.size(); ++i) {
              const Vec2 x = m.edge_point(e, er.points[i]);
              const double term = er.weights[i] * m.edge_length(e) * dg.eval(as_span(q), t, x) * rt.eval(as_span(v), t, x).dot(n);
              rhs -= term;
              scale += std::abs(term);
            }
          }
        }
        ibp = std::max(ibp, std::abs(q.dot(b * v) - rhs) / scale);

        const Vector w = infsup_witness(as_span(q), rt, dg);
        const double ph2 = std::pow(norm_ph(dg, as_span(q)), 2);
        infsup = std::max(infsup, std::abs(q.dot(b * w) - ph2) / ph2);
      }
      if (k == 0) continue;
      const SparseMatrix prt = injection_matrix_rt(spaces->rt(k - 1), rt);
      const SparseMatrix pdg = injection_matrix_dg(spaces->dg(k - 1), dg);
      for (int s = 0; s < kSamples; ++s) {
        const Vector cv = random_vector(static_cast<int>(prt.cols()), rng);
        const Vector cq = random_vector(static_cast<int>(pdg.cols()), rng);
        const Vector fv = prt * cv, fq = pdg * cq;
        for (int i = 0; i < 4; ++i) {
          const int t = std::uniform_int_distribution<int>(0, m.num_triangles() - 1)(rng);
          const Vec2 x = m.map_point(t, random_bary(rng));
          const int parent = parent_triangle(t);
          nested = std::max(nested, (rt.eval(as_span(fv), t, x) - spaces->rt(k - 1).eval(as_span(cv), parent, x)).norm());
          nested = std::max(nested, std::abs(dg.eval(as_span(fq), t, x) - spaces->dg(k - 1).eval(as_span(cq), parent, x)));
        }
      }
    }

    for (ProblemKind p : {ProblemKind::darcy, ProblemKind::general}) {
      const MGState s = make_state(spaces, p);
      const MGState partner = p == ProblemKind::darcy ? s : make_state(spaces, p, SystemKind::general_adjoint);
      for (int k = 1; k <= 3; ++k) {
        const LevelData& fine = s.level(k);
        const LevelData& coarse = s.level(k - 1);
        const Vector zero = Vector::Zero(fine.dim());
        for (int i = 0; i < kSamples; ++i) {
          const Vector x = random_vector(fine.dim(), rng);
          const Vector w = random_vector(fine.dim(), rng);
          const Vector wc = random_vector(coarse.dim(), rng);
          const Vector restricted = coarse.m_inv.cwiseProduct(fine.Pt * fine.m_diag.cwiseProduct(x));
          const double a = restricted.dot(coarse.m_diag.cwiseProduct(wc));
          const double bb = x.dot(fine.m_diag.cwiseProduct(fine.P * wc));
          duality = std::max(duality, std::abs(a - bb) / std::max(std::abs(a), std::abs(bb)));

          const double lhs = w.dot(fine.K.K * smooth(s, k, x, zero, SmoothPhase::pre));
          const double rhs = smooth(partner, k, w, zero, SmoothPhase::post).dot(fine.K.K * x);
          adjoint = std::max(adjoint, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
        }
      }
    }
  }
  c.expect(ibp <= 1e-11, "integration by parts, max relative deviation " + C::sci(ibp));
  c.expect(infsup <= 1e-11, "inf-sup witness b(v_q,q) = |q|_PH^2, max relative deviation " + C::sci(infsup));
  c.expect(duality <= 1e-12, "transfer duality, max relative deviation " + C::sci(duality));
  c.expect(adjoint <= 1e-10, "smoother adjoint relation, max relative deviation " + C::sci(adjoint));
  c.expect(nested <= 1e-12, "injection nestedness, max pointwise deviation " + C::sci(nested));
  return c.finish();
}

bool criterion7() {
  Criterion c(7, "oracle-equivalence suite");
  std::mt19937_64 rng(20240102);
  double solve_dev = 0.0, ph_dev = 0.0;
  double lk_min = 1e300, lk_max = -1e300;
  double mass_min = 1e300, mass_max = -1e300;

  for (DomainTag d : {DomainTag::unit_square, DomainTag::l_shape}) {
    const auto spaces = std::make_shared<const SpaceHierarchy>(d, 3);
    for (ProblemKind p : {ProblemKind::darcy, ProblemKind::general}) {
      MGConfig cfg;
      cfg.m1 = cfg.m2 = 40;
      const ProblemSpec problem = make_problem(d, p);
      const MGState s = setup(spaces, problem, cfg);
      for (int k = 1; k <= 3; ++k) {
        const Vector load = assemble_rhs(spaces->rt(k), spaces->dg(k), problem.f).data();
        const SolveResult r = solve(s, k, load, 1e-12, 300);
        const Vector ref = direct_solve(s, k, load);
        solve_dev = std::max(solve_dev, combined_norm(s, k, r.x - ref) / combined_norm(s, k, ref));
      }
      if (p != ProblemKind::darcy) continue;
      for (int k = 0; k <= 2; ++k) {
        const LevelData& l = s.level(k);
        Eigen::MatrixXd ld(l.dim_q, l.dim_q);
        for (int j = 0; j < l.dim_q; ++j) ld.col(j) = apply_Lk(s, k, l.D_mat * Vector::Unit(l.dim_q, j));
        const Eigen::VectorXd ev = Eigen::EigenSolver<Eigen::MatrixXd>(ld, false).eigenvalues().real();
        lk_min = std::min(lk_min, ev.minCoeff());
        lk_max = std::max(lk_max, ev.maxCoeff());
      }
    }
    for (int k = 0; k <= 3; ++k) {
      const SparseMatrix dm = assemble_dg_stiffness(spaces->dg(k));
      for (int i = 0; i < 20; ++i) {
        const Vector q = random_vector(spaces->dg(k).dim(), rng);
        const double ref = std::sqrt(q.dot(dm * q));
        ph_dev = std::max(ph_dev, std::abs(norm_ph(spaces->dg(k), as_span(q)) - ref) / ref);
      }
    }
    for (int k = 0; k <= 2; ++k) {
      const LumpedMass lm = lumped_masses(spaces->rt(k), spaces->dg(k));
      const auto span_of = [&](const SparseMatrix& consistent, const Vector& diag) {
        const Eigen::VectorXd s = diag.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd m = s.asDiagonal() * Eigen::MatrixXd(consistent) * s.asDiagonal();
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
        mass_min = std::min(mass_min, ev.minCoeff());
        mass_max = std::max(mass_max, ev.maxCoeff());
      };
      span_of(assemble_rt_mass(spaces->rt(k)), lm.Mv);
      span_of(assemble_dg_mass(spaces->dg(k)), lm.Mq);
    }
  }
  c.expect(solve_dev <= 1e-8, "multigrid vs direct solve, max combined-norm relative deviation " + C::sci(solve_dev));
  c.expect(ph_dev <= 1e-11, "norm_ph vs sqrt(q^t D q), max relative deviation " + C::sci(ph_dev));
  c.expect(lk_min >= 0.3 && lk_max <= 1.0 + 1e-10,
           "L_k D_k spectrum on levels <= 2: [" + C::fmt(lk_min, 4) + ", " + C::fmt(lk_max, 4) + "]");
  c.expect(mass_min >= 0.1 && mass_max <= 10.0,
           "lumped-mass equivalence constants: [" + C::fmt(mass_min, 4) + ", " + C::fmt(mass_max, 4) + "]");
  return c.finish();
}

bool criterion8() {
  Criterion c(8, "damping bound and rho_k h_k^2 scaling");
  for (DomainTag d : {DomainTag::unit_square, DomainTag::l_shape}) {
    const auto spaces = std::make_shared<const SpaceHierarchy>(d, 5);
    for (ProblemKind p : {ProblemKind::darcy, ProblemKind::general}) {
      const MGState s = make_state(spaces, p);
      double worst = 0.0, lo = 1e300, hi = 0.0;
      std::string scaled;
      for (int k = 1; k <= 5; ++k) {
        const LevelData& l = s.level(k);
        worst = std::max(worst, l.delta * l.rho_est);
        const double r = l.rho_est * l.h_grid * l.h_grid;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        scaled += " " + C::fmt(r, 2);
      }
      const std::string tag = std::string(to_string(d)) + "/" + std::string(to_string(p));
      c.expect(worst <= 1.0 + 1e-12, tag + " max delta_k rho_k = " + C::fmt(worst, 15));
      c.expect(hi / lo <= 4.0, tag + " rho_k h_k^2 for k=1..5:" + scaled + " (ratio " + C::fmt(hi / lo, 3) + ")");
    }
  }
  return c.finish();
}

}  // namespace

int main() {
  int failed = 0;
  try {
    Values square_w;
    failed += !criterion6();
    failed += !criterion7();
    failed += !criterion8();
    failed += !criterion1();
    failed += !criterion2();
    failed += !criterion3();
    failed += !criterion4(square_w);
    failed += !criterion5(square_w);
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << '\n';
    return 99;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed;
}
