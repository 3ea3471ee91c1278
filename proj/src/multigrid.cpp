#include "rtmg/multigrid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

namespace rtmg {

// Galerkin DG operators below one level: D[j] = P_dg^t D[j+1] P_dg, with
// D[top] the assembled stiffness.
struct InnerHierarchy {
  std::vector<SparseMatrix> D;
  std::vector<Vector> D_diag_inv;
  Eigen::LLT<Eigen::MatrixXd> coarse;
  int coarse_level = 0;
};

struct MGData {
  std::shared_ptr<const SpaceHierarchy> spaces;
  std::vector<LevelData> levels;
  Eigen::FullPivLU<Eigen::MatrixXd> coarse_lu;
  std::vector<InnerHierarchy> inner;  // indexed by the level L_k acts on
};

struct MGAccess {
  static const MGData& data(const MGState& s) { return *s.data_; }
};

namespace {

const MGData& data_of(const MGState& s) { return MGAccess::data(s); }

SparseMatrix block_diagonal(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nonZeros() + b.nonZeros());
  for (int i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < b.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(b, i); it; ++it)
      t.emplace_back(a.rows() + it.row(), a.cols() + it.col(), it.value());
  SparseMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

bool uses_transpose_system(SystemKind kind) { return kind == SystemKind::general_adjoint; }
bool uses_transpose_smoother(SystemKind kind) { return kind == SystemKind::general; }

const SparseMatrix& system_matrix(const LevelData& l, SystemKind kind) {
  return uses_transpose_system(kind) ? l.K.Kt : l.K.K;
}

const SparseMatrix& smoother_matrix(const LevelData& l, SystemKind kind) {
  return uses_transpose_smoother(kind) ? l.K.Kt : l.K.K;
}

Vector inner_vcycle(const MGData& d, const InnerHierarchy& ih, const InnerCycleConfig& cfg, int j, const Vector& r) {
  if (j <= ih.coarse_level) return ih.coarse.solve(r);
  const LevelData& l = d.levels[j];
  const SparseMatrix& D = ih.D[j];
  const Vector& dinv = ih.D_diag_inv[j];
  const double w = cfg.jacobi_weight;
  Vector x = Vector::Zero(r.size());
  auto sweeps = [&](int count) {
    for (int s = 0; s < count; ++s) {
      if (s == 0 && x.isZero(0.0)) {
        x = w * dinv.cwiseProduct(r);
      } else {
        x += w * dinv.cwiseProduct(r - D * x);
      }
    }
  };
  sweeps(cfg.pre);
  const Vector rc = l.P_dg_t * (r - D * x);
  x += l.P_dg * inner_vcycle(d, ih, cfg, j - 1, rc);
  sweeps(cfg.post);
  return x;
}

// S_k M_k^{-1} applied to a dual vector: (Mv^{-1} z_v, apply_Lk(z_q)).
Vector precondition_dual(const MGState& s, int level, const Vector& z) {
  const LevelData& l = s.level(level);
  Vector y(z.size());
  y.head(l.dim_v) = l.mv_inv.cwiseProduct(z.head(l.dim_v));
  y.tail(l.dim_q) = apply_Lk(s, level, z.tail(l.dim_q));
  return y;
}

void smooth_dual(const MGState& s, int level, const Vector& b, Vector& x, SmoothPhase phase) {
  const LevelData& l = s.level(level);
  const SparseMatrix& a = system_matrix(l, s.kind());
  const SparseMatrix& ks = smoother_matrix(l, s.kind());
  const Vector r = b - a * x;
  if (phase == SmoothPhase::pre) {
    x += l.delta * precondition_dual(s, level, ks * l.m_inv.cwiseProduct(r));
  } else {
    x += l.delta * l.m_inv.cwiseProduct(ks * precondition_dual(s, level, r));
  }
}

Vector random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

double weighted_dot(const Vector& a, const Vector& b, const Vector& w) {
  return a.cwiseProduct(w).dot(b);
}

}  // namespace

const LevelData& MGState::level(int k) const { return data_->levels.at(k); }
int MGState::max_level() const { return static_cast<int>(data_->levels.size()) - 1; }
const SpaceHierarchy& MGState::spaces() const { return *data_->spaces; }

MGState MGState::with_smoothing(int m1, int m2, CycleType cycle) const {
  MGState s = *this;
  s.config_.m1 = m1;
  s.config_.m2 = m2;
  s.config_.cycle = cycle;
  return s;
}

double power_iteration_spd(const std::function<Vector(const Vector&)>& op, const Vector& weight,
                           const PowerIterationConfig& config, int* iterations) {
  std::mt19937_64 rng(config.seed);
  Vector x = random_vector(static_cast<int>(weight.size()), rng);
  x /= std::sqrt(weighted_dot(x, x, weight));
  double lambda = 0.0;
  for (int it = 1; it <= config.max_iters; ++it) {
    Vector y = op(x);
    const double next = weighted_dot(x, y, weight);
    const double norm = std::sqrt(weighted_dot(y, y, weight));
    if (norm == 0.0) {
      if (iterations) *iterations = it;
      return 0.0;
    }
    x = y / norm;
    if (it > 1 && std::abs(next - lambda) <= config.tol * std::abs(next)) {
      if (iterations) *iterations = it;
      return next;
    }
    lambda = next;
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << config.max_iters << " iterations (last estimate "
      << lambda << ")";
  throw SetupError(msg.str());
}

MGState setup(std::shared_ptr<const SpaceHierarchy> spaces, const ProblemSpec& problem,
              const MGConfig& config, std::optional<SystemKind> kind) {
  if (config.coarse_level < 0 || config.coarse_level > spaces->max_level()) {
    throw ConfigError("coarse level outside the hierarchy");
  }
  if (config.inner_lk.coarse_level < 0) throw ConfigError("inner coarse level must be non-negative");
  if (!(config.theta > 0.0 && config.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  if (config.m1 < 0 || config.m2 < 0) throw ConfigError("smoothing counts must be non-negative");

  auto data = std::make_shared<MGData>();
  data->spaces = spaces;
  const int nlev = spaces->max_level() + 1;
  data->levels.resize(nlev);
  for (int k = 0; k < nlev; ++k) {
    LevelData& l = data->levels[k];
    const RTSpace& rt = spaces->rt(k);
    const DGSpace& dg = spaces->dg(k);
    l.level = k;
    l.h_grid = spaces->mesh(k).h_grid;
    l.dim_v = rt.dim();
    l.dim_q = dg.dim();
    l.K = assemble_saddle(rt, dg, problem);
    l.mass = lumped_masses(rt, dg);
    l.m_diag = l.mass.combined();
    l.m_inv = l.m_diag.cwiseInverse();
    l.mv_inv = l.mass.Mv.cwiseInverse();
    l.D_mat = assemble_dg_stiffness(dg);
    l.Mv_consistent = assemble_rt_mass(rt);
    if (k > 0) {
      l.P_rt = injection_matrix_rt(spaces->rt(k - 1), rt);
      l.P_dg = injection_matrix_dg(spaces->dg(k - 1), dg);
      l.P_dg_t = l.P_dg.transpose();
      l.P = block_diagonal(l.P_rt, l.P_dg);
      l.Pt = l.P.transpose();
    }
  }

  MGState state;
  state.data_ = data;
  state.kind_ = kind.value_or(problem.kind == ProblemKind::darcy ? SystemKind::symmetric : SystemKind::general);
  state.config_ = config;

  {
    const LevelData& c = data->levels[config.coarse_level];
    const Eigen::MatrixXd dense = Eigen::MatrixXd(system_matrix(c, state.kind_));
    data->coarse_lu.compute(dense);
    if (!data->coarse_lu.isInvertible()) {
      throw AssemblyError("coarse saddle-point matrix is singular");
    }
  }
  data->inner.resize(nlev);
  for (int k = 0; k < nlev; ++k) {
    InnerHierarchy& ih = data->inner[k];
    ih.coarse_level = std::min(config.inner_lk.coarse_level, k);
    ih.D.resize(k + 1);
    ih.D_diag_inv.resize(k + 1);
    ih.D[k] = data->levels[k].D_mat;
    for (int j = k - 1; j >= ih.coarse_level; --j) {
      const LevelData& up = data->levels[j + 1];
      ih.D[j] = SparseMatrix(up.P_dg_t * ih.D[j + 1] * up.P_dg);
    }
    for (int j = ih.coarse_level; j <= k; ++j) ih.D_diag_inv[j] = ih.D[j].diagonal().cwiseInverse();
    ih.coarse.compute(Eigen::MatrixXd(ih.D[ih.coarse_level]));
    if (ih.coarse.info() != Eigen::Success) {
      throw AssemblyError("DG stiffness matrix is not positive definite on level " + std::to_string(ih.coarse_level));
    }
  }

  // Damping factors: delta_k rho_k = theta where rho_k bounds the spectra of
  // the operators the pre- and post-smoothers relax.
  for (int k = config.coarse_level + 1; k < nlev; ++k) {
    LevelData& l = data->levels[k];
    PowerIterationConfig pc = config.power_iter;
    pc.seed = config.power_iter.seed + static_cast<std::uint64_t>(k);
    auto normal_op = [&](const SparseMatrix& inner, const SparseMatrix& outer) {
      return [&state, &l, &inner, &outer, k](const Vector& x) {
        return Vector(l.m_inv.cwiseProduct(outer * precondition_dual(state, k, inner * x)));
      };
    };
    try {
      l.rho_btsb = power_iteration_spd(normal_op(l.K.K, l.K.Kt), l.m_diag, pc);
      l.rho_bsbt = state.kind_ == SystemKind::symmetric
                       ? l.rho_btsb
                       : power_iteration_spd(normal_op(l.K.Kt, l.K.K), l.m_diag, pc);
    } catch (const SetupError& e) {
      throw SetupError("level " + std::to_string(k) + ": " + e.what());
    }
    l.rho_est = std::max(l.rho_btsb, l.rho_bsbt);
    l.delta = config.theta / l.rho_est;
  }
  return state;
}

Vector apply_Lk(const MGState& state, int level, const Vector& r) {
  const MGData& d = data_of(state);
  return inner_vcycle(d, d.inner[level], state.config().inner_lk, level, r);
}

Vector apply_Sk(const MGState& state, int level, const Vector& x) {
  const LevelData& l = state.level(level);
  Vector y(x.size());
  y.head(l.dim_v) = l.h_grid * l.h_grid * x.head(l.dim_v);
  y.tail(l.dim_q) = apply_Lk(state, level, l.mass.Mq.cwiseProduct(x.tail(l.dim_q)));
  return y;
}

Vector apply_Bk(const MGState& state, int level, const Vector& x) {
  const LevelData& l = state.level(level);
  return l.m_inv.cwiseProduct(l.K.K * x);
}

Vector apply_Bkt(const MGState& state, int level, const Vector& x) {
  const LevelData& l = state.level(level);
  return l.m_inv.cwiseProduct(l.K.Kt * x);
}

Vector smooth(const MGState& state, int level, const Vector& x, const Vector& g, SmoothPhase phase) {
  const LevelData& l = state.level(level);
  Vector y = x;
  smooth_dual(state, level, l.m_diag.cwiseProduct(g), y, phase);
  return y;
}

void mg_cycle_dual(const MGState& state, int level, const Vector& b, Vector& x) {
  const MGData& d = data_of(state);
  const MGConfig& cfg = state.config();
  if (level < cfg.coarse_level) throw ConfigError("cycle requested below the coarse level");
  if (level == cfg.coarse_level) {
    x = d.coarse_lu.solve(b);
    return;
  }
  const LevelData& l = d.levels[level];
  for (int j = 0; j < cfg.m1; ++j) smooth_dual(state, level, b, x, SmoothPhase::pre);

  const Vector bc = l.Pt * (b - system_matrix(l, state.kind()) * x);
  Vector xc = Vector::Zero(bc.size());
  const int recursions = cfg.cycle == CycleType::W ? 2 : 1;
  for (int i = 0; i < recursions; ++i) mg_cycle_dual(state, level - 1, bc, xc);
  x += l.P * xc;

  for (int j = 0; j < cfg.m2; ++j) smooth_dual(state, level, b, x, SmoothPhase::post);
}

Vector mg_cycle(const MGState& state, int level, const Vector& g, const Vector& x0) {
  Vector x = x0;
  mg_cycle_dual(state, level, state.level(level).m_diag.cwiseProduct(g), x);
  return x;
}

Vector direct_solve(const MGState& state, int level, const Vector& load) {
  const LevelData& l = state.level(level);
  Eigen::SparseMatrix<double> a = system_matrix(l, state.kind());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage(), {});
  return lu.solve(load);
}

SolveResult solve(const MGState& state, int level, const Vector& load, double tol, int max_cycles) {
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const LevelData& l = state.level(level);
  const SparseMatrix& a = system_matrix(l, state.kind());
  auto residual_norm = [&](const Vector& r) { return std::sqrt(weighted_dot(r, r, l.m_inv)); };

  SolveResult result;
  result.x = Vector::Zero(load.size());
  const double r0 = residual_norm(load);
  if (r0 == 0.0) return result;
  for (int c = 1; c <= max_cycles; ++c) {
    mg_cycle_dual(state, level, load, result.x);
    const double rel = residual_norm(load - a * result.x) / r0;
    result.history.push_back(rel);
    result.cycles = c;
    if (rel <= tol) return result;
  }
  throw SolverError("multigrid did not reach tolerance in " + std::to_string(max_cycles) + " cycles",
                    result.history);
}

double combined_norm(const MGState& state, int level, const Vector& x) {
  const LevelData& l = state.level(level);
  const auto v = x.head(l.dim_v);
  const auto q = x.tail(l.dim_q);
  const double v2 = v.dot(l.Mv_consistent * v);
  const double q2 = q.dot(l.D_mat * q);
  return std::sqrt(std::max(v2, 0.0)) + std::sqrt(std::max(q2, 0.0));
}

ContractionResult contraction_number(const MGState& state, int level) {
  const LevelData& l = state.level(level);
  const PowerIterationConfig& pc = state.config().power_iter;
  std::mt19937_64 rng(pc.seed + 7919u * static_cast<std::uint64_t>(level));
  Vector e = random_vector(l.dim(), rng);
  e /= combined_norm(state, level, e);
  const Vector zero = Vector::Zero(l.dim());

  constexpr int kWindow = 10;
  constexpr int kMinIters = 20;
  constexpr double kTol = 1e-4;
  const int max_iters = std::max(kMinIters + 1, pc.contraction_max_iters);

  ContractionResult out;
  double previous = -1.0;
  for (int it = 1; it <= max_iters; ++it) {
    mg_cycle_dual(state, level, zero, e);
    const double ratio = combined_norm(state, level, e);
    out.ratios.push_back(ratio);
    out.iterations = it;
    if (ratio == 0.0) {
      out.value = 0.0;
      return out;
    }
    e /= ratio;
    if (it < kWindow) continue;
    double log_sum = 0.0;
    for (int i = it - kWindow; i < it; ++i) log_sum += std::log(out.ratios[i]);
    const double estimate = std::exp(log_sum / kWindow);
    if (it >= kMinIters && std::abs(estimate - previous) < kTol) {
      out.value = estimate;
      return out;
    }
    previous = estimate;
  }
  std::ostringstream msg;
  msg << "contraction estimate did not settle on level " << level << "; last ratios:";
  const std::size_t n = out.ratios.size();
  for (std::size_t i = n > 20 ? n - 20 : 0; i < n; ++i) msg << ' ' << out.ratios[i];
  throw SolverError(msg.str(), out.ratios);
}

}  // namespace rtmg
