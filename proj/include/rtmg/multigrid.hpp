#pragma once

#include "rtmg/assembly.hpp"
#include "rtmg/common.hpp"
#include "rtmg/spaces.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace rtmg {

enum class CycleType { W, V };

/// symmetric: B_k x = g with B_k^t = B_k (Darcy).
/// general: B_k x = g with the nonsymmetric c_h block.
/// general_adjoint: B_k^t x = g for the same assembled operator.
enum class SystemKind { symmetric, general, general_adjoint };

struct InnerCycleConfig {
  int pre = 4;
  int post = 4;
  double jacobi_weight = 2.0 / 3.0;
  int coarse_level = 0;
};

struct PowerIterationConfig {
  int max_iters = 2000;
  double tol = 1e-6;
  std::uint64_t seed = 20240101;
  /// Cap on cycles for contraction_number (its own tolerance is 1e-4).
  int contraction_max_iters = 400;
};

struct MGConfig {
  CycleType cycle = CycleType::W;
  int m1 = 10;
  int m2 = 10;
  /// Damping safety factor: delta_k = theta / rho_k.
  double theta = 1.0;
  InnerCycleConfig inner_lk;
  int coarse_level = 0;
  PowerIterationConfig power_iter;
};

/// Everything the cycle needs on one level. Vectors on level k are stored
/// as one contiguous (v, q) array; "dual" vectors are loads/residuals, i.e.
/// M times the B_k-representation used by the smoothers.
struct LevelData {
  int level = 0;
  double h_grid = 1.0;
  int dim_v = 0;
  int dim_q = 0;
  SaddleMatrix K;
  LumpedMass mass;
  Vector m_diag;      // [.,.]_k weights h^2 Mv (+) Mq
  Vector m_inv;
  Vector mv_inv;      // 1 / Mv
  SparseMatrix P;     // combined injection from level k-1, empty on level 0
  SparseMatrix Pt;
  SparseMatrix P_rt;
  SparseMatrix P_dg;
  SparseMatrix P_dg_t;
  SparseMatrix D_mat;  // DG stiffness
  SparseMatrix Mv_consistent;
  double delta = 0.0;
  double rho_est = 0.0;
  /// Spectral-radius estimates of B^t S B and B S B^t (equal for symmetric).
  double rho_btsb = 0.0;
  double rho_bsbt = 0.0;

  int dim() const { return dim_v + dim_q; }
};

struct MGData;

/// Assembled hierarchy, damping factors and coarse factorizations. Copies
/// share the (immutable) level data, so a state can be re-used with a
/// different smoothing count via with_smoothing().
class MGState {
 public:
  const LevelData& level(int k) const;
  int max_level() const;
  int coarse_level() const { return config_.coarse_level; }
  SystemKind kind() const { return kind_; }
  const MGConfig& config() const { return config_; }
  const SpaceHierarchy& spaces() const;

  MGState with_smoothing(int m1, int m2, CycleType cycle) const;

 private:
  friend MGState setup(std::shared_ptr<const SpaceHierarchy>, const ProblemSpec&, const MGConfig&,
                       std::optional<SystemKind>);
  friend struct MGAccess;
  std::shared_ptr<const MGData> data_;
  SystemKind kind_ = SystemKind::symmetric;
  MGConfig config_;
};

/// Assembles every level, builds transfers, factors the coarse problems and
/// estimates delta_k = theta / rho_k by power iteration. The system kind
/// defaults to symmetric for Darcy and general otherwise. Throws SetupError
/// if a power iteration does not settle within config.power_iter.max_iters.
MGState setup(std::shared_ptr<const SpaceHierarchy> spaces, const ProblemSpec& problem,
              const MGConfig& config, std::optional<SystemKind> kind = std::nullopt);

/// One symmetric V(pre,post) cycle for D_mat on level k applied to a dual
/// vector on Q_k; approximates D_mat^{-1} r. Coarser levels use the Galerkin
/// operators P_dg^t D P_dg, so the eigenvalues of L_k D_k lie in (0, 1].
Vector apply_Lk(const MGState& state, int level, const Vector& r);

/// S_k(v, q) = (h_k^2 v, L_k q) with L_k q = apply_Lk(Mq q).
Vector apply_Sk(const MGState& state, int level, const Vector& x);

/// B_k x = M^{-1} K x and B_k^t x = M^{-1} K^t x.
Vector apply_Bk(const MGState& state, int level, const Vector& x);
Vector apply_Bkt(const MGState& state, int level, const Vector& x);

enum class SmoothPhase { pre, post };

/// One damped Richardson step for the system operator of the state's kind;
/// g is in the B_k-representation (M^{-1} times the dual load).
Vector smooth(const MGState& state, int level, const Vector& x, const Vector& g, SmoothPhase phase);

/// One W- or V-cycle for the system operator with right-hand side g
/// (B_k-representation) and initial guess x0. At the coarse level this is
/// a direct solve and x0 is ignored.
Vector mg_cycle(const MGState& state, int level, const Vector& g, const Vector& x0);

/// Same cycle with a dual right-hand side b = M g; x is updated in place.
void mg_cycle_dual(const MGState& state, int level, const Vector& b, Vector& x);

/// Direct solve of the level system (sparse LU), used as an oracle.
Vector direct_solve(const MGState& state, int level, const Vector& load);

struct SolveResult {
  Vector x;
  /// Relative M^{-1}-weighted residual after each cycle.
  std::vector<double> history;
  int cycles = 0;
};

/// Cycles from zero until the relative residual drops below tol. Throws
/// SolverError (carrying the history) after max_cycles.
SolveResult solve(const MGState& state, int level, const Vector& load, double tol, int max_cycles);

/// |v|_L2 + |q|_PH, evaluated with the consistent RT mass and D_mat.
double combined_norm(const MGState& state, int level, const Vector& x);

struct ContractionResult {
  double value = 0.0;
  int iterations = 0;
  std::vector<double> ratios;
};

/// Power iteration on e -> mg_cycle(level, 0, e) normalised in the combined
/// norm; the estimate is the geometric mean of the last 10 norm ratios.
/// Throws SolverError with the last 20 ratios if it does not settle.
ContractionResult contraction_number(const MGState& state, int level);

/// Rayleigh-quotient power iteration for the largest eigenvalue of an
/// operator that is self-adjoint in the inner product with diagonal weight w.
double power_iteration_spd(const std::function<Vector(const Vector&)>& op, const Vector& weight,
                           const PowerIterationConfig& config, int* iterations = nullptr);

}  // namespace rtmg
