#pragma once

#include "rtmg/common.hpp"
#include "rtmg/spaces.hpp"

#include <functional>
#include <iosfwd>

namespace rtmg {

/// darcy: symmetric saddle system (beta = 0, gamma = 0).
/// general: convection-diffusion-reaction form with the c_h block.
enum class ProblemKind { darcy, general };

using MatrixField = std::function<Mat2(const Vec2&)>;

struct ProblemSpec {
  MatrixField A_inv;
  VectorField beta;
  ScalarField gamma;
  ScalarField f;
  ScalarField exact_p;  // optional
  VectorField exact_u;  // optional
  ProblemKind kind = ProblemKind::darcy;
  /// Elliptic regularity index; only reported by the harness.
  double expected_alpha = 1.0;
};

/// K = [[A, B^t], [B, -C]] with rows indexed by test functions.
struct SaddleMatrix {
  SparseMatrix A_block;
  SparseMatrix B_block;  // dim(Q) x dim(V)
  SparseMatrix C_block;  // dim(Q) x dim(Q), empty pattern for darcy
  SparseMatrix K;
  SparseMatrix Kt;

  int dim_v() const { return static_cast<int>(A_block.rows()); }
  int dim_q() const { return static_cast<int>(B_block.rows()); }
};

/// Diagonal lumped masses realising (.,.)_k on V_k and <<.,.>>_k on Q_k.
/// Mv is the diagonal of the RT mass matrix, Mq the row sums of the DG mass.
struct LumpedMass {
  Vector Mv;
  Vector Mq;
  double h_grid = 1.0;

  /// Diagonal of [.,.]_k = h^2 (v,w)_k + <<q,r>>_k on the combined vector.
  Vector combined() const;
};

/// a(w,v) = int A^{-1} w . v (degree-8 quadrature).
SparseMatrix assemble_a(const RTSpace& space, const MatrixField& A_inv);
/// b(v,q) = -int div(v) q; rows are Q dofs, columns V dofs.
SparseMatrix assemble_b(const RTSpace& rt, const DGSpace& dg);
/// c_h(r,q) = int (gamma r + beta . grad_h r) q; entry (i,j) = c_h(psi_j, psi_i).
SparseMatrix assemble_c(const DGSpace& dg, const VectorField& beta, const ScalarField& gamma);
/// F(q) = -int f q on the Q block (degree 12); the V block is zero.
BlockVector assemble_rhs(const RTSpace& rt, const DGSpace& dg, const ScalarField& f);

SaddleMatrix assemble_saddle(const RTSpace& rt, const DGSpace& dg, const ProblemSpec& problem);

SparseMatrix assemble_rt_mass(const RTSpace& space);
SparseMatrix assemble_dg_mass(const DGSpace& space);

/// Diagonals of the consistent RT1 (A = I) and DG-P1 mass matrices.
/// Throws AssemblyError on a non-positive entry.
LumpedMass lumped_masses(const RTSpace& rt, const DGSpace& dg);

/// q^t D r = sum_T int grad q . grad r + sum_e |e|^{-1} int_e [q].[r],
/// boundary edges included.
SparseMatrix assemble_dg_stiffness(const DGSpace& dg);

/// Coordinate text format, one "i j value" line per stored entry.
void write_matrix(std::ostream& out, const SparseMatrix& m);

}  // namespace rtmg
