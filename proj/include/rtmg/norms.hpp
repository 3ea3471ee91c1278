#pragma once

#include "rtmg/assembly.hpp"
#include "rtmg/common.hpp"
#include "rtmg/mesh.hpp"
#include "rtmg/spaces.hpp"

#include <functional>
#include <span>

namespace rtmg {

struct ExactSolution {
  ScalarField p;
  VectorField grad_p;
  VectorField u;  // -grad p
  ScalarField f;
  VectorField beta;
  DomainTag domain_tag = DomainTag::unit_square;
  ProblemKind kind = ProblemKind::darcy;
  double alpha = 1.0;
};

/// Manufactured solutions used by the experiments:
///  square: p = sin(pi x) sin(pi y);
///  lshape: p = (1-x^2)(1-y^2) r^{2/3} sin(2 theta / 3), theta in [0, 3pi/2].
/// For ProblemKind::general the advection field is beta = (2, -1).
ExactSolution make_exact(DomainTag domain, ProblemKind kind);

/// ProblemSpec with A^{-1} = I, gamma = 0 and the source/exact data of make_exact.
ProblemSpec make_problem(DomainTag domain, ProblemKind kind);

/// A vector field that may be discontinuous across triangles.
using PiecewiseVectorField = std::function<Vec2(int triangle, const Vec2& x)>;

struct ScalarSample {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
};
using PiecewiseScalarField = std::function<ScalarSample(int triangle, const Vec2& x)>;

/// sqrt(sum_T |v|_T^2 + sum_e h_e |v.n_e|_e^2), h_e the edge length. The
/// normal trace is taken from the first neighbour of each edge.
double norm_plt(const TriangleMesh& mesh, const PiecewiseVectorField& v, int degree = 12);
double norm_plt(const RTSpace& space, std::span<const double> coeffs);

/// sqrt(sum_T |grad q|_T^2 + sum_e h_e^{-1} |[q]|_e^2) with one-sided
/// traces on boundary edges.
double norm_ph(const TriangleMesh& mesh, const PiecewiseScalarField& q, int degree = 12);
double norm_ph(const DGSpace& space, std::span<const double> coeffs);

double l2_norm(const RTSpace& space, std::span<const double> coeffs);

struct ErrorReport {
  double e_u = 0.0;
  double e_p = 0.0;
  double h_grid = 0.0;
  int level = 0;
};

/// Mesh-dependent errors |u - u_h|_PLT and |p - p_h|_PH. Boundary jumps of
/// the pressure error use the Dirichlet value p = 0.
ErrorReport error_norms(const RTSpace& rt, const DGSpace& dg, std::span<const double> uh,
                        std::span<const double> ph, const ExactSolution& exact, int degree = 12);

/// v_q with v_q.n_e = -h_e^{-1} [q].n_e on every edge and mean(v_q) = grad q
/// on every triangle, so that b(v_q, q) = |q|_PH^2.
Vector infsup_witness(std::span<const double> q, const RTSpace& rt, const DGSpace& dg);

}  // namespace rtmg
