#pragma once

#include "rtmg/common.hpp"
#include "rtmg/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace rtmg {

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;

/// Orthonormal Legendre pair on [0,1]: 1 and sqrt(3)(2s-1).
double edge_legendre(int k, double s);

/// Raviart-Thomas-Nedelec space of order one on a triangle mesh.
///
/// Degrees of freedom, in global order:
///  - 2 per edge e at 2e, 2e+1: the mean over e of (v . n_e) against the
///    edge Legendre pair, with the parameter running from lo to hi;
///  - 2 per triangle t at 2E+2t, 2E+2t+1: the mean of v_x and v_y over t.
///
/// The local basis on each triangle is the dual basis of these eight
/// functionals in a centred, scaled monomial basis of P1^2 + x P1. Since
/// the functionals already use the global orientation, no sign flips are
/// needed during assembly.
///
/// Holds a pointer to the mesh, which must outlive the space.
class RTSpace {
 public:
  static constexpr int kLocalDofs = 8;
  using LocalValues = std::array<Vec2, kLocalDofs>;
  using LocalDivs = std::array<double, kLocalDofs>;

  explicit RTSpace(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const { return *mesh_; }
  int dim() const { return 2 * mesh_->num_edges() + 2 * mesh_->num_triangles(); }
  int edge_dof(int e, int k) const { return 2 * e + k; }
  int interior_dof(int t, int j) const { return 2 * mesh_->num_edges() + 2 * t + j; }
  std::array<int, kLocalDofs> element_dofs(int t) const;

  /// Values and divergences of the eight local basis functions at x.
  void eval_basis(int t, const Vec2& x, LocalValues& values, LocalDivs* divs = nullptr) const;

  Vec2 eval(std::span<const double> coeffs, int t, const Vec2& x) const;
  double div_eval(std::span<const double> coeffs, int t, const Vec2& x) const;

 private:
  const TriangleMesh* mesh_;
  std::vector<Eigen::Matrix<double, kLocalDofs, kLocalDofs>> dual_;
  std::vector<Vec2> center_;
  std::vector<double> scale_;
};

/// Discontinuous piecewise-linear space with vertex-Lagrange dofs 3t+i.
class DGSpace {
 public:
  explicit DGSpace(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const { return *mesh_; }
  int dim() const { return 3 * mesh_->num_triangles(); }
  int dof(int t, int i) const { return 3 * t + i; }

  /// Gradients of the barycentric coordinates of triangle t.
  const std::array<Vec2, 3>& grads(int t) const { return grads_[t]; }

  double eval(std::span<const double> coeffs, int t, const Vec2& x) const;
  Vec2 grad_eval(std::span<const double> coeffs, int t) const;

 private:
  const TriangleMesh* mesh_;
  std::vector<std::array<Vec2, 3>> grads_;
};

/// Edge and interior moments of `field` (degree-8 quadrature).
Vector rt_interpolate(const RTSpace& space, const VectorField& field);

/// Per-element vertex interpolation.
Vector dg_interpolate(const DGSpace& space, const ScalarField& f);

/// Natural injection V_{k-1} -> V_k as a dim(fine) x dim(coarse) matrix.
/// Throws ConfigError unless the fine mesh is the red refinement of the coarse one.
SparseMatrix injection_matrix_rt(const RTSpace& coarse, const RTSpace& fine);
SparseMatrix injection_matrix_dg(const DGSpace& coarse, const DGSpace& fine);

/// Meshes of a hierarchy with their RT and DG spaces. Not copyable or
/// movable: the spaces point into the owned meshes.
class SpaceHierarchy {
 public:
  SpaceHierarchy(DomainTag domain, int max_level);
  SpaceHierarchy(const SpaceHierarchy&) = delete;
  SpaceHierarchy& operator=(const SpaceHierarchy&) = delete;

  const MeshHierarchy& meshes() const { return meshes_; }
  const TriangleMesh& mesh(int k) const { return meshes_.levels[k]; }
  const RTSpace& rt(int k) const { return rt_[k]; }
  const DGSpace& dg(int k) const { return dg_[k]; }
  int max_level() const { return meshes_.max_level(); }
  DomainTag domain() const { return meshes_.domain_tag; }

 private:
  MeshHierarchy meshes_;
  std::vector<RTSpace> rt_;
  std::vector<DGSpace> dg_;
};

/// Coefficient vector pair (v, q) in V_k x Q_k stored contiguously.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(int dim_v, int dim_q, int level = 0)
      : data_(Vector::Zero(dim_v + dim_q)), dim_v_(dim_v), level_(level) {}
  BlockVector(Vector data, int dim_v, int level = 0)
      : data_(std::move(data)), dim_v_(dim_v), level_(level) {}

  auto v_part() { return data_.head(dim_v_); }
  auto v_part() const { return data_.head(dim_v_); }
  auto q_part() { return data_.tail(data_.size() - dim_v_); }
  auto q_part() const { return data_.tail(data_.size() - dim_v_); }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }
  int dim_v() const { return dim_v_; }
  int dim_q() const { return static_cast<int>(data_.size()) - dim_v_; }
  int level() const { return level_; }

 private:
  Vector data_;
  int dim_v_ = 0;
  int level_ = 0;
};

}  // namespace rtmg
