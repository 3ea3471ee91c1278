#include "rtmg/assembly.hpp"

#include "rtmg/quadrature.hpp"

#include <ostream>
#include <string>

namespace rtmg {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

constexpr int kAssemblyDegree = 8;
constexpr int kLoadDegree = 12;

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix stack_saddle(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c) {
  const int nv = static_cast<int>(a.rows());
  const int nq = static_cast<int>(b.rows());
  Triplets t;
  t.reserve(a.nonZeros() + 2 * b.nonZeros() + c.nonZeros());
  for (int i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < b.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(b, i); it; ++it) {
      t.emplace_back(nv + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nv + it.row(), it.value());
    }
  }
  for (int i = 0; i < c.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(c, i); it; ++it) t.emplace_back(nv + it.row(), nv + it.col(), -it.value());
  return from_triplets(nv + nq, nv + nq, t);
}

}  // namespace

Vector LumpedMass::combined() const {
  Vector m(Mv.size() + Mq.size());
  m.head(Mv.size()) = h_grid * h_grid * Mv;
  m.tail(Mq.size()) = Mq;
  return m;
}

SparseMatrix assemble_a(const RTSpace& space, const MatrixField& A_inv) {
  const TriangleMesh& mesh = space.mesh();
  const TriangleRule& rule = triangle_rule(kAssemblyDegree);
  Triplets t;
  t.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 64);
  RTSpace::LocalValues phi;
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    Eigen::Matrix<double, 8, 8> local = Eigen::Matrix<double, 8, 8>::Zero();
    const double area = mesh.area(tri);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = mesh.map_point(tri, rule.points[q]);
      space.eval_basis(tri, x, phi);
      const Mat2 k = A_inv(x);
      const double w = rule.weights[q] * area;
      for (int j = 0; j < 8; ++j) {
        const Vec2 kphi = k * phi[j];
        for (int i = 0; i < 8; ++i) local(i, j) += w * kphi.dot(phi[i]);
      }
    }
    const auto dofs = space.element_dofs(tri);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) t.emplace_back(dofs[i], dofs[j], local(i, j));
  }
  return from_triplets(space.dim(), space.dim(), t);
}

SparseMatrix assemble_rt_mass(const RTSpace& space) {
  return assemble_a(space, [](const Vec2&) { return Mat2::Identity(); });
}

SparseMatrix assemble_b(const RTSpace& rt, const DGSpace& dg) {
  const TriangleMesh& mesh = rt.mesh();
  const TriangleRule& rule = triangle_rule(kAssemblyDegree);
  Triplets t;
  t.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 24);
  RTSpace::LocalValues phi;
  RTSpace::LocalDivs div;
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    Eigen::Matrix<double, 3, 8> local = Eigen::Matrix<double, 3, 8>::Zero();
    const double area = mesh.area(tri);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      rt.eval_basis(tri, mesh.map_point(tri, lam), phi, &div);
      const double w = rule.weights[q] * area;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 8; ++j) local(i, j) -= w * div[j] * lam[i];
    }
    const auto dofs = rt.element_dofs(tri);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 8; ++j) t.emplace_back(dg.dof(tri, i), dofs[j], local(i, j));
  }
  return from_triplets(dg.dim(), rt.dim(), t);
}

SparseMatrix assemble_c(const DGSpace& dg, const VectorField& beta, const ScalarField& gamma) {
  const TriangleMesh& mesh = dg.mesh();
  const TriangleRule& rule = triangle_rule(kAssemblyDegree);
  Triplets t;
  t.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    const double area = mesh.area(tri);
    const auto& g = dg.grads(tri);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& lam = rule.points[q];
      const Vec2 x = mesh.map_point(tri, lam);
      const Vec2 b = beta(x);
      const double c = gamma(x);
      const double w = rule.weights[q] * area;
      for (int j = 0; j < 3; ++j) {
        const double trial = c * lam[j] + b.dot(g[j]);
        for (int i = 0; i < 3; ++i) local(i, j) += w * trial * lam[i];
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.emplace_back(dg.dof(tri, i), dg.dof(tri, j), local(i, j));
  }
  return from_triplets(dg.dim(), dg.dim(), t);
}

SparseMatrix assemble_dg_mass(const DGSpace& dg) {
  return assemble_c(dg, [](const Vec2&) { return Vec2(0, 0); }, [](const Vec2&) { return 1.0; });
}

BlockVector assemble_rhs(const RTSpace& rt, const DGSpace& dg, const ScalarField& f) {
  const TriangleMesh& mesh = dg.mesh();
  const TriangleRule& rule = triangle_rule(kLoadDegree);
  BlockVector load(rt.dim(), dg.dim(), mesh.level);
  auto q = load.q_part();
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    const double area = mesh.area(tri);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const auto& lam = rule.points[k];
      const double fw = rule.weights[k] * area * f(mesh.map_point(tri, lam));
      for (int i = 0; i < 3; ++i) q[dg.dof(tri, i)] -= fw * lam[i];
    }
  }
  return load;
}

SaddleMatrix assemble_saddle(const RTSpace& rt, const DGSpace& dg, const ProblemSpec& problem) {
  SaddleMatrix s;
  s.A_block = assemble_a(rt, problem.A_inv);
  s.B_block = assemble_b(rt, dg);
  if (problem.kind == ProblemKind::general) {
    s.C_block = assemble_c(dg, problem.beta, problem.gamma);
  } else {
    s.C_block = SparseMatrix(dg.dim(), dg.dim());
  }
  s.K = stack_saddle(s.A_block, s.B_block, s.C_block);
  s.Kt = s.K.transpose();
  return s;
}

LumpedMass lumped_masses(const RTSpace& rt, const DGSpace& dg) {
  LumpedMass m;
  m.Mv = assemble_rt_mass(rt).diagonal();
  // Row sums of the P1 mass (the vertex quadrature rule, |T|/3 per dof).
  const SparseMatrix mq = assemble_dg_mass(dg);
  m.Mq = mq * Vector::Ones(mq.cols());
  m.h_grid = rt.mesh().h_grid;
  for (const Vector* d : {&m.Mv, &m.Mq}) {
    for (Eigen::Index i = 0; i < d->size(); ++i) {
      if (!((*d)[i] > 0.0)) {
        throw AssemblyError("non-positive lumped mass entry at dof " + std::to_string(i));
      }
    }
  }
  return m;
}

SparseMatrix assemble_dg_stiffness(const DGSpace& dg) {
  const TriangleMesh& mesh = dg.mesh();
  Triplets t;
  t.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9 + mesh.num_edges() * 36);
  for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
    const auto& g = dg.grads(tri);
    const double area = mesh.area(tri);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.emplace_back(dg.dof(tri, i), dg.dof(tri, j), area * g[i].dot(g[j]));
  }
  const EdgeRule& rule = edge_rule(4);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& nb = mesh.edge_triangles[e];
    const int sides = nb[1] < 0 ? 1 : 2;
    std::array<int, 6> dofs{};
    Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = mesh.edge_point(e, rule.points[q]);
      Eigen::Matrix<double, 6, 1> jump = Eigen::Matrix<double, 6, 1>::Zero();
      for (int s = 0; s < sides; ++s) {
        const auto lam = mesh.barycentric(nb[s], x);
        for (int i = 0; i < 3; ++i) {
          jump[3 * s + i] = (s == 0 ? 1.0 : -1.0) * lam[i];
          dofs[3 * s + i] = dg.dof(nb[s], i);
        }
      }
      // The weight h_e^{-1} cancels the edge length |e| of the line element.
      local += rule.weights[q] * jump * jump.transpose();
    }
    for (int i = 0; i < 3 * sides; ++i)
      for (int j = 0; j < 3 * sides; ++j) t.emplace_back(dofs[i], dofs[j], local(i, j));
  }
  return from_triplets(dg.dim(), dg.dim(), t);
}

void write_matrix(std::ostream& out, const SparseMatrix& m) {
  out.precision(17);
  for (int i = 0; i < m.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace rtmg
