#include "rtmg/spaces.hpp"

#include "rtmg/quadrature.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace rtmg {

double edge_legendre(int k, double s) {
  return k == 0 ? 1.0 : std::sqrt(3.0) * (2.0 * s - 1.0);
}

namespace {

constexpr int kN = RTSpace::kLocalDofs;

// Monomial basis of RT1 in scaled coordinates xi = (x - c) / h:
// (1,0) (xi,0) (eta,0) (0,1) (0,xi) (0,eta) xi*(xi,eta) eta*(xi,eta).
void monomials(const Vec2& xi, double h, std::array<Vec2, kN>& m, std::array<double, kN>& div) {
  const double a = xi.x(), b = xi.y();
  m = {Vec2(1, 0), Vec2(a, 0), Vec2(b, 0), Vec2(0, 1),
       Vec2(0, a), Vec2(0, b), Vec2(a * a, a * b), Vec2(a * b, b * b)};
  const double s = 1.0 / h;
  div = {0.0, s, 0.0, 0.0, 0.0, s, 3.0 * a * s, 3.0 * b * s};
}

void check_nested(const TriangleMesh& coarse, const TriangleMesh& fine) {
  if (fine.level != coarse.level + 1 || fine.num_triangles() != 4 * coarse.num_triangles()) {
    throw ConfigError("injection requires consecutive hierarchy levels (got " +
                      std::to_string(coarse.level) + " -> " + std::to_string(fine.level) + ")");
  }
}

}  // namespace

RTSpace::RTSpace(const TriangleMesh& mesh) : mesh_(&mesh) {
  const int nt = mesh.num_triangles();
  dual_.resize(nt);
  center_.resize(nt);
  scale_.resize(nt);
  const EdgeRule& er = edge_rule(4);
  const TriangleRule& tr = triangle_rule(4);

  for (int t = 0; t < nt; ++t) {
    center_[t] = mesh.centroid(t);
    scale_[t] = mesh.diameter(t);
    const Vec2 c = center_[t];
    const double h = scale_[t];
    Eigen::Matrix<double, kN, kN> vdm = Eigen::Matrix<double, kN, kN>::Zero();
    std::array<Vec2, kN> m;
    std::array<double, kN> div;

    for (int i = 0; i < 3; ++i) {
      const int e = mesh.edge_of_triangle[t][i].edge;
      const Vec2& n = mesh.edge_normals[e];
      for (std::size_t q = 0; q < er.points.size(); ++q) {
        const double s = er.points[q];
        monomials((mesh.edge_point(e, s) - c) / h, h, m, div);
        for (int k = 0; k < 2; ++k) {
          const double wl = er.weights[q] * edge_legendre(k, s);
          for (int j = 0; j < kN; ++j) vdm(2 * i + k, j) += wl * m[j].dot(n);
        }
      }
    }
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      monomials((mesh.map_point(t, tr.points[q]) - c) / h, h, m, div);
      for (int j = 0; j < kN; ++j) {
        vdm(6, j) += tr.weights[q] * m[j].x();
        vdm(7, j) += tr.weights[q] * m[j].y();
      }
    }
    Eigen::FullPivLU<Eigen::Matrix<double, kN, kN>> lu(vdm);
    if (!lu.isInvertible()) {
      throw AssemblyError("singular RT1 dof system on triangle " + std::to_string(t));
    }
    dual_[t] = lu.inverse();
  }
}

std::array<int, RTSpace::kLocalDofs> RTSpace::element_dofs(int t) const {
  const auto& er = mesh_->edge_of_triangle[t];
  return {edge_dof(er[0].edge, 0), edge_dof(er[0].edge, 1), edge_dof(er[1].edge, 0),
          edge_dof(er[1].edge, 1), edge_dof(er[2].edge, 0), edge_dof(er[2].edge, 1),
          interior_dof(t, 0),      interior_dof(t, 1)};
}

void RTSpace::eval_basis(int t, const Vec2& x, LocalValues& values, LocalDivs* divs) const {
  std::array<Vec2, kN> m;
  std::array<double, kN> div;
  monomials((x - center_[t]) / scale_[t], scale_[t], m, div);
  const auto& d = dual_[t];
  for (int j = 0; j < kN; ++j) {
    Vec2 v = Vec2::Zero();
    double dv = 0.0;
    for (int i = 0; i < kN; ++i) {
      v += d(i, j) * m[i];
      dv += d(i, j) * div[i];
    }
    values[j] = v;
    if (divs) (*divs)[j] = dv;
  }
}

Vec2 RTSpace::eval(std::span<const double> coeffs, int t, const Vec2& x) const {
  LocalValues phi;
  eval_basis(t, x, phi);
  const auto dofs = element_dofs(t);
  Vec2 v = Vec2::Zero();
  for (int j = 0; j < kN; ++j) v += coeffs[dofs[j]] * phi[j];
  return v;
}

double RTSpace::div_eval(std::span<const double> coeffs, int t, const Vec2& x) const {
  LocalValues phi;
  LocalDivs div;
  eval_basis(t, x, phi, &div);
  const auto dofs = element_dofs(t);
  double d = 0.0;
  for (int j = 0; j < kN; ++j) d += coeffs[dofs[j]] * div[j];
  return d;
}

DGSpace::DGSpace(const TriangleMesh& mesh) : mesh_(&mesh) {
  grads_.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
    const double two_area = 2.0 * mesh.signed_area(t);
    // grad lambda_i = rot(edge opposite i) / (2|T|), pointing into the triangle.
    auto rot = [](const Vec2& d) { return Vec2(-d.y(), d.x()); };
    grads_[t] = {rot(c - b) / two_area, rot(a - c) / two_area, rot(b - a) / two_area};
  }
}

double DGSpace::eval(std::span<const double> coeffs, int t, const Vec2& x) const {
  const auto lam = mesh_->barycentric(t, x);
  return coeffs[3 * t] * lam[0] + coeffs[3 * t + 1] * lam[1] + coeffs[3 * t + 2] * lam[2];
}

Vec2 DGSpace::grad_eval(std::span<const double> coeffs, int t) const {
  const auto& g = grads_[t];
  return coeffs[3 * t] * g[0] + coeffs[3 * t + 1] * g[1] + coeffs[3 * t + 2] * g[2];
}

Vector rt_interpolate(const RTSpace& space, const VectorField& field) {
  const TriangleMesh& mesh = space.mesh();
  Vector coeffs = Vector::Zero(space.dim());
  const EdgeRule& er = edge_rule(8);
  const TriangleRule& tr = triangle_rule(8);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec2& n = mesh.edge_normals[e];
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const double s = er.points[q];
      const double vn = field(mesh.edge_point(e, s)).dot(n);
      for (int k = 0; k < 2; ++k) coeffs[space.edge_dof(e, k)] += er.weights[q] * vn * edge_legendre(k, s);
    }
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 mean = Vec2::Zero();
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      mean += tr.weights[q] * field(mesh.map_point(t, tr.points[q]));
    }
    coeffs[space.interior_dof(t, 0)] = mean.x();
    coeffs[space.interior_dof(t, 1)] = mean.y();
  }
  return coeffs;
}

Vector dg_interpolate(const DGSpace& space, const ScalarField& f) {
  const TriangleMesh& mesh = space.mesh();
  Vector coeffs(space.dim());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) coeffs[space.dof(t, i)] = f(mesh.vertex(t, i));
  }
  return coeffs;
}

SpaceHierarchy::SpaceHierarchy(DomainTag domain, int max_level)
    : meshes_(build_hierarchy(domain, max_level)) {
  rt_.reserve(meshes_.levels.size());
  dg_.reserve(meshes_.levels.size());
  for (const TriangleMesh& m : meshes_.levels) {
    rt_.emplace_back(m);
    dg_.emplace_back(m);
  }
}

SparseMatrix injection_matrix_rt(const RTSpace& coarse, const RTSpace& fine) {
  const TriangleMesh& cm = coarse.mesh();
  const TriangleMesh& fm = fine.mesh();
  check_nested(cm, fm);
  const EdgeRule& er = edge_rule(4);
  const TriangleRule& tr = triangle_rule(4);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(fine.dim()) * kN);
  RTSpace::LocalValues phi;

  auto push_row = [&](int row, int tc, const std::array<double, kN>& vals) {
    const auto dofs = coarse.element_dofs(tc);
    for (int j = 0; j < kN; ++j) {
      if (std::abs(vals[j]) > 1e-13) entries.emplace_back(row, dofs[j], vals[j]);
    }
  };

  for (int e = 0; e < fm.num_edges(); ++e) {
    const int tc = parent_triangle(fm.edge_triangles[e][0]);
    const Vec2& n = fm.edge_normals[e];
    std::array<double, kN> row0{}, row1{};
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const double s = er.points[q];
      coarse.eval_basis(tc, fm.edge_point(e, s), phi);
      for (int j = 0; j < kN; ++j) {
        const double vn = er.weights[q] * phi[j].dot(n);
        row0[j] += vn * edge_legendre(0, s);
        row1[j] += vn * edge_legendre(1, s);
      }
    }
    push_row(fine.edge_dof(e, 0), tc, row0);
    push_row(fine.edge_dof(e, 1), tc, row1);
  }
  for (int t = 0; t < fm.num_triangles(); ++t) {
    const int tc = parent_triangle(t);
    std::array<double, kN> rx{}, ry{};
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      coarse.eval_basis(tc, fm.map_point(t, tr.points[q]), phi);
      for (int j = 0; j < kN; ++j) {
        rx[j] += tr.weights[q] * phi[j].x();
        ry[j] += tr.weights[q] * phi[j].y();
      }
    }
    push_row(fine.interior_dof(t, 0), tc, rx);
    push_row(fine.interior_dof(t, 1), tc, ry);
  }
  SparseMatrix p(fine.dim(), coarse.dim());
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

SparseMatrix injection_matrix_dg(const DGSpace& coarse, const DGSpace& fine) {
  const TriangleMesh& cm = coarse.mesh();
  const TriangleMesh& fm = fine.mesh();
  check_nested(cm, fm);
  std::vector<Eigen::Triplet<double>> entries;
  for (int t = 0; t < fm.num_triangles(); ++t) {
    const int tc = parent_triangle(t);
    for (int i = 0; i < 3; ++i) {
      const auto lam = cm.barycentric(tc, fm.vertex(t, i));
      for (int j = 0; j < 3; ++j) {
        if (std::abs(lam[j]) > 1e-13) entries.emplace_back(fine.dof(t, i), coarse.dof(tc, j), lam[j]);
      }
    }
  }
  SparseMatrix p(fine.dim(), coarse.dim());
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

}  // namespace rtmg
