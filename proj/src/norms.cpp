#include "rtmg/norms.hpp"

#include "rtmg/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace rtmg {

namespace {

constexpr double kPi = std::numbers::pi;

ExactSolution square_solution(ProblemKind kind) {
  ExactSolution s;
  s.domain_tag = DomainTag::unit_square;
  s.kind = kind;
  s.alpha = 1.0;
  s.p = [](const Vec2& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  s.grad_p = [](const Vec2& x) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  return s;
}

// p = phi * s with phi = (1-x^2)(1-y^2) and the harmonic s = r^{2/3} sin(2 theta/3).
ExactSolution lshape_solution(ProblemKind kind) {
  ExactSolution s;
  s.domain_tag = DomainTag::l_shape;
  s.kind = kind;
  s.alpha = 2.0 / 3.0;
  struct Parts {
    double phi, s, lap_phi;
    Vec2 grad_phi, grad_s;
  };
  auto parts = [](const Vec2& x) {
    Parts q;
    const double r = std::hypot(x.x(), x.y());
    double theta = std::atan2(x.y(), x.x());
    if (theta < 0.0) theta += 2.0 * kPi;
    q.phi = (1.0 - x.x() * x.x()) * (1.0 - x.y() * x.y());
    q.grad_phi = Vec2(-2.0 * x.x() * (1.0 - x.y() * x.y()), -2.0 * x.y() * (1.0 - x.x() * x.x()));
    q.lap_phi = -2.0 * (1.0 - x.y() * x.y()) - 2.0 * (1.0 - x.x() * x.x());
    if (r == 0.0) {
      q.s = 0.0;
      q.grad_s = Vec2::Zero();
      return q;
    }
    const double r23 = std::cbrt(r * r);
    q.s = r23 * std::sin(2.0 * theta / 3.0);
    const double ds_dr = (2.0 / 3.0) * q.s / r;
    const double ds_dt_over_r = (2.0 / 3.0) * r23 * std::cos(2.0 * theta / 3.0) / r;
    const double c = std::cos(theta), sn = std::sin(theta);
    q.grad_s = Vec2(ds_dr * c - ds_dt_over_r * sn, ds_dr * sn + ds_dt_over_r * c);
    return q;
  };
  s.p = [parts](const Vec2& x) {
    const Parts q = parts(x);
    return q.phi * q.s;
  };
  s.grad_p = [parts](const Vec2& x) {
    const Parts q = parts(x);
    return Vec2(q.grad_phi * q.s + q.phi * q.grad_s);
  };
  // -Laplace(phi s) = -(lap(phi) s + 2 grad phi . grad s) since s is harmonic.
  s.f = [parts](const Vec2& x) {
    const Parts q = parts(x);
    return -(q.lap_phi * q.s + 2.0 * q.grad_phi.dot(q.grad_s));
  };
  return s;
}

}  // namespace

ExactSolution make_exact(DomainTag domain, ProblemKind kind) {
  ExactSolution s = domain == DomainTag::unit_square ? square_solution(kind) : lshape_solution(kind);
  if (domain == DomainTag::unit_square) {
    s.f = [](const Vec2& x) { return 2.0 * kPi * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
  }
  s.beta = kind == ProblemKind::general ? VectorField([](const Vec2&) { return Vec2(2.0, -1.0); })
                                        : VectorField([](const Vec2&) { return Vec2(0.0, 0.0); });
  auto grad_p = s.grad_p;
  s.u = [grad_p](const Vec2& x) { return Vec2(-grad_p(x)); };
  if (kind == ProblemKind::general) {
    auto diffusion = s.f;
    auto beta = s.beta;
    s.f = [diffusion, beta, grad_p](const Vec2& x) { return diffusion(x) + beta(x).dot(grad_p(x)); };
  }
  return s;
}

ProblemSpec make_problem(DomainTag domain, ProblemKind kind) {
  const ExactSolution exact = make_exact(domain, kind);
  ProblemSpec p;
  p.A_inv = [](const Vec2&) { return Mat2::Identity(); };
  p.beta = exact.beta;
  p.gamma = [](const Vec2&) { return 0.0; };
  p.f = exact.f;
  p.exact_p = exact.p;
  p.exact_u = exact.u;
  p.kind = kind;
  p.expected_alpha = exact.alpha;
  return p;
}

double norm_plt(const TriangleMesh& mesh, const PiecewiseVectorField& v, int degree) {
  const TriangleRule& tr = triangle_rule(degree);
  const EdgeRule& er = edge_rule(degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      sum += tr.weights[q] * area * v(t, mesh.map_point(t, tr.points[q])).squaredNorm();
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double len = mesh.edge_length(e);
    const int t = mesh.edge_triangles[e][0];
    const Vec2& n = mesh.edge_normals[e];
    double edge_sum = 0.0;
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const double vn = v(t, mesh.edge_point(e, er.points[q])).dot(n);
      edge_sum += er.weights[q] * vn * vn;
    }
    sum += len * len * edge_sum;
  }
  return std::sqrt(sum);
}

double norm_plt(const RTSpace& space, std::span<const double> coeffs) {
  return norm_plt(
      space.mesh(), [&](int t, const Vec2& x) { return space.eval(coeffs, t, x); }, 8);
}

double norm_ph(const TriangleMesh& mesh, const PiecewiseScalarField& q, int degree) {
  const TriangleRule& tr = triangle_rule(degree);
  const EdgeRule& er = edge_rule(degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(t);
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      sum += tr.weights[k] * area * q(t, mesh.map_point(t, tr.points[k])).grad.squaredNorm();
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& nb = mesh.edge_triangles[e];
    double edge_sum = 0.0;
    for (std::size_t k = 0; k < er.points.size(); ++k) {
      const Vec2 x = mesh.edge_point(e, er.points[k]);
      double jump = q(nb[0], x).value;
      if (nb[1] >= 0) jump -= q(nb[1], x).value;
      edge_sum += er.weights[k] * jump * jump;
    }
    // h_e^{-1} |e| = 1
    sum += edge_sum;
  }
  return std::sqrt(sum);
}

double norm_ph(const DGSpace& space, std::span<const double> coeffs) {
  return norm_ph(
      space.mesh(),
      [&](int t, const Vec2& x) { return ScalarSample{space.eval(coeffs, t, x), space.grad_eval(coeffs, t)}; },
      4);
}

double l2_norm(const RTSpace& space, std::span<const double> coeffs) {
  const TriangleMesh& mesh = space.mesh();
  const TriangleRule& tr = triangle_rule(4);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(t);
    for (std::size_t q = 0; q < tr.points.size(); ++q) {
      sum += tr.weights[q] * area * space.eval(coeffs, t, mesh.map_point(t, tr.points[q])).squaredNorm();
    }
  }
  return std::sqrt(sum);
}

ErrorReport error_norms(const RTSpace& rt, const DGSpace& dg, std::span<const double> uh,
                        std::span<const double> ph, const ExactSolution& exact, int degree) {
  const TriangleMesh& mesh = rt.mesh();
  ErrorReport r;
  r.h_grid = mesh.h_grid;
  r.level = mesh.level;
  r.e_u = norm_plt(
      mesh, [&](int t, const Vec2& x) { return Vec2(exact.u(x) - rt.eval(uh, t, x)); }, degree);

  // Pressure error: interior jumps of p cancel, on the boundary p = 0.
  const TriangleRule& tr = triangle_rule(degree);
  const EdgeRule& er = edge_rule(degree);
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.area(t);
    const Vec2 gh = dg.grad_eval(ph, t);
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      sum += tr.weights[k] * area * (exact.grad_p(mesh.map_point(t, tr.points[k])) - gh).squaredNorm();
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& nb = mesh.edge_triangles[e];
    double edge_sum = 0.0;
    for (std::size_t k = 0; k < er.points.size(); ++k) {
      const Vec2 x = mesh.edge_point(e, er.points[k]);
      const double jump = nb[1] >= 0 ? dg.eval(ph, nb[1], x) - dg.eval(ph, nb[0], x) : -dg.eval(ph, nb[0], x);
      edge_sum += er.weights[k] * jump * jump;
    }
    sum += edge_sum;
  }
  r.e_p = std::sqrt(sum);
  return r;
}

Vector infsup_witness(std::span<const double> q, const RTSpace& rt, const DGSpace& dg) {
  const TriangleMesh& mesh = rt.mesh();
  Vector v = Vector::Zero(rt.dim());
  const EdgeRule& er = edge_rule(4);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const double len = mesh.edge_length(e);
    const auto& nb = mesh.edge_triangles[e];
    for (std::size_t k = 0; k < er.points.size(); ++k) {
      const double s = er.points[k];
      const Vec2 x = mesh.edge_point(e, s);
      // [q].n_e = sum over neighbours of sign(n_e vs outward) * q|_T
      double jn = 0.0;
      for (int side = 0; side < 2 && nb[side] >= 0; ++side) {
        const int t = nb[side];
        int sign = 0;
        for (const auto& ref : mesh.edge_of_triangle[t])
          if (ref.edge == e) sign = ref.sign;
        jn += sign * dg.eval(q, t, x);
      }
      const double vn = -jn / len;
      for (int j = 0; j < 2; ++j) v[rt.edge_dof(e, j)] += er.weights[k] * vn * edge_legendre(j, s);
    }
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 g = dg.grad_eval(q, t);
    v[rt.interior_dof(t, 0)] = g.x();
    v[rt.interior_dof(t, 1)] = g.y();
  }
  return v;
}

}  // namespace rtmg
