#include "rtmg/mesh.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

namespace rtmg {

DomainTag parse_domain(std::string_view name) {
  if (name == "square" || name == "unit_square") return DomainTag::unit_square;
  if (name == "lshape" || name == "l_shape") return DomainTag::l_shape;
  throw ConfigError("unknown domain tag '" + std::string(name) + "'");
}

std::string_view to_string(DomainTag tag) {
  return tag == DomainTag::unit_square ? "square" : "lshape";
}

int TriangleMesh::num_boundary_edges() const {
  return static_cast<int>(std::count(boundary_edge_flags.begin(), boundary_edge_flags.end(), 1));
}

double TriangleMesh::signed_area(int t) const {
  const Vec2 a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

double TriangleMesh::area(int t) const { return std::abs(signed_area(t)); }

double TriangleMesh::edge_length(int e) const {
  return (vertices[edges[e][1]] - vertices[edges[e][0]]).norm();
}

Vec2 TriangleMesh::centroid(int t) const {
  return (vertex(t, 0) + vertex(t, 1) + vertex(t, 2)) / 3.0;
}

double TriangleMesh::diameter(int t) const {
  const Vec2 a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

Vec2 TriangleMesh::map_point(int t, const std::array<double, 3>& bary) const {
  return bary[0] * vertex(t, 0) + bary[1] * vertex(t, 1) + bary[2] * vertex(t, 2);
}

std::array<double, 3> TriangleMesh::barycentric(int t, const Vec2& x) const {
  const Vec2 a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  Mat2 jac;
  jac.col(0) = b - a;
  jac.col(1) = c - a;
  const Vec2 st = jac.inverse() * (x - a);
  return {1.0 - st.x() - st.y(), st.x(), st.y()};
}

Vec2 TriangleMesh::edge_point(int e, double s) const {
  const Vec2& lo = vertices[edges[e][0]];
  const Vec2& hi = vertices[edges[e][1]];
  return lo + s * (hi - lo);
}

Vec2 TriangleMesh::outward_normal(int t, int local_edge) const {
  const Vec2 p = vertex(t, (local_edge + 1) % 3);
  const Vec2 q = vertex(t, (local_edge + 2) % 3);
  const Vec2 d = (q - p).normalized();
  return {d.y(), -d.x()};
}

void TriangleMesh::validate() const {
  for (int t = 0; t < num_triangles(); ++t) {
    if (!(signed_area(t) > 0.0)) {
      throw AssemblyError("triangle " + std::to_string(t) + " has non-positive signed area");
    }
  }
  std::vector<int> uses(num_edges(), 0);
  for (const auto& refs : edge_of_triangle)
    for (const auto& r : refs) ++uses[r.edge];
  for (int e = 0; e < num_edges(); ++e) {
    const int expected = boundary_edge_flags[e] ? 1 : 2;
    if (uses[e] != expected) {
      throw AssemblyError("edge " + std::to_string(e) + " is used by " + std::to_string(uses[e]) +
                          " triangles");
    }
  }
  if (num_vertices() - num_edges() + num_triangles() != 1) {
    throw AssemblyError("Euler characteristic V - E + T != 1");
  }
}

void build_topology(TriangleMesh& mesh) {
  mesh.edges.clear();
  mesh.edge_normals.clear();
  mesh.edge_triangles.clear();
  mesh.edge_of_triangle.assign(mesh.triangles.size(), {});
  std::map<std::pair<int, int>, int> index;

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = mesh.triangles[t][(i + 1) % 3];
      const int b = mesh.triangles[t][(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = index.try_emplace({key.first, key.second}, mesh.num_edges());
      const int e = it->second;
      if (inserted) {
        mesh.edges.push_back({key.first, key.second});
        const Vec2 d = (mesh.vertices[key.second] - mesh.vertices[key.first]).normalized();
        mesh.edge_normals.emplace_back(-d.y(), d.x());
        mesh.edge_triangles.push_back({t, -1});
      } else {
        mesh.edge_triangles[e][1] = t;
      }
      const double s = mesh.edge_normals[e].dot(mesh.outward_normal(t, i));
      mesh.edge_of_triangle[t][i] = EdgeRef{e, s > 0.0 ? 1 : -1};
    }
  }
  mesh.boundary_edge_flags.resize(mesh.edges.size());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    mesh.boundary_edge_flags[e] = mesh.edge_triangles[e][1] < 0 ? 1 : 0;
  }
}

namespace {

// Unit cells with lower-left corners `cells`, each split along the diagonal
// from its lower-left to its upper-right corner.
TriangleMesh mesh_from_cells(const std::vector<Vec2>& cells) {
  TriangleMesh mesh;
  std::map<std::pair<double, double>, int> vid;
  auto vertex_id = [&](const Vec2& p) {
    auto [it, inserted] = vid.try_emplace({p.y(), p.x()}, 0);
    if (inserted) {
      it->second = mesh.num_vertices();
      mesh.vertices.push_back(p);
    }
    return it->second;
  };
  // Number vertices row by row for a stable, readable layout.
  std::vector<Vec2> corners;
  for (const Vec2& c : cells) {
    for (const Vec2& off : {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)}) corners.push_back(c + off);
  }
  std::sort(corners.begin(), corners.end(), [](const Vec2& a, const Vec2& b) {
    return a.y() != b.y() ? a.y() < b.y() : a.x() < b.x();
  });
  for (const Vec2& p : corners) vertex_id(p);

  for (const Vec2& c : cells) {
    const int ll = vertex_id(c), lr = vertex_id(c + Vec2(1, 0));
    const int ul = vertex_id(c + Vec2(0, 1)), ur = vertex_id(c + Vec2(1, 1));
    mesh.triangles.push_back({ll, lr, ur});
    mesh.triangles.push_back({ll, ur, ul});
  }
  build_topology(mesh);
  mesh.h_grid = 1.0;
  mesh.level = 0;
  mesh.validate();
  return mesh;
}

}  // namespace

TriangleMesh build_initial_mesh(DomainTag domain) {
  switch (domain) {
    case DomainTag::unit_square:
      return mesh_from_cells({Vec2(0, 0)});
    case DomainTag::l_shape:
      return mesh_from_cells({Vec2(-1, -1), Vec2(-1, 0), Vec2(0, 0)});
  }
  throw ConfigError("unknown domain tag");
}

TriangleMesh refine_uniform(const TriangleMesh& mesh) {
  TriangleMesh fine;
  const int nv = mesh.num_vertices();
  fine.vertices = mesh.vertices;
  fine.vertices.reserve(nv + mesh.num_edges());
  for (const auto& e : mesh.edges) {
    fine.vertices.push_back(0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]));
  }
  fine.triangles.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    const auto& er = mesh.edge_of_triangle[t];
    // Midpoint opposite local vertex i.
    const int m0 = nv + er[0].edge, m1 = nv + er[1].edge, m2 = nv + er[2].edge;
    fine.triangles.push_back({v[0], m2, m1});
    fine.triangles.push_back({m2, v[1], m0});
    fine.triangles.push_back({m1, m0, v[2]});
    fine.triangles.push_back({m0, m1, m2});
  }
  build_topology(fine);
  fine.h_grid = 0.5 * mesh.h_grid;
  fine.level = mesh.level + 1;
  fine.validate();
  return fine;
}

MeshHierarchy build_hierarchy(DomainTag domain, int max_level) {
  if (max_level < 0) throw ConfigError("max_level must be non-negative");
  MeshHierarchy h;
  h.domain_tag = domain;
  h.levels.push_back(build_initial_mesh(domain));
  for (int k = 1; k <= max_level; ++k) {
    h.levels.push_back(refine_uniform(h.levels.back()));
    std::vector<std::array<int, 4>> children(h.levels[k - 1].num_triangles());
    for (int t = 0; t < static_cast<int>(children.size()); ++t) {
      children[t] = {4 * t, 4 * t + 1, 4 * t + 2, 4 * t + 3};
    }
    h.child_map.push_back(std::move(children));
  }
  return h;
}

void write_mesh(std::ostream& out, const TriangleMesh& mesh) {
  out.precision(17);
  for (const Vec2& p : mesh.vertices) out << "v " << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (int e = 0; e < mesh.num_edges(); ++e) {
    out << "e " << mesh.edges[e][0] << ' ' << mesh.edges[e][1] << ' '
        << int(mesh.boundary_edge_flags[e]) << '\n';
  }
}

}  // namespace rtmg
