#include "rtmg/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace rtmg {
namespace {

TEST(Mesh, UnitSquareInitialCounts) {
  const TriangleMesh m = build_initial_mesh(DomainTag::unit_square);
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_edges(), 5);
  EXPECT_EQ(m.num_triangles(), 2);
  EXPECT_EQ(m.num_boundary_edges(), 4);
  EXPECT_DOUBLE_EQ(m.h_grid, 1.0);
  EXPECT_EQ(m.level, 0);
}

TEST(Mesh, UnitSquareDiagonalRunsLowerLeftToUpperRight) {
  const TriangleMesh m = build_initial_mesh(DomainTag::unit_square);
  int interior = -1;
  for (int e = 0; e < m.num_edges(); ++e)
    if (!m.boundary_edge_flags[e]) interior = e;
  ASSERT_GE(interior, 0);
  const Vec2 a = m.vertices[m.edges[interior][0]], b = m.vertices[m.edges[interior][1]];
  EXPECT_NEAR(std::abs((b - a).x()), 1.0, 0.0);
  EXPECT_NEAR((b - a).x() * (b - a).y(), 1.0, 0.0);
}

TEST(Mesh, LShapeInitialCounts) {
  const TriangleMesh m = build_initial_mesh(DomainTag::l_shape);
  EXPECT_EQ(m.num_vertices(), 8);
  EXPECT_EQ(m.num_edges(), 13);
  EXPECT_EQ(m.num_triangles(), 6);
  EXPECT_EQ(m.num_vertices() - m.num_edges() + m.num_triangles(), 1);
  double area = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) area += m.area(t);
  EXPECT_DOUBLE_EQ(area, 3.0);
  for (const Vec2& p : m.vertices) EXPECT_FALSE(p.x() > 0.0 && p.y() < 0.0);
}

TEST(Mesh, RefineUnitSquareOnce) {
  const TriangleMesh m = refine_uniform(build_initial_mesh(DomainTag::unit_square));
  EXPECT_EQ(m.num_triangles(), 8);
  EXPECT_EQ(m.num_vertices(), 9);
  EXPECT_EQ(m.num_edges(), 16);
  EXPECT_DOUBLE_EQ(m.h_grid, 0.5);
  EXPECT_EQ(m.level, 1);
}

TEST(Mesh, RefineLShapeOnce) {
  EXPECT_EQ(refine_uniform(build_initial_mesh(DomainTag::l_shape)).num_triangles(), 24);
}

TEST(Mesh, ChildAreasAreQuarterOfParent) {
  const MeshHierarchy h = build_hierarchy(DomainTag::l_shape, 3);
  for (int k = 0; k < 3; ++k) {
    const TriangleMesh& c = h.levels[k];
    const TriangleMesh& f = h.levels[k + 1];
    for (int t = 0; t < c.num_triangles(); ++t) {
      for (int child : h.child_map[k][t]) {
        EXPECT_NEAR(f.area(child), c.area(t) / 4.0, 1e-14 * c.area(t));
        EXPECT_EQ(parent_triangle(child), t);
      }
    }
  }
}

TEST(Mesh, ChildrenTileParent) {
  const MeshHierarchy h = build_hierarchy(DomainTag::unit_square, 2);
  for (int k = 0; k < 2; ++k) {
    const TriangleMesh& c = h.levels[k];
    const TriangleMesh& f = h.levels[k + 1];
    for (int t = 0; t < c.num_triangles(); ++t) {
      // Union of child vertices = parent vertices + edge midpoints.
      std::set<std::pair<double, double>> expected, got;
      for (int i = 0; i < 3; ++i) {
        const Vec2 p = c.vertex(t, i), q = c.vertex(t, (i + 1) % 3);
        expected.insert({p.x(), p.y()});
        const Vec2 mid = 0.5 * (p + q);
        expected.insert({mid.x(), mid.y()});
      }
      double area = 0.0;
      for (int child : h.child_map[k][t]) {
        area += f.area(child);
        for (int i = 0; i < 3; ++i) got.insert({f.vertex(child, i).x(), f.vertex(child, i).y()});
      }
      EXPECT_EQ(got, expected);
      EXPECT_NEAR(area, c.area(t), 1e-15);
    }
  }
}

TEST(Mesh, NestedVertices) {
  const MeshHierarchy h = build_hierarchy(DomainTag::l_shape, 2);
  const TriangleMesh& c = h.levels[1];
  const TriangleMesh& f = h.levels[2];
  for (int v = 0; v < c.num_vertices(); ++v) EXPECT_EQ(f.vertices[v], c.vertices[v]);
  for (int e = 0; e < c.num_edges(); ++e) {
    EXPECT_EQ(f.vertices[c.num_vertices() + e], 0.5 * (c.vertices[c.edges[e][0]] + c.vertices[c.edges[e][1]]));
  }
}

TEST(Mesh, HierarchyFinestSizes) {
  const MeshHierarchy h = build_hierarchy(DomainTag::unit_square, 6);
  EXPECT_EQ(h.finest().num_triangles(), 2 * 4096);
  EXPECT_EQ(build_hierarchy(DomainTag::l_shape, 2).finest().num_triangles(), 96);
  for (int k = 0; k <= 6; ++k) {
    EXPECT_DOUBLE_EQ(h.levels[k].h_grid, std::ldexp(1.0, -k));
    EXPECT_EQ(h.levels[k].num_boundary_edges(), 4 << k);
  }
}

TEST(Mesh, SingleLevelHierarchy) {
  const MeshHierarchy h = build_hierarchy(DomainTag::unit_square, 0);
  EXPECT_EQ(h.levels.size(), 1u);
  EXPECT_TRUE(h.child_map.empty());
  EXPECT_THROW(build_hierarchy(DomainTag::unit_square, -1), ConfigError);
}

TEST(Mesh, InteriorEdgeNormalIsOutwardForExactlyOneNeighbour) {
  const TriangleMesh m = build_hierarchy(DomainTag::l_shape, 2).finest();
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto nb = m.edge_triangles[e];
    int outward = 0;
    for (int side = 0; side < 2 && nb[side] >= 0; ++side) {
      const int t = nb[side];
      for (int i = 0; i < 3; ++i) {
        if (m.edge_of_triangle[t][i].edge != e) continue;
        const double d = m.edge_normals[e].dot(m.outward_normal(t, i));
        EXPECT_NEAR(std::abs(d), 1.0, 1e-14);
        EXPECT_EQ(m.edge_of_triangle[t][i].sign, d > 0 ? 1 : -1);
        if (d > 0) ++outward;
      }
    }
    if (nb[1] >= 0) EXPECT_EQ(outward, 1) << "edge " << e;
    // Normal convention: lo -> hi tangent rotated by +90 degrees.
    const Vec2 tan = (m.vertices[m.edges[e][1]] - m.vertices[m.edges[e][0]]).normalized();
    EXPECT_NEAR(m.edge_normals[e].dot(Vec2(-tan.y(), tan.x())), 1.0, 1e-14);
    EXPECT_LT(m.edges[e][0], m.edges[e][1]);
  }
}

TEST(Mesh, BoundaryFlagsMatchGeometry) {
  const TriangleMesh m = build_hierarchy(DomainTag::unit_square, 3).finest();
  for (int e = 0; e < m.num_edges(); ++e) {
    const Vec2 mid = m.edge_point(e, 0.5);
    const bool on_boundary = mid.x() == 0.0 || mid.x() == 1.0 || mid.y() == 0.0 || mid.y() == 1.0;
    EXPECT_EQ(bool(m.boundary_edge_flags[e]), on_boundary);
    EXPECT_EQ(m.edge_triangles[e][1] < 0, on_boundary);
  }
}

TEST(Mesh, BarycentricRoundTrip) {
  const TriangleMesh m = build_hierarchy(DomainTag::l_shape, 1).finest();
  const std::array<double, 3> bary = {0.2, 0.3, 0.5};
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto back = m.barycentric(t, m.map_point(t, bary));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], bary[i], 1e-14);
    EXPECT_GT(m.signed_area(t), 0.0);
  }
}

TEST(Mesh, ValidateDetectsBadOrientation) {
  TriangleMesh m = build_initial_mesh(DomainTag::unit_square);
  std::swap(m.triangles[0][1], m.triangles[0][2]);
  build_topology(m);
  EXPECT_THROW(m.validate(), AssemblyError);
}

TEST(Mesh, DomainTagParsing) {
  EXPECT_EQ(parse_domain("square"), DomainTag::unit_square);
  EXPECT_EQ(parse_domain("lshape"), DomainTag::l_shape);
  EXPECT_THROW(parse_domain("circle"), ConfigError);
  EXPECT_EQ(to_string(DomainTag::l_shape), "lshape");
}

TEST(Mesh, WriteMeshFormat) {
  std::ostringstream out;
  write_mesh(out, build_initial_mesh(DomainTag::unit_square));
  std::istringstream in(out.str());
  std::string line;
  int v = 0, t = 0, e = 0;
  while (std::getline(in, line)) {
    if (line[0] == 'v') ++v;
    if (line[0] == 't') ++t;
    if (line[0] == 'e') ++e;
  }
  EXPECT_EQ(v, 4);
  EXPECT_EQ(t, 2);
  EXPECT_EQ(e, 5);
}

}  // namespace
}  // namespace rtmg
