#pragma once

#include "rtmg/common.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace rtmg {

enum class DomainTag { unit_square, l_shape };

/// Accepts "square"/"unit_square" and "lshape"/"l_shape".
DomainTag parse_domain(std::string_view name);
std::string_view to_string(DomainTag tag);

/// Global edge index together with the sign of the edge's fixed normal
/// relative to the outward normal of the triangle that refers to it.
struct EdgeRef {
  int edge = -1;
  int sign = 1;
};

/// Conforming triangulation with oriented edge data.
///
/// Local edge i of a triangle is the edge opposite its local vertex i.
/// Edges are stored as (lo, hi) vertex pairs with lo < hi; the fixed normal
/// n_e is the unit tangent lo -> hi rotated by +90 degrees.
struct TriangleMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::array<int, 2>> edges;
  std::vector<Vec2> edge_normals;
  std::vector<std::array<EdgeRef, 3>> edge_of_triangle;
  /// First and second neighbour of each edge; the second is -1 on the boundary.
  std::vector<std::array<int, 2>> edge_triangles;
  std::vector<std::uint8_t> boundary_edge_flags;
  double h_grid = 1.0;
  int level = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_boundary_edges() const;

  double area(int t) const;
  double signed_area(int t) const;
  double edge_length(int e) const;
  Vec2 vertex(int t, int local) const { return vertices[triangles[t][local]]; }
  Vec2 centroid(int t) const;
  double diameter(int t) const;

  /// Physical point of barycentric coordinates within triangle t.
  Vec2 map_point(int t, const std::array<double, 3>& bary) const;
  /// Barycentric coordinates of x relative to triangle t (x need not be inside).
  std::array<double, 3> barycentric(int t, const Vec2& x) const;
  /// Point on edge e at intrinsic parameter s in [0,1], measured from lo to hi.
  Vec2 edge_point(int e, double s) const;
  /// Outward unit normal of triangle t on its local edge i.
  Vec2 outward_normal(int t, int local_edge) const;

  /// Throws AssemblyError if any structural invariant is violated.
  void validate() const;
};

/// Rebuilds edges, normals, edge-to-triangle maps and boundary flags from
/// vertices and triangles. Edge numbering follows first appearance in
/// triangle order.
void build_topology(TriangleMesh& mesh);

TriangleMesh build_initial_mesh(DomainTag domain);

/// Red refinement: child j < 3 keeps local vertex j of the parent, child 3
/// is the midpoint triangle. Children of parent t are 4t .. 4t+3.
TriangleMesh refine_uniform(const TriangleMesh& mesh);

struct MeshHierarchy {
  DomainTag domain_tag = DomainTag::unit_square;
  std::vector<TriangleMesh> levels;
  /// child_map[k][t] lists the four level-(k+1) children of level-k triangle t.
  std::vector<std::vector<std::array<int, 4>>> child_map;

  int max_level() const { return static_cast<int>(levels.size()) - 1; }
  const TriangleMesh& finest() const { return levels.back(); }
};

MeshHierarchy build_hierarchy(DomainTag domain, int max_level);

inline int parent_triangle(int fine_triangle) { return fine_triangle / 4; }

/// Plain-text dump: "v x y", "t i j k", "e i j b" lines.
void write_mesh(std::ostream& out, const TriangleMesh& mesh);

}  // namespace rtmg
