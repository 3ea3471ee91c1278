#pragma once

#include <array>
#include <vector>

namespace rtmg {

/// Quadrature on the reference triangle in barycentric coordinates.
/// Weights sum to one; multiply by the element area at the use site.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

/// Gauss-Legendre quadrature on [0,1]; weights sum to one.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

inline constexpr int kMaxQuadratureDegree = 20;

/// Collapsed (Duffy) product of Gauss-Legendre rules. Throws ConfigError
/// outside 1..20.
const TriangleRule& triangle_rule(int exact_degree);
const EdgeRule& edge_rule(int exact_degree);

/// n-point Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace rtmg
