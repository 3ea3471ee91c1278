#include "rtmg/quadrature.hpp"

#include "rtmg/common.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rtmg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Three-term recurrence for P_n and its derivative.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

namespace {

void check_degree(int degree) {
  if (degree < 1 || degree > kMaxQuadratureDegree) {
    throw ConfigError("unsupported quadrature degree " + std::to_string(degree) +
                      " (expected 1.." + std::to_string(kMaxQuadratureDegree) + ")");
  }
}

EdgeRule make_edge_rule(int degree) {
  const int n = (degree + 2) / 2;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  EdgeRule rule;
  rule.exact_degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (x[i] + 1.0));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

// Duffy map (a,b) -> (a, b(1-a)); the Jacobian (1-a) raises the degree in a by one.
TriangleRule make_triangle_rule(int degree) {
  const int n = (degree + 3) / 2;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  TriangleRule rule;
  rule.exact_degree = degree;
  for (int i = 0; i < n; ++i) {
    const double a = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double b = 0.5 * (x[j] + 1.0);
      const double s = a;
      const double t = b * (1.0 - a);
      rule.points.push_back({1.0 - s - t, s, t});
      // 0.25 from the two interval maps, 2 to normalise the reference area 1/2.
      rule.weights.push_back(0.5 * w[i] * w[j] * (1.0 - a));
    }
  }
  return rule;
}

template <typename Rule, typename Make>
const Rule& cached(int degree, Make make) {
  check_degree(degree);
  static const auto table = [&] {
    std::array<Rule, kMaxQuadratureDegree + 1> t{};
    for (int d = 1; d <= kMaxQuadratureDegree; ++d) t[d] = make(d);
    return t;
  }();
  return table[degree];
}

}  // namespace

const TriangleRule& triangle_rule(int exact_degree) {
  return cached<TriangleRule>(exact_degree, make_triangle_rule);
}

const EdgeRule& edge_rule(int exact_degree) {
  return cached<EdgeRule>(exact_degree, make_edge_rule);
}

}  // namespace rtmg
