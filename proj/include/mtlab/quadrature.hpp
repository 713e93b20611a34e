#pragma once

// One-dimensional rules: Gauss-Legendre, Gauss-Chebyshev, composite panels
// with geometric grading, and Fornberg finite-difference weights.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "mtlab/errors.hpp"

namespace mtlab {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes/weights on [-1, 1], nodes ascending.
inline Rule1D gauss_legendre(int count) {
  if (count < 1) throw DomainError("gauss_legendre: need at least one node");
  Rule1D rule;
  rule.nodes.assign(count, 0.0);
  rule.weights.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= count; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = count * (z * p1 - p2) / (z * z - 1.0);
      const double z_old = z;
      z = z_old - p1 / dp;
      if (std::abs(z - z_old) <= 1e-15) {
        // one more derivative evaluation at the converged root
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= count; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        dp = count * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[count - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

/// Gauss-Chebyshev (first kind) nodes on [-1, 1] ascending; weights pi/count
/// against the measure dt / sqrt(1 - t^2).
inline Rule1D gauss_chebyshev(int count) {
  if (count < 1) throw DomainError("gauss_chebyshev: need at least one node");
  Rule1D rule;
  for (int i = count; i >= 1; --i) {
    rule.nodes.push_back(std::cos((2.0 * i - 1.0) * std::numbers::pi / (2.0 * count)));
    rule.weights.push_back(std::numbers::pi / count);
  }
  return rule;
}

struct Panel {
  double lo;
  double hi;
};

/// Splits [lo, hi] at the given breakpoints, grades every segment that starts
/// away from zero geometrically (ratio 2), and caps panel width at max_width.
inline std::vector<Panel> graded_panels(double lo, double hi, std::span<const double> breakpoints,
                                        double max_width = std::numbers::pi / 16) {
  if (!(lo < hi)) throw DomainError("graded_panels: need lo < hi");
  std::vector<double> cuts{lo};
  std::vector<double> sorted(breakpoints.begin(), breakpoints.end());
  std::sort(sorted.begin(), sorted.end());
  for (double b : sorted)
    if (b > lo && b < hi && b - cuts.back() > 1e-300) cuts.push_back(b);
  cuts.push_back(hi);

  std::vector<Panel> panels;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s];
    const double b = cuts[s + 1];
    if (a > 0.0) {
      while (b / a > 2.0 && 2.0 * a - a < max_width) {
        panels.push_back({a, 2.0 * a});
        a *= 2.0;
      }
    }
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width - 1e-12)));
    for (int k = 0; k < pieces; ++k)
      panels.push_back({a + (b - a) * k / pieces, a + (b - a) * (k + 1) / pieces});
  }
  return panels;
}

/// Composite Gauss-Legendre rule over a list of panels.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<int> panel;  // panel index per node
};

inline CompositeRule composite_rule(std::span<const Panel> panels, int nodes_per_panel) {
  const Rule1D base = gauss_legendre(nodes_per_panel);
  CompositeRule out;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double mid = 0.5 * (panels[p].lo + panels[p].hi);
    const double half = 0.5 * (panels[p].hi - panels[p].lo);
    for (int i = 0; i < nodes_per_panel; ++i) {
      out.nodes.push_back(mid + half * base.nodes[i]);
      out.weights.push_back(half * base.weights[i]);
      out.panel.push_back(static_cast<int>(p));
    }
  }
  return out;
}

/// Fornberg's algorithm: weights c[j] such that f^(order)(x0) ~ sum c[j] f(x[j]).
inline std::vector<double> fornberg_weights(double x0, std::span<const double> x, int order) {
  const int n = static_cast<int>(x.size());
  if (n <= order) throw DomainError("fornberg_weights: stencil too small for derivative order");
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = c[j][order];
  return out;
}

/// First-derivative stencils on a non-periodic ordered node set: centered
/// where possible, shifted one-sided near the ends. Returns (offset, weights)
/// per node, with offset the index of the first stencil node.
struct Stencil {
  int first;
  std::vector<double> weights;
};

inline std::vector<Stencil> derivative_stencils(std::span<const double> x, int width) {
  const int n = static_cast<int>(x.size());
  width = std::min(width, n);
  if (width < 2) throw DomainError("derivative_stencils: need at least two nodes");
  std::vector<Stencil> out(n);
  for (int i = 0; i < n; ++i) {
    int first = i - width / 2;
    first = std::clamp(first, 0, n - width);
    out[i].first = first;
    out[i].weights = fornberg_weights(x[i], x.subspan(first, width), 1);
  }
  return out;
}

}  // namespace mtlab
