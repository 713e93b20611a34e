#pragma once

// Discretizations of the standard measure on S^n: tensor-product grids in
// hyperspherical coordinates, geodesic-polar cap patches around a center, and
// one-dimensional radial quadrature in geodesic polar coordinates.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlab/errors.hpp"
#include "mtlab/quadrature.hpp"
#include "mtlab/sphere.hpp"

namespace mtlab {

/// Tensor-product quadrature on S^n in hyperspherical coordinates
/// (theta_1, ..., theta_{n-1}, phi). Nodes are stored column-wise and ordered
/// lexicographically over the chart axes with the azimuth fastest.
struct QuadratureGrid {
  int dim = 0;
  Eigen::MatrixXd points;
  std::vector<double> weights;
  std::vector<int> resolution;
  std::vector<std::vector<double>> axes;
  double mesh_scale = 0.0;

  std::size_t size() const { return weights.size(); }
  SpherePoint node(std::size_t i) const { return SpherePoint(Eigen::VectorXd(points.col(static_cast<Eigen::Index>(i)))); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) sum += weights[i] * f(points.col(static_cast<Eigen::Index>(i)));
    return sum;
  }

  double integrate_values(std::span<const double> values) const {
    if (values.size() != size()) throw DomainError("integrate_values: value count does not match grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) sum += weights[i] * values[i];
    return sum;
  }

  std::vector<int> axis_index(std::size_t i) const {
    std::vector<int> idx(resolution.size());
    for (int a = static_cast<int>(resolution.size()) - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(i % resolution[a]);
      i /= resolution[a];
    }
    return idx;
  }

  std::size_t linear_index(std::span<const int> idx) const {
    std::size_t i = 0;
    for (std::size_t a = 0; a < resolution.size(); ++a) i = i * resolution[a] + idx[a];
    return i;
  }
};

namespace detail {

/// Polar-angle rule for the weight sin^power(theta) on [0, pi], theta ascending.
/// Odd powers: Gauss-Legendre in cos(theta). Even powers: Gauss-Chebyshev in
/// cos(theta), i.e. midpoints in theta. Both are exact for polynomials in
/// cos(theta) of degree < 2 * count.
inline Rule1D polar_rule(int power, int count) {
  Rule1D in_t = (power % 2 == 1) ? gauss_legendre(count) : gauss_chebyshev(count);
  Rule1D out;
  for (int i = count - 1; i >= 0; --i) {
    const double t = in_t.nodes[i];
    const double one_minus = 1.0 - t * t;
    const double w = (power % 2 == 1) ? in_t.weights[i] * std::pow(one_minus, 0.5 * (power - 1))
                                      : in_t.weights[i] * std::pow(one_minus, 0.5 * power);
    out.nodes.push_back(std::acos(t));
    out.weights.push_back(w);
  }
  return out;
}

inline void chart_to_point(std::span<const double> angles, Eigen::Ref<Eigen::VectorXd> x) {
  const int k = static_cast<int>(angles.size());
  double s = 1.0;
  for (int a = 0; a + 1 < k; ++a) {
    x[a] = s * std::cos(angles[a]);
    s *= std::sin(angles[a]);
  }
  x[k - 1] = s * std::cos(angles[k - 1]);
  x[k] = s * std::sin(angles[k - 1]);
}

}  // namespace detail

/// Product rule on S^k (k >= 1): `resolution` nodes per polar angle and
/// 2 * resolution uniform azimuth nodes. Weights sum to |S^k|.
inline QuadratureGrid sphere_product_rule(int k, int resolution) {
  if (k < 1) throw DomainError("sphere_product_rule: require k >= 1");
  if (resolution < 1) throw DomainError("sphere_product_rule: require resolution >= 1");
  QuadratureGrid grid;
  grid.dim = k;
  std::vector<Rule1D> rules;
  for (int a = 1; a <= k - 1; ++a) rules.push_back(detail::polar_rule(k - a, resolution));
  Rule1D azimuth;
  const int naz = 2 * resolution;
  for (int i = 0; i < naz; ++i) {
    azimuth.nodes.push_back(2.0 * std::numbers::pi * i / naz);
    azimuth.weights.push_back(2.0 * std::numbers::pi / naz);
  }
  rules.push_back(azimuth);

  std::size_t count = 1;
  for (const auto& r : rules) {
    grid.resolution.push_back(static_cast<int>(r.nodes.size()));
    grid.axes.push_back(r.nodes);
    count *= r.nodes.size();
  }
  grid.points.resize(k + 1, static_cast<Eigen::Index>(count));
  grid.weights.resize(count);
  std::vector<double> angles(k);
  for (std::size_t i = 0; i < count; ++i) {
    const auto idx = grid.axis_index(i);
    double w = 1.0;
    for (int a = 0; a < k; ++a) {
      angles[a] = rules[a].nodes[idx[a]];
      w *= rules[a].weights[idx[a]];
    }
    detail::chart_to_point(angles, grid.points.col(static_cast<Eigen::Index>(i)));
    grid.weights[i] = w;
  }

  // nearest tensor neighbour per node, maximized over nodes
  double scale = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto idx = grid.axis_index(i);
    double nearest = std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      for (int step : {-1, 1}) {
        auto j = idx;
        j[a] += step;
        if (a == k - 1) {
          j[a] = (j[a] + grid.resolution[a]) % grid.resolution[a];
        } else if (j[a] < 0 || j[a] >= grid.resolution[a]) {
          continue;
        }
        const std::size_t other = grid.linear_index(j);
        if (other == i) continue;
        const double dot = grid.points.col(static_cast<Eigen::Index>(i)).dot(grid.points.col(static_cast<Eigen::Index>(other)));
        nearest = std::min(nearest, std::acos(std::clamp(dot, -1.0, 1.0)));
      }
    }
    if (std::isfinite(nearest)) scale = std::max(scale, nearest);
  }
  grid.mesh_scale = scale;
  return grid;
}

inline int default_resolution(int n) {
  switch (n) {
    case 2: return 128;
    case 3: return 24;
    case 4: return 12;
    default: throw DomainError("unsupported dimension: grids exist for n in {2, 3, 4}");
  }
}

/// Global quadrature grid on S^n for n in {2, 3, 4}.
inline QuadratureGrid build_grid(int n, int resolution) {
  if (n < 2 || n > 4) throw DomainError("unsupported dimension: grids exist for n in {2, 3, 4}");
  if (resolution < 8) throw DomainError("build_grid: resolution must be at least 8");
  return sphere_product_rule(n, resolution);
}

inline QuadratureGrid build_grid(int n) { return build_grid(n, default_resolution(n)); }

/// |grad f| at every grid node from high-order finite differences in the
/// angular chart (centered stencils, one-sided near the polar ends, periodic
/// in azimuth).
inline std::vector<double> grid_gradient_norms(const QuadratureGrid& grid, std::span<const double> values,
                                               int stencil_width = 7) {
  if (values.size() != grid.size()) throw DomainError("grid_gradient_norms: value count does not match grid");
  const int k = grid.dim;
  std::vector<std::vector<Stencil>> polar;
  for (int a = 0; a + 1 < k; ++a) polar.push_back(derivative_stencils(grid.axes[a], stencil_width));

  const int naz = grid.resolution[k - 1];
  const int half = std::min(stencil_width / 2, (naz - 1) / 2);
  std::vector<double> offsets;
  for (int s = -half; s <= half; ++s) offsets.push_back(s * 2.0 * std::numbers::pi / naz);
  const std::vector<double> periodic = fornberg_weights(0.0, offsets, 1);

  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.axis_index(i);
    double metric = 1.0;  // product of sin^2 of the preceding polar angles
    double grad2 = 0.0;
    for (int a = 0; a < k; ++a) {
      double deriv = 0.0;
      auto j = idx;
      if (a + 1 < k) {
        const Stencil& st = polar[a][idx[a]];
        for (std::size_t s = 0; s < st.weights.size(); ++s) {
          j[a] = st.first + static_cast<int>(s);
          deriv += st.weights[s] * values[grid.linear_index(j)];
        }
      } else {
        for (int s = -half; s <= half; ++s) {
          j[a] = ((idx[a] + s) % naz + naz) % naz;
          deriv += periodic[s + half] * values[grid.linear_index(j)];
        }
      }
      grad2 += deriv * deriv / metric;
      if (a + 1 < k) {
        const double sn = std::sin(grid.axes[a][idx[a]]);
        metric *= sn * sn;
      }
    }
    out[i] = std::sqrt(grad2);
    if (!std::isfinite(out[i])) {
      std::ostringstream msg;
      msg << "non-finite gradient at grid node " << i << " (" << grid.points.col(static_cast<Eigen::Index>(i)).transpose() << ")";
      throw NumericError(msg.str());
    }
  }
  return out;
}

/// |S^{n-1}| * integral of f(t) sin^{n-1}(t) over [t_lo, t_hi]: the integral of
/// the radial function f(dist(x, center)) over a geodesic annulus of S^n.
/// Composite Gauss-Legendre, graded geometrically toward t_lo and split at
/// the optional breakpoints (kinks of f).
template <class F>
double radial_quadrature(int n, F&& f, double t_lo, double t_hi, int nodes, std::span<const double> breakpoints = {}) {
  if (n < 1) throw DomainError("radial_quadrature: require n >= 1");
  if (!(t_lo >= 0.0 && t_lo < t_hi && t_hi <= std::numbers::pi + 1e-15))
    throw DomainError("radial_quadrature: require 0 <= t_lo < t_hi <= pi");
  if (nodes < 16) throw DomainError("radial_quadrature: require at least 16 nodes per panel");
  const auto panels = graded_panels(t_lo, t_hi, breakpoints);
  const CompositeRule rule = composite_rule(panels, nodes);
  const double shell = (n == 1) ? 2.0 : sphere_area(n - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double value = f(t);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "radial_quadrature: non-finite integrand at t = " << t;
      throw NumericError(msg.str());
    }
    sum += rule.weights[i] * value * std::pow(std::sin(t), n - 1);
  }
  return shell * sum;
}

/// Geodesic-polar patch around `center`: composite radial Gauss-Legendre
/// panels times a product rule on the unit sphere of the tangent space.
/// Node (r, a) sits at cos(t_r) center + sin(t_r) frame * direction_a.
struct CapPatch {
  SpherePoint center;
  Eigen::MatrixXd frame;
  std::vector<Panel> panels;
  CompositeRule radial;             // t nodes and plain GL weights
  std::vector<double> shell_weight; // GL weight * sin^{n-1}(t)
  Eigen::MatrixXd directions;       // n x A unit vectors
  std::vector<double> angular_weights;  // sum to |S^{n-1}|

  int sphere_dim() const { return center.sphere_dim(); }
  std::size_t radial_count() const { return radial.nodes.size(); }
  std::size_t angular_count() const { return angular_weights.size(); }

  Eigen::VectorXd point(std::size_t r, std::size_t a) const {
    const double t = radial.nodes[r];
    return std::cos(t) * center.coords() + std::sin(t) * (frame * directions.col(static_cast<Eigen::Index>(a)));
  }

  double weight(std::size_t r, std::size_t a) const { return shell_weight[r] * angular_weights[a]; }

  /// Integral of f(t, x) over the patch.
  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t r = 0; r < radial_count(); ++r) {
      double ring = 0.0;
      for (std::size_t a = 0; a < angular_count(); ++a) ring += angular_weights[a] * f(radial.nodes[r], point(r, a));
      sum += shell_weight[r] * ring;
    }
    return sum;
  }

  /// Integral of a radial function g(t) over the patch.
  template <class G>
  double integrate_radial(G&& g) const {
    const double shell = (sphere_dim() == 1) ? 2.0 : sphere_area(sphere_dim() - 1);
    double sum = 0.0;
    for (std::size_t r = 0; r < radial_count(); ++r) sum += shell_weight[r] * g(radial.nodes[r]);
    return shell * sum;
  }
};

inline CapPatch make_cap_patch(const SpherePoint& center, std::vector<Panel> panels, int nodes_per_panel,
                               int angular_resolution) {
  const int n = center.sphere_dim();
  if (n < 2) throw DomainError("make_cap_patch: require n >= 2");
  CapPatch patch;
  patch.center = center;
  patch.frame = tangent_frame(center);
  patch.panels = std::move(panels);
  patch.radial = composite_rule(patch.panels, nodes_per_panel);
  for (std::size_t r = 0; r < patch.radial.nodes.size(); ++r)
    patch.shell_weight.push_back(patch.radial.weights[r] * std::pow(std::sin(patch.radial.nodes[r]), n - 1));
  const QuadratureGrid angular = sphere_product_rule(n - 1, angular_resolution);
  patch.directions = angular.points;
  patch.angular_weights = angular.weights;
  return patch;
}

}  // namespace mtlab
