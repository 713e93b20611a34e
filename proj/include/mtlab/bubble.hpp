#pragma once

// Logarithmic bubble profiles, multi-center bubble families, the
// polynomial-orthogonality correction and the assembled test function
//   e^{nu} = e^{nv} + sum_j beta_j eta^2 p_j + c1 log(1/eps).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "mtlab/errors.hpp"
#include "mtlab/grid.hpp"
#include "mtlab/moment_design.hpp"
#include "mtlab/polynomial.hpp"
#include "mtlab/sphere.hpp"

namespace mtlab {

inline constexpr double kDefaultDelta = std::numbers::pi / 8;
inline constexpr int kRadialNodes = 24;

struct BubbleProfile {
  int n = 2;
  double eps = 0.0;
  double delta = 0.0;
  double b = 0.0;

  double power() const { return n / (n - 1.0); }
};

inline void check_profile(const BubbleProfile& p) {
  if (p.n < 2) throw DomainError("bubble profile: require n >= 2");
  if (!(p.delta > 0.0 && p.delta <= std::numbers::pi / 4 + 1e-15))
    throw DomainError("bubble profile: require 0 < delta <= pi/4");
  if (!(p.eps > 0.0 && p.eps < p.delta)) throw DomainError("bubble profile: require 0 < eps < delta");
}

inline double phi(const BubbleProfile& p, double t) {
  if (!(t >= 0.0)) throw DomainError("phi: require t >= 0");
  if (t <= p.eps) return p.power() * std::log(p.delta / p.eps) + p.b;
  if (t < p.delta) return p.power() * std::log(p.delta / t) + p.b;
  if (t < 2.0 * p.delta) return p.b * (2.0 - t / p.delta);
  return 0.0;
}

/// d phi / dt (one-sided at the kinks).
inline double phi_slope(const BubbleProfile& p, double t) {
  if (t <= p.eps) return 0.0;
  if (t < p.delta) return -p.power() / t;
  if (t < 2.0 * p.delta) return -p.b / p.delta;
  return 0.0;
}

struct BubbleFamily {
  int n = 2;
  std::vector<SpherePoint> centers;
  std::vector<double> nu;
  double delta = kDefaultDelta;
  double eps = 1e-2;

  std::size_t size() const { return centers.size(); }
  double offset(std::size_t i) const { return std::log(nu[i]) / n; }
  BubbleProfile profile(std::size_t i) const { return {n, eps, delta, offset(i)}; }

  void validate() const {
    check_profile({n, eps, delta, 0.0});
    if (centers.empty()) throw DomainError("bubble family: need at least one center");
    if (nu.size() != centers.size()) throw DomainError("bubble family: one weight per center required");
    double sum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (centers[i].sphere_dim() != n) throw DomainError("bubble family: center dimension mismatch");
      if (!(nu[i] > 0.0)) throw DomainError("bubble family: weights must be positive");
      sum += nu[i];
    }
    if (std::abs(sum - 1.0) > 1e-10) throw DomainError("bubble family: weights must sum to 1");
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (!(geodesic_distance(centers[i], centers[j]) > 4.0 * delta)) {
          std::ostringstream msg;
          msg << "bubble family: supports of centers " << i << " and " << j << " overlap (distance "
              << geodesic_distance(centers[i], centers[j]) << " <= 4 delta)";
          throw InvariantError(msg.str());
        }
  }
};

inline BubbleFamily make_family(const MomentDesign& design, double delta, double eps) {
  BubbleFamily f;
  f.n = design.n;
  f.centers = design.points;
  f.nu = design.weights;
  f.delta = delta;
  f.eps = eps;
  f.validate();
  return f;
}

inline BubbleFamily single_bubble(const SpherePoint& center, double delta, double eps) {
  BubbleFamily f;
  f.n = center.sphere_dim();
  f.centers = {center};
  f.nu = {1.0};
  f.delta = delta;
  f.eps = eps;
  f.validate();
  return f;
}

namespace detail {

inline double eval_v_unchecked(const BubbleFamily& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = std::acos(std::clamp(f.centers[i].coords().dot(x), -1.0, 1.0));
    if (t < 2.0 * f.delta) return phi(f.profile(i), t);
  }
  return 0.0;
}

inline std::vector<double> family_breakpoints(const BubbleFamily& f) { return {f.eps, f.delta}; }

}  // namespace detail

inline double eval_v(const BubbleFamily& f, const SpherePoint& x) {
  f.validate();
  if (x.sphere_dim() != f.n) throw DomainError("eval_v: point dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += phi(f.profile(i), geodesic_distance(f.centers[i], x));
  return sum;
}

/// |B_r| on S^n.
inline double cap_area(int n, double r) {
  return radial_quadrature(n, [](double) { return 1.0; }, 0.0, r, kRadialNodes);
}

/// Integral of e^{n phi} - 1 over B_{2 delta}.
inline double bubble_excess(const BubbleProfile& p, int nodes = kRadialNodes) {
  const auto cuts = std::vector<double>{p.eps, p.delta};
  return radial_quadrature(p.n, [&](double t) { return std::expm1(p.n * phi(p, t)); }, 0.0, 2.0 * p.delta, nodes, cuts);
}

inline double bubble_integral(const BubbleFamily& f, int nodes = kRadialNodes) {
  f.validate();
  double sum = sphere_area(f.n);
  for (std::size_t i = 0; i < f.size(); ++i) sum += bubble_excess(f.profile(i), nodes);
  return sum;
}

inline double bubble_energy(const BubbleProfile& p, int nodes = kRadialNodes) {
  const double c = p.power();
  const double inner = radial_quadrature(p.n, [&](double t) { return std::pow(c / t, p.n); }, p.eps, p.delta, nodes);
  const double slope = std::abs(p.b) / p.delta;
  const double outer = (slope == 0.0) ? 0.0
                                      : radial_quadrature(p.n, [&](double) { return std::pow(slope, p.n); }, p.delta,
                                                          2.0 * p.delta, nodes);
  return inner + outer;
}

inline double bubble_energy(const BubbleFamily& f, int nodes = kRadialNodes) {
  f.validate();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += bubble_energy(f.profile(i), nodes);
  return sum;
}

/// Squared-cosine ramp: 0 up to inner + margin, 1 from inner + 2 margin.
inline double cutoff_ramp(double t, double inner, double margin) {
  const double s = (t - inner - margin) / margin;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double r = std::sin(0.5 * std::numbers::pi * s);
  return r * r;
}

inline double eta(const BubbleFamily& f, double margin, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double value = 1.0;
  for (const auto& c : f.centers) {
    value *= cutoff_ramp(std::acos(std::clamp(c.coords().dot(x), -1.0, 1.0)), 2.0 * f.delta, margin);
    if (value == 0.0) break;
  }
  return value;
}

inline double default_margin(double delta) { return delta / 5.0; }

/// Geodesic-polar patches over B_{2 delta}(x_i), split at eps and delta.
inline std::vector<CapPatch> bubble_patches(const BubbleFamily& f, int angular_resolution, int nodes = kRadialNodes) {
  std::vector<CapPatch> out;
  const auto cuts = detail::family_breakpoints(f);
  for (const auto& c : f.centers)
    out.push_back(make_cap_patch(c, graded_panels(0.0, 2.0 * f.delta, cuts), nodes, angular_resolution));
  return out;
}

/// Integrals of (e^{nv} - 1) p over the sphere, one per polynomial.
inline Eigen::VectorXd bubble_moments(const BubbleFamily& f, const std::vector<Polynomial>& polys,
                                      int nodes = kRadialNodes) {
  f.validate();
  int degree = 0;
  for (const auto& p : polys) degree = std::max(degree, p.degree());
  const auto patches = bubble_patches(f, degree + 2, nodes);
  const CapPatch& first = patches.front();
  const double exponent = f.n * f.n / (f.n - 1.0);
  auto plateau = [&](double t) { return std::pow(f.delta / std::max(t, f.eps), exponent); };

  long double i_eps = 0.0L;
  for (std::size_t r = 0; r < first.radial_count(); ++r)
    if (first.radial.nodes[r] < f.delta) i_eps += first.shell_weight[r] * plateau(first.radial.nodes[r]);
  i_eps *= (f.n == 1) ? 2.0 : sphere_area(f.n - 1);

  Eigen::VectorXd out(static_cast<Eigen::Index>(polys.size()));
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const Polynomial& p = polys[k];
    long double centered = 0.0L;
    long double rest = 0.0L;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const CapPatch& patch = patches[i];
      const double at_center = p(f.centers[i].coords());
      centered += static_cast<long double>(f.nu[i]) * at_center;
      long double deviation = 0.0L;
      long double rest_i = 0.0L;
      for (std::size_t r = 0; r < patch.radial_count(); ++r) {
        const double t = patch.radial.nodes[r];
        long double ring_dev = 0.0L;
        long double ring = 0.0L;
        for (std::size_t a = 0; a < patch.angular_count(); ++a) {
          const double value = p(patch.point(r, a));
          ring_dev += patch.angular_weights[a] * (value - at_center);
          ring += patch.angular_weights[a] * value;
        }
        if (t < f.delta) {
          deviation += patch.shell_weight[r] * plateau(t) * ring_dev;
          rest_i -= patch.shell_weight[r] * ring;
        } else {
          rest_i += patch.shell_weight[r] * std::expm1(f.n * phi(f.profile(i), t)) * ring;
        }
      }
      rest += f.nu[i] * deviation + rest_i;
    }
    out[static_cast<Eigen::Index>(k)] = static_cast<double>(i_eps * centered + rest);
  }
  return out;
}

struct CorrectionSystem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  Eigen::VectorXd beta;
  double condition = 0.0;
  double solve_residual = 0.0;
};

inline constexpr double kMaxCondition = 1e12;
inline constexpr double kSolveTolerance = 1e-10;

namespace detail {

inline void check_correction_inputs(const BubbleFamily& f, const RestrictedBasis& basis, double margin,
                                    const QuadratureGrid& grid) {
  f.validate();
  if (!(margin > 0.0)) throw DomainError("correction: eta margin must be positive");
  if (!basis.zero_mean) throw DomainError("correction: basis must span the zero-mean polynomials");
  if (basis.dim_sphere != f.n || grid.dim != f.n) throw DomainError("correction: basis/grid dimension mismatch");
}

}  // namespace detail

/// Solves [int eta^2 p_j p_k] beta = -[int e^{nv} p_k] for the unit-normalized
/// basis members p_k.
inline CorrectionSystem correction_system(const BubbleFamily& f, const RestrictedBasis& basis, double margin,
                                          const QuadratureGrid& grid) {
  detail::check_correction_inputs(f, basis, margin, grid);
  const auto members = basis.normalized_members();
  const auto l = static_cast<Eigen::Index>(members.size());
  CorrectionSystem sys;
  sys.gram = Eigen::MatrixXd::Zero(l, l);
  if (l == 0) {
    sys.rhs = sys.beta = Eigen::VectorXd::Zero(0);
    sys.condition = 1.0;
    return sys;
  }
  Eigen::VectorXd values(l);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.points.col(static_cast<Eigen::Index>(i));
    const double e = eta(f, margin, x);
    if (e == 0.0) continue;
    for (Eigen::Index k = 0; k < l; ++k) values[k] = members[static_cast<std::size_t>(k)](x);
    sys.gram.noalias() += (grid.weights[i] * e * e) * values * values.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.gram);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  sys.condition = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(sys.condition <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "correction: Gram matrix is ill-conditioned (condition " << sys.condition << ", eigenvalues in [" << lo
        << ", " << hi << "])";
    throw NumericError(msg.str());
  }

  const Eigen::VectorXd excess = bubble_moments(f, members);
  sys.rhs.resize(l);
  for (Eigen::Index k = 0; k < l; ++k) sys.rhs[k] = -(sphere_integral(members[static_cast<std::size_t>(k)]) + excess[k]);

  Eigen::LLT<Eigen::MatrixXd> llt(sys.gram);
  if (llt.info() != Eigen::Success) throw NumericError("correction: Gram matrix is not positive definite");
  sys.beta = llt.solve(sys.rhs);
  const double scale = std::max(sys.rhs.norm(), std::numeric_limits<double>::min());
  sys.solve_residual = (sys.gram * sys.beta - sys.rhs).norm() / scale;
  if (!(sys.solve_residual <= kSolveTolerance)) {
    std::ostringstream msg;
    msg << "correction: linear solve residual " << sys.solve_residual << " exceeds " << kSolveTolerance;
    throw NumericError(msg.str());
  }
  return sys;
}

inline Eigen::VectorXd correction_solve(const BubbleFamily& f, const RestrictedBasis& basis, double margin,
                                        const QuadratureGrid& grid) {
  return correction_system(f, basis, margin, grid).beta;
}

struct CorrectedTestFunction {
  BubbleFamily family;
  RestrictedBasis basis;
  double eta_margin = 0.0;
  Eigen::VectorXd beta;
  double c1 = 1.0;
  QuadratureGrid grid;

  std::vector<Polynomial> members;  // unit-normalized basis members
  std::vector<double> eta_nodes;
  std::vector<double> correction_nodes;  // sum_j beta_j eta^2 p_j at grid nodes
  double log_inv_eps = 0.0;

  double floor() const { return c1 * log_inv_eps; }

  double correction(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const double e = eta(family, eta_margin, x);
    if (e == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) s += beta[static_cast<Eigen::Index>(j)] * members[j](x);
    return e * e * s;
  }

  /// e^{n u(x)}
  double exp_nu(const SpherePoint& x) const {
    return std::exp(family.n * detail::eval_v_unchecked(family, x.coords())) + correction(x.coords()) + floor();
  }

  double value(const SpherePoint& x) const { return std::log(exp_nu(x)) / family.n; }

  /// u inside B_{2 delta}(x_i) as a function of the distance t.
  double cap_value(std::size_t i, double t) const {
    return std::log(std::exp(family.n * phi(family.profile(i), t)) + floor()) / family.n;
  }

  double cap_slope(std::size_t i, double t) const {
    const BubbleProfile p = family.profile(i);
    const double e = std::exp(family.n * phi(p, t));
    return phi_slope(p, t) * e / (e + floor());
  }

  /// u away from the caps: (1/n) log(1 + S + c1 log(1/eps)) at each grid node.
  std::vector<double> smooth_part() const {
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = std::log1p(correction_nodes[i] + floor()) / family.n;
    return w;
  }
};

inline CorrectedTestFunction assemble_u(const BubbleFamily& f, const RestrictedBasis& basis, const Eigen::VectorXd& beta,
                                        double margin, const QuadratureGrid& grid) {
  detail::check_correction_inputs(f, basis, margin, grid);
  if (static_cast<std::size_t>(beta.size()) != basis.size()) throw DomainError("assemble_u: beta size does not match basis");
  CorrectedTestFunction tf;
  tf.family = f;
  tf.basis = basis;
  tf.eta_margin = margin;
  tf.beta = beta;
  tf.grid = grid;
  tf.members = basis.normalized_members();
  tf.log_inv_eps = std::log(1.0 / f.eps);

  tf.eta_nodes.resize(grid.size());
  tf.correction_nodes.assign(grid.size(), 0.0);
  double largest_term = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.points.col(static_cast<Eigen::Index>(i));
    const double e = eta(f, margin, x);
    tf.eta_nodes[i] = e;
    if (e == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < tf.members.size(); ++j) {
      const double term = beta[static_cast<Eigen::Index>(j)] * e * e * tf.members[j](x);
      largest_term = std::max(largest_term, std::abs(term));
      s += term;
    }
    tf.correction_nodes[i] = s;
  }
  const double lowest = *std::min_element(tf.correction_nodes.begin(), tf.correction_nodes.end());
  tf.c1 = std::max({1.0, 2.0 * largest_term / tf.log_inv_eps, 1.0 - lowest / tf.log_inv_eps});
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(tf.correction_nodes[i] + tf.floor() >= tf.log_inv_eps * (1.0 - 1e-12))) {
      std::ostringstream msg;
      msg << "assemble_u: e^{nu} falls below log(1/eps) at grid node " << i;
      throw InvariantError(msg.str());
    }
  return tf;
}

inline CorrectedTestFunction build_test_function(const BubbleFamily& f, const RestrictedBasis& basis, double margin,
                                                 const QuadratureGrid& grid) {
  return assemble_u(f, basis, correction_solve(f, basis, margin, grid), margin, grid);
}

inline double integral(const CorrectedTestFunction& tf) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < tf.grid.size(); ++i) sum += tf.grid.weights[i] * (1.0 + tf.correction_nodes[i] + tf.floor());
  for (std::size_t i = 0; i < tf.family.size(); ++i) sum += bubble_excess(tf.family.profile(i));
  return static_cast<double>(sum);
}

inline double log_integral(const CorrectedTestFunction& tf) { return std::log(integral(tf)); }

inline double mean_value(const CorrectedTestFunction& tf) {
  const auto w = tf.smooth_part();
  long double sum = 0.0L;
  for (std::size_t i = 0; i < tf.grid.size(); ++i) sum += tf.grid.weights[i] * w[i];
  const double w0 = std::log1p(tf.floor()) / tf.family.n;
  const auto cuts = detail::family_breakpoints(tf.family);
  for (std::size_t i = 0; i < tf.family.size(); ++i)
    sum += radial_quadrature(tf.family.n, [&](double t) { return tf.cap_value(i, t) - w0; }, 0.0, 2.0 * tf.family.delta,
                             kRadialNodes, cuts);
  return static_cast<double>(sum) / sphere_area(tf.family.n);
}

/// |int e^{nu} p| / int e^{nu} for each polynomial.
inline std::vector<double> moment_defects(const CorrectedTestFunction& tf, const std::vector<Polynomial>& polys) {
  const double total = integral(tf);
  const Eigen::VectorXd excess = bubble_moments(tf.family, polys);
  std::vector<double> out;
  for (std::size_t k = 0; k < polys.size(); ++k) {
    long double smooth = 0.0L;
    for (std::size_t i = 0; i < tf.grid.size(); ++i)
      if (tf.correction_nodes[i] != 0.0)
        smooth += tf.grid.weights[i] * tf.correction_nodes[i] * polys[k](tf.grid.points.col(static_cast<Eigen::Index>(i)));
    const double value = static_cast<double>(smooth) + (1.0 + tf.floor()) * sphere_integral(polys[k]) +
                         excess[static_cast<Eigen::Index>(k)];
    out.push_back(std::abs(value) / total);
  }
  return out;
}

inline double max_moment_defect(const CorrectedTestFunction& tf) {
  const auto d = moment_defects(tf, tf.members);
  return *std::max_element(d.begin(), d.end());
}

/// int |grad w|^n for the smooth part w, by finite differences on the grid.
inline double smooth_energy(const CorrectedTestFunction& tf) {
  const auto grad = grid_gradient_norms(tf.grid, tf.smooth_part());
  long double sum = 0.0L;
  for (std::size_t i = 0; i < tf.grid.size(); ++i) sum += tf.grid.weights[i] * std::pow(grad[i], tf.family.n);
  return static_cast<double>(sum);
}

/// int |grad u|^n over the bubble supports, from the radial derivative.
inline double cap_energy(const CorrectedTestFunction& tf) {
  const auto cuts = detail::family_breakpoints(tf.family);
  double sum = 0.0;
  for (std::size_t i = 0; i < tf.family.size(); ++i)
    sum += radial_quadrature(tf.family.n, [&](double t) { return std::pow(std::abs(tf.cap_slope(i, t)), tf.family.n); },
                             0.0, 2.0 * tf.family.delta, kRadialNodes, cuts);
  return sum;
}

inline double corrected_energy(const CorrectedTestFunction& tf) { return smooth_energy(tf) + cap_energy(tf); }

}  // namespace mtlab
