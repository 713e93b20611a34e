#pragma once

// Sharpness sweeps for the constrained Onofri coefficient, concentration
// profiles of normalized exponential measures, and the Onofri functional.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mtlab/bubble.hpp"
#include "mtlab/constants.hpp"
#include "mtlab/errors.hpp"
#include "mtlab/grid.hpp"
#include "mtlab/moment_design.hpp"

namespace mtlab {

inline const std::vector<double>& default_eps_sweep() {
  static const std::vector<double> sweep{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  return sweep;
}

/// Least-squares slope of y against x.
inline double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fitted_slope: need at least two matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("fitted_slope: degenerate abscissae");
  return sxy / sxx;
}

/// Zero-mean basis of degree m, or the empty basis when m = 0.
inline RestrictedBasis zero_mean_basis_or_empty(int n, int m) {
  if (m > 0) return restricted_zero_mean_basis(n, m);
  RestrictedBasis empty;
  empty.dim_sphere = n;
  empty.degree = 0;
  empty.zero_mean = true;
  empty.gram = Eigen::MatrixXd(0, 0);
  empty.condition = 1.0;
  return empty;
}

struct SweepRow {
  double eps = 0.0;
  double log_integral = 0.0;
  double mean_u = 0.0;
  double energy_v = 0.0;
  double energy_u = 0.0;
  double max_moment_defect = 0.0;
  double ratio_estimate = 0.0;  // log_integral / energy_u
  double a_estimate = 0.0;      // (log_integral - n mean_u) / energy_u
  double max_beta = 0.0;
  double c1 = 0.0;
};

struct SweepResult {
  int n = 0;
  int m = 0;
  std::size_t centers = 0;
  double delta = 0.0;
  double eta_margin = 0.0;
  std::vector<SweepRow> rows;
  bool complete = true;
  std::string failure;  // message of the first failing eps, if any
  double a_estimate = std::numeric_limits<double>::quiet_NaN();
  double target = 0.0;  // alpha_n / N
};

inline SweepRow sweep_point(const BubbleFamily& f, const RestrictedBasis& basis, double margin, const QuadratureGrid& grid) {
  const CorrectionSystem sys = correction_system(f, basis, margin, grid);
  const CorrectedTestFunction tf = assemble_u(f, basis, sys.beta, margin, grid);
  SweepRow row;
  row.eps = f.eps;
  row.log_integral = log_integral(tf);
  row.mean_u = mean_value(tf);
  row.energy_v = bubble_energy(f);
  row.energy_u = corrected_energy(tf);
  row.max_moment_defect = basis.size() ? max_moment_defect(tf) : 0.0;
  row.ratio_estimate = row.log_integral / row.energy_u;
  row.a_estimate = (row.log_integral - f.n * row.mean_u) / row.energy_u;
  row.max_beta = sys.beta.size() ? sys.beta.cwiseAbs().maxCoeff() : 0.0;
  row.c1 = tf.c1;
  return row;
}

inline SweepResult sharpness_sweep(const MomentDesign& design, double delta, std::span<const double> eps_list,
                                   const QuadratureGrid& grid, double margin = 0.0) {
  if (eps_list.empty()) throw DomainError("sharpness_sweep: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < delta)) throw DomainError("sharpness_sweep: require 0 < eps < delta");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw DomainError("sharpness_sweep: eps list must be decreasing");
  }
  check_design_shape(design);
  if (design.m > 0 && !(moment_residual(design) <= kValidResidual))
    throw DomainError("sharpness_sweep: design is not a valid moment design");
  if (grid.dim != design.n) throw DomainError("sharpness_sweep: grid dimension mismatch");
  if (margin <= 0.0) margin = default_margin(delta);

  SweepResult out;
  out.n = design.n;
  out.m = design.m;
  out.centers = design.size();
  out.delta = delta;
  out.eta_margin = margin;
  out.target = mt_alpha(design.n) / static_cast<double>(design.size());
  const RestrictedBasis basis = zero_mean_basis_or_empty(design.n, design.m);
  for (double eps : eps_list) {
    try {
      out.rows.push_back(sweep_point(make_family(design, delta, eps), basis, margin, grid));
    } catch (const std::exception& e) {
      out.complete = false;
      out.failure = "eps " + std::to_string(eps) + ": " + e.what();
      break;
    }
  }
  if (!out.rows.empty()) out.a_estimate = out.rows.back().a_estimate;
  return out;
}

struct Atom {
  SpherePoint point;
  double mass = 0.0;
};

struct ConcentrationReport {
  double eps = 0.0;
  std::vector<Atom> atoms;
  double diffuse_mass = 0.0;
  double radius = 0.0;
  double kappa_estimate = 0.0;

  double total() const {
    double sum = diffuse_mass;
    for (const auto& a : atoms) sum += a.mass;
    return sum;
  }
};

namespace detail {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); }

}  // namespace detail

/// Attributed masses of e^{n m u} / int e^{n m u} with m = |grad v|_n and u = v / m.
inline ConcentrationReport concentration_report(const BubbleFamily& f, const QuadratureGrid& grid, double radius) {
  f.validate();
  if (!(radius > 2.0 * f.delta)) throw DomainError("attribution radius too small: require radius > 2 delta");
  if (grid.dim != f.n) throw DomainError("concentration: grid dimension mismatch");
  const int n = f.n;
  const double m = std::pow(bubble_energy(f), 1.0 / n);
  const auto cuts = detail::family_breakpoints(f);

  std::vector<double> log_cap(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const BubbleProfile p = f.profile(i);
    const double shift = n * phi(p, 0.0);
    const double shifted = radial_quadrature(
        n, [&](double t) { return std::exp(n * m * (phi(p, t) / m) - shift); }, 0.0, 2.0 * f.delta, kRadialNodes, cuts);
    if (!(shifted > 0.0) || !std::isfinite(shifted)) throw NumericError("concentration: cap integral is not finite");
    log_cap[i] = shift + std::log(shifted);
  }

  // background (v = 0) area split by nearest center within the radius
  const double background = sphere_area(n) - static_cast<double>(f.size()) * cap_area(n, 2.0 * f.delta);
  std::vector<double> share(f.size(), 0.0);
  double outside = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto x = grid.points.col(static_cast<Eigen::Index>(k));
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double t = std::acos(std::clamp(f.centers[i].coords().dot(x), -1.0, 1.0));
      if (t < best) {
        best = t;
        nearest = i;
      }
    }
    if (best < 2.0 * f.delta) continue;
    outside += grid.weights[k];
    if (best <= radius) share[nearest] += grid.weights[k];
  }
  if (!(outside > 0.0)) throw NumericError("concentration: grid has no nodes outside the bubble supports");

  std::vector<double> log_mass(f.size());
  double log_total = -std::numeric_limits<double>::infinity();
  double attributed = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double area = background * share[i] / outside;
    attributed += area;
    log_mass[i] = detail::log_add(log_cap[i], detail::safe_log(area));
    log_total = detail::log_add(log_total, log_cap[i]);
  }
  const double diffuse_area = std::max(0.0, background - attributed);
  log_total = detail::log_add(log_total, detail::safe_log(background));
  if (!std::isfinite(log_total)) throw NumericError("concentration: normalizing integral is not finite");

  ConcentrationReport report;
  report.eps = f.eps;
  report.radius = radius;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double mass = std::exp(log_mass[i] - log_total);
    report.atoms.push_back({f.centers[i], mass});
    report.kappa_estimate = std::max(report.kappa_estimate, mass);
  }
  report.diffuse_mass = std::exp(detail::safe_log(diffuse_area) - log_total);
  return report;
}

inline std::vector<ConcentrationReport> concentration_profile(const std::vector<BubbleFamily>& families,
                                                              const QuadratureGrid& grid, double radius) {
  std::vector<ConcentrationReport> out;
  for (const auto& f : families) {
    if (!out.empty()) {
      const BubbleFamily& first = families.front();
      if (f.size() != first.size() || f.nu != first.nu || f.delta != first.delta)
        throw DomainError("concentration_profile: families must share centers, weights and delta");
      for (std::size_t i = 0; i < f.size(); ++i)
        if (f.centers[i].coords() != first.centers[i].coords())
          throw DomainError("concentration_profile: families must share centers, weights and delta");
    }
    out.push_back(concentration_report(f, grid, radius));
  }
  return out;
}

struct OnofriTerms {
  double log_integral = 0.0;
  double energy = 0.0;
  double mean = 0.0;
};

/// (log int e^{nu}, int |grad u|^n, mean of u) for u sampled at grid nodes.
inline OnofriTerms onofri_gap(std::span<const double> u, int n, const QuadratureGrid& grid) {
  if (grid.dim != n) throw DomainError("onofri_gap: grid dimension mismatch");
  if (u.size() != grid.size()) throw DomainError("onofri_gap: value count does not match grid");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : u) {
    if (!std::isfinite(v)) throw DomainError("onofri_gap: non-finite input");
    top = std::max(top, v);
  }
  long double shifted = 0.0L;
  long double mean = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) {
    shifted += grid.weights[i] * std::exp(n * (u[i] - top));
    mean += grid.weights[i] * u[i];
  }
  const auto grad = grid_gradient_norms(grid, u);
  long double energy = 0.0L;
  for (std::size_t i = 0; i < u.size(); ++i) energy += grid.weights[i] * std::pow(grad[i], n);
  OnofriTerms out;
  out.log_integral = n * top + std::log(static_cast<double>(shifted));
  out.energy = static_cast<double>(energy);
  out.mean = static_cast<double>(mean) / sphere_area(n);
  return out;
}

}  // namespace mtlab
