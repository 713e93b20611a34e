#pragma once

// Weighted point configurations on S^n that reproduce sphere averages of all
// polynomials of degree <= m: verification, weight solving, the regular
// simplex construction, the degree-2 span certificate, and numerical search.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "mtlab/errors.hpp"
#include "mtlab/nnls.hpp"
#include "mtlab/polynomial.hpp"
#include "mtlab/sphere.hpp"

namespace mtlab {

inline constexpr double kValidResidual = 1e-9;
inline constexpr double kInfeasibleResidual = 1e-6;

struct MomentDesign {
  int n = 0;
  int m = 0;
  std::vector<SpherePoint> points;
  std::vector<double> weights;
  double residual = std::numeric_limits<double>::infinity();

  std::size_t size() const { return points.size(); }
  bool valid() const { return residual <= kValidResidual; }
};

/// Unit-norm zero-mean basis of degree m on S^n evaluated at point sets, with
/// gradients for the point search.
class MomentSystem {
 public:
  MomentSystem(int n, int m) : n_(n), m_(m), basis_(restricted_zero_mean_basis(n, m)) {
    members_ = basis_.normalized_members();
    for (const auto& p : members_) {
      std::vector<Polynomial> g;
      for (int j = 0; j <= n; ++j) g.push_back(p.derivative(j));
      gradients_.push_back(std::move(g));
    }
  }

  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t size() const { return members_.size(); }
  const RestrictedBasis& basis() const { return basis_; }
  const std::vector<Polynomial>& members() const { return members_; }

  Eigen::MatrixXd values(const std::vector<SpherePoint>& points) const {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].sphere_dim() != n_) throw DomainError("MomentSystem: point dimension mismatch");
      for (std::size_t k = 0; k < size(); ++k) a(k, i) = members_[k](points[i].coords());
    }
    return a;
  }

  Eigen::VectorXd gradient(std::size_t k, const Eigen::VectorXd& x) const {
    Eigen::VectorXd g(n_ + 1);
    for (int j = 0; j <= n_; ++j) g[j] = gradients_[k][j](x);
    return g;
  }

  double residual(const std::vector<SpherePoint>& points, const std::vector<double>& weights) const {
    const Eigen::Map<const Eigen::VectorXd> nu(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return (values(points) * nu).cwiseAbs().maxCoeff();
  }

 private:
  int n_;
  int m_;
  RestrictedBasis basis_;
  std::vector<Polynomial> members_;
  std::vector<std::vector<Polynomial>> gradients_;
};

/// Checks the weight invariants (nonnegative, summing to one) and point dimensions.
inline void check_design_shape(const MomentDesign& d) {
  if (d.n < 1 || d.m < 0) throw InvariantError("design: require n >= 1 and m >= 0");
  if (d.points.empty() || d.points.size() != d.weights.size())
    throw InvariantError("design: points and weights must be non-empty and of equal length");
  double sum = 0.0;
  for (double w : d.weights) {
    if (!(w >= 0.0)) throw InvariantError("design: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvariantError("design: weights must sum to 1");
  for (const auto& p : d.points)
    if (p.sphere_dim() != d.n) throw InvariantError("design: point dimension does not match n");
}

/// max over the unit-normalized zero-mean basis of |sum_i nu_i p(x_i)|.
inline double moment_residual(const MomentDesign& d) {
  check_design_shape(d);
  if (d.m == 0) return 0.0;
  return MomentSystem(d.n, d.m).residual(d.points, d.weights);
}

struct WeightSolution {
  std::vector<double> weights;
  double residual = 0.0;
  bool feasible = false;
};

namespace detail {

inline constexpr double kSumRowScale = 1e3;

inline WeightSolution solve_weights(const MomentSystem& sys, const std::vector<SpherePoint>& points) {
  if (points.empty()) throw DomainError("solve_weights: need at least one point");
  const Eigen::MatrixXd a = sys.values(points);
  const Eigen::Index l = a.rows();
  const Eigen::Index cols = a.cols();
  Eigen::MatrixXd aug(l + 1, cols);
  aug.topRows(l) = a;
  aug.row(l).setConstant(kSumRowScale);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(l + 1);
  rhs[l] = kSumRowScale;

  const NnlsResult sol = nnls(aug, rhs);
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "solve_weights: active-set solver did not converge after " << sol.iterations
        << " iterations; best iterate [" << sol.x.transpose() << "]";
    throw ConvergenceError(msg.str());
  }
  const double total = sol.x.sum();
  if (!(total > 0.0)) throw NumericError("solve_weights: degenerate zero solution");
  WeightSolution out;
  out.weights.resize(cols);
  for (Eigen::Index i = 0; i < cols; ++i) out.weights[i] = sol.x[i] / total;
  const Eigen::Map<const Eigen::VectorXd> nu(out.weights.data(), cols);
  out.residual = (a * nu).cwiseAbs().maxCoeff();
  out.feasible = out.residual <= kInfeasibleResidual;
  return out;
}

}  // namespace detail

/// Simplex-constrained least squares for the weights; INFEASIBLE is reported
/// through `feasible == false` when the achieved residual exceeds 1e-6.
inline WeightSolution solve_weights(const std::vector<SpherePoint>& points, int m) {
  if (points.empty()) throw DomainError("solve_weights: need at least one point");
  return detail::solve_weights(MomentSystem(points.front().sphere_dim(), m), points);
}

/// Vertices of a regular (n+1)-simplex inscribed in S^n with equal weights.
inline MomentDesign simplex_design(int n) {
  if (n < 1) throw DomainError("simplex_design: require n >= 1");
  const int count = n + 2;
  // orthonormal basis of the hyperplane through the centroid parallel to H = {sum x = 1}
  const Eigen::MatrixXd frame = tangent_frame(SpherePoint(Eigen::VectorXd::Ones(count)));
  MomentDesign d;
  d.n = n;
  d.m = 2;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v = -Eigen::VectorXd::Constant(count, 1.0 / count);
    v[i] += 1.0;
    d.points.emplace_back(Eigen::VectorXd(frame.transpose() * v));
    d.weights.push_back(1.0 / count);
  }
  d.residual = moment_residual(d);
  return d;
}

/// Antipodal pair {e_1, -e_1} with weights 1/2: the two-point first-moment design.
inline MomentDesign antipodal_design(int n) {
  MomentDesign d;
  d.n = n;
  d.m = 1;
  d.points = {SpherePoint::axis(n + 1, 0), SpherePoint::axis(n + 1, 0, -1.0)};
  d.weights = {0.5, 0.5};
  d.residual = moment_residual(d);
  return d;
}

struct InfeasibilityCertificate {
  int n = 0;
  int m = 2;
  std::vector<SpherePoint> points;
  Eigen::VectorXd xi;
  double witness_value = 0.0;

  /// Largest value of (xi . x)^2 over the points.
  double max_witness_at_points() const {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, std::pow(xi.dot(p.coords()), 2));
    return worst;
  }

  bool verify() const {
    double ortho = 0.0;
    for (const auto& p : points) ortho = std::max(ortho, std::abs(xi.dot(p.coords())));
    const double expected = xi.squaredNorm() / (n + 1);
    return xi.norm() > 0.5 && ortho <= 1e-10 && max_witness_at_points() <= 1e-18 && witness_value > 0.0 &&
           std::abs(witness_value - expected) <= 1e-12 * expected;
  }
};

/// Span argument for degree-2 designs: when the points span at most an
/// n-dimensional subspace, returns a unit xi orthogonal to all of them. The
/// design average of (xi . x)^2 is then 0 while its sphere average is
/// |xi|^2 / (n+1) > 0.
inline std::optional<InfeasibilityCertificate> certify_lower_bound(const std::vector<SpherePoint>& points) {
  if (points.empty()) throw DomainError("certify_lower_bound: need at least one point");
  const int n = points.front().sphere_dim();
  Eigen::MatrixXd x(n + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].sphere_dim() != n) throw DomainError("certify_lower_bound: mixed dimensions");
    x.col(static_cast<Eigen::Index>(i)) = points[i].coords();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeFullU);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  if (rank > n) return std::nullopt;

  InfeasibilityCertificate cert;
  cert.n = n;
  cert.points = points;
  cert.xi = svd.matrixU().col(n);
  Polynomial witness(n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      MultiIndex alpha(n + 1, 0);
      alpha[i] += 1;
      alpha[j] += 1;
      witness.add_term(std::move(alpha), cert.xi[i] * cert.xi[j]);
    }
  cert.witness_value = sphere_integral(witness) / sphere_area(n);
  return cert;
}

struct SearchResult {
  MomentDesign best;
  int best_seed = -1;
  std::vector<double> seed_residuals;
};

namespace detail {

inline double objective(const MomentSystem& sys, const std::vector<SpherePoint>& pts, WeightSolution& ws) {
  ws = detail::solve_weights(sys, pts);
  const Eigen::Map<const Eigen::VectorXd> nu(ws.weights.data(), static_cast<Eigen::Index>(ws.weights.size()));
  return (sys.values(pts) * nu).squaredNorm();
}

/// Levenberg-Marquardt in the tangent spaces with the weights re-solved at
/// every trial configuration; retraction by renormalization.
inline MomentDesign descend(const MomentSystem& sys, std::vector<SpherePoint> pts, int iters) {
  const int n = sys.n();
  const auto count = static_cast<Eigen::Index>(pts.size());
  WeightSolution ws;
  double f = objective(sys, pts, ws);
  double mu = 1e-3;
  for (int it = 0; it < iters && ws.residual > 1e-14; ++it) {
    const Eigen::MatrixXd a = sys.values(pts);
    const Eigen::Map<const Eigen::VectorXd> nu(ws.weights.data(), count);
    const Eigen::VectorXd r = a * nu;
    std::vector<Eigen::MatrixXd> frames;
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(sys.size()), count * n);
    for (Eigen::Index i = 0; i < count; ++i) {
      frames.push_back(tangent_frame(pts[i]));
      for (std::size_t k = 0; k < sys.size(); ++k) {
        const Eigen::VectorXd g = sys.gradient(k, pts[i].coords());
        jac.block(static_cast<Eigen::Index>(k), i * n, 1, n) = nu[i] * (g.transpose() * frames.back());
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    const double diag_scale = std::max(jtj.diagonal().maxCoeff(), 1e-300);
    bool accepted = false;
    while (!accepted && mu < 1e8) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += mu * diag_scale;
      Eigen::VectorXd step = -lhs.ldlt().solve(grad);
      for (int halving = 0; halving < 20 && !accepted; ++halving) {
        std::vector<SpherePoint> trial;
        trial.reserve(pts.size());
        for (Eigen::Index i = 0; i < count; ++i)
          trial.emplace_back(Eigen::VectorXd(pts[i].coords() + frames[i] * step.segment(i * n, n)));
        WeightSolution trial_ws;
        double trial_f;
        try {
          trial_f = objective(sys, trial, trial_ws);
        } catch (const ConvergenceError&) {
          trial_f = std::numeric_limits<double>::infinity();
        }
        if (trial_f < f) {
          pts = std::move(trial);
          ws = std::move(trial_ws);
          f = trial_f;
          accepted = true;
        } else {
          step *= 0.5;
        }
      }
      mu = accepted ? std::max(mu / 3.0, 1e-12) : mu * 10.0;
    }
    if (!accepted) break;
  }
  MomentDesign d;
  d.n = n;
  d.m = sys.m();
  d.points = std::move(pts);
  d.weights = std::move(ws.weights);
  d.residual = ws.residual;
  return d;
}

}  // namespace detail

/// Multi-start local search for an N-point design of degree m on S^n.
/// Deterministic in (rng_seed, seed index). Returns the best design found,
/// which is VALID only if its residual reaches 1e-9.
inline SearchResult search_design(int n, int m, int count, int seeds, int iters, std::uint64_t rng_seed = 0) {
  if (n < 1 || m < 1) throw DomainError("search_design: require n >= 1 and m >= 1");
  if (count < 1) throw DomainError("search_design: require N >= 1");
  if (seeds < 1) throw DomainError("search_design: require seeds >= 1");
  const MomentSystem sys(n, m);
  SearchResult result;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(rng_seed * 1000003ULL + static_cast<std::uint64_t>(s) + 1);
    std::vector<SpherePoint> start;
    for (int i = 0; i < count; ++i) start.push_back(random_sphere_point(n, rng));
    MomentDesign d = detail::descend(sys, std::move(start), iters);
    result.seed_residuals.push_back(d.residual);
    if (result.best_seed < 0 || d.residual < result.best.residual) {
      result.best = std::move(d);
      result.best_seed = s;
    }
  }
  return result;
}

}  // namespace mtlab
