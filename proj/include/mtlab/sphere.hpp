#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlab/errors.hpp"

namespace mtlab {

/// Unit vector in R^{n+1}; the constructor renormalizes its input.
class SpherePoint {
 public:
  SpherePoint() = default;

  explicit SpherePoint(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw DomainError("SpherePoint: need at least two coordinates");
    const double norm = coords_.norm();
    if (!std::isfinite(norm) || norm == 0.0)
      throw DomainError("SpherePoint: cannot normalize a zero or non-finite vector");
    coords_ /= norm;
  }

  SpherePoint(std::initializer_list<double> coords)
      : SpherePoint(Eigen::Map<const Eigen::VectorXd>(coords.begin(), static_cast<Eigen::Index>(coords.size()))) {}

  /// Signed coordinate axis e_k of R^{ambient}.
  static SpherePoint axis(int ambient, int k, double sign = 1.0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ambient);
    v[k] = sign;
    return SpherePoint(std::move(v));
  }

  int ambient_dim() const { return static_cast<int>(coords_.size()); }
  int sphere_dim() const { return ambient_dim() - 1; }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }

 private:
  Eigen::VectorXd coords_;
};

/// |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2).
inline double sphere_area(int n) {
  if (n < 1) throw DomainError("sphere_area: require n >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

inline double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  if (x.ambient_dim() != y.ambient_dim()) throw DomainError("geodesic_distance: dimension mismatch");
  // symmetric by construction: the dot product is accumulated in the same order either way
  double dot = 0.0;
  for (int i = 0; i < x.ambient_dim(); ++i) dot += x[i] * y[i];
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

/// Integral of x^alpha over S^n with the standard measure (alpha has n+1 entries).
inline double monomial_moment(std::span<const int> alpha, int n) {
  if (n < 1) throw DomainError("monomial_moment: require n >= 1");
  if (static_cast<int>(alpha.size()) != n + 1)
    throw DomainError("monomial_moment: multi-index must have n+1 entries");
  int total = 0;
  for (int a : alpha) {
    if (a < 0) throw DomainError("monomial_moment: negative exponent");
    if (a % 2 != 0) return 0.0;
    total += a;
  }
  const double top_arg = 0.5 * (total + n + 1);
  if (top_arg < 150.0) {
    double num = 2.0;
    for (int a : alpha) num *= std::tgamma(0.5 * (a + 1));
    return num / std::tgamma(top_arg);
  }
  double log_value = std::log(2.0) - std::lgamma(top_arg);
  for (int a : alpha) log_value += std::lgamma(0.5 * (a + 1));
  return std::exp(log_value);
}

inline double monomial_moment(std::initializer_list<int> alpha, int n) {
  return monomial_moment(std::span<const int>(alpha.begin(), alpha.size()), n);
}

/// Columns 1..n of a Householder completion of `center`: an orthonormal basis of
/// the tangent space at `center`.
inline Eigen::MatrixXd tangent_frame(const SpherePoint& center) {
  const Eigen::Index ambient = center.ambient_dim();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(center.coords()));
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient, ambient);
  return q.rightCols(ambient - 1);
}

/// Uniformly distributed point on S^n.
template <class Rng>
SpherePoint random_sphere_point(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n + 1);
  do {
    for (int i = 0; i <= n; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-8);
  return SpherePoint(std::move(v));
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
template <class Rng>
Eigen::MatrixXd random_orthogonal(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

inline SpherePoint rotate(const Eigen::MatrixXd& rotation, const SpherePoint& x) {
  return SpherePoint(Eigen::VectorXd(rotation * x.coords()));
}

}  // namespace mtlab
