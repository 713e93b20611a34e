#pragma once

// Polynomials on R^{n+1}, exact sphere inner products, and the zero-mean
// restricted space of degree <= m on S^n.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlab/errors.hpp"
#include "mtlab/sphere.hpp"

namespace mtlab {

using MultiIndex = std::vector<int>;

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int ambient) : ambient_(ambient) {
    if (ambient < 1) throw DomainError("Polynomial: need at least one variable");
  }

  static Polynomial constant(int ambient, double c) {
    Polynomial p(ambient);
    p.add_term(MultiIndex(ambient, 0), c);
    return p;
  }

  static Polynomial monomial(MultiIndex alpha, double c = 1.0) {
    Polynomial p(static_cast<int>(alpha.size()));
    p.add_term(std::move(alpha), c);
    return p;
  }

  /// Coordinate function x_k (0-based).
  static Polynomial coordinate(int ambient, int k) {
    MultiIndex alpha(ambient, 0);
    alpha[k] = 1;
    return monomial(std::move(alpha));
  }

  int ambient_dim() const { return ambient_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [alpha, c] : terms_) d = std::max(d, std::accumulate(alpha.begin(), alpha.end(), 0));
    return d;
  }

  void add_term(MultiIndex alpha, double c) {
    if (static_cast<int>(alpha.size()) != ambient_) throw DomainError("Polynomial: multi-index length mismatch");
    for (int a : alpha)
      if (a < 0) throw DomainError("Polynomial: negative exponent");
    auto it = terms_.find(alpha);
    if (it == terms_.end()) {
      if (c != 0.0) terms_.emplace(std::move(alpha), c);
      return;
    }
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != ambient_) throw DomainError("eval_poly: dimension mismatch");
    double sum = 0.0;
    for (const auto& [alpha, c] : terms_) {
      double term = c;
      for (int i = 0; i < ambient_; ++i)
        for (int e = 0; e < alpha[i]; ++e) term *= x[i];
      sum += term;
    }
    return sum;
  }

  Polynomial derivative(int k) const {
    Polynomial out(ambient_);
    for (const auto& [alpha, c] : terms_) {
      if (alpha[k] == 0) continue;
      MultiIndex beta = alpha;
      beta[k] -= 1;
      out.add_term(std::move(beta), c * alpha[k]);
    }
    return out;
  }

  Polynomial& operator+=(const Polynomial& q) {
    check_same(q);
    for (const auto& [alpha, c] : q.terms_) add_term(alpha, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& q) { return *this += q * -1.0; }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [alpha, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }

  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    p.check_same(q);
    Polynomial out(p.ambient_);
    for (const auto& [a, ca] : p.terms_)
      for (const auto& [b, cb] : q.terms_) {
        MultiIndex sum(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
        out.add_term(std::move(sum), ca * cb);
      }
    return out;
  }

 private:
  void check_same(const Polynomial& q) const {
    if (q.ambient_ != ambient_) throw DomainError("Polynomial: dimension mismatch");
  }

  int ambient_ = 0;
  std::map<MultiIndex, double> terms_;
};

inline double eval_poly(const Polynomial& p, const SpherePoint& x) { return p(x.coords()); }

/// Exact integral of p over S^n (n = ambient - 1).
inline double sphere_integral(const Polynomial& p) {
  const int n = p.ambient_dim() - 1;
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) sum += c * monomial_moment(alpha, n);
  return sum;
}

inline double sphere_inner_product(const Polynomial& p, const Polynomial& q) {
  if (p.ambient_dim() != q.ambient_dim()) throw DomainError("sphere_inner_product: dimension mismatch");
  const int n = p.ambient_dim() - 1;
  double sum = 0.0;
  for (const auto& [a, ca] : p.terms())
    for (const auto& [b, cb] : q.terms()) {
      MultiIndex s(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
      sum += ca * cb * monomial_moment(s, n);
    }
  return sum;
}

namespace detail {

// all exponent vectors of total degree d in `vars` variables, lexicographically descending
inline void exponents_of_degree(int vars, int d, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == vars - 1) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[pos] = e;
    exponents_of_degree(vars, d - e, cur, pos + 1, out);
  }
}

}  // namespace detail

/// All monomials of degree <= m on R^{n+1}, graded lexicographic order.
inline std::vector<Polynomial> monomial_basis(int n, int m) {
  if (n < 1) throw DomainError("monomial_basis: require n >= 1");
  if (m < 0) throw DomainError("monomial_basis: require m >= 0");
  std::vector<Polynomial> out;
  for (int d = 0; d <= m; ++d) {
    std::vector<MultiIndex> exps;
    MultiIndex cur(n + 1, 0);
    detail::exponents_of_degree(n + 1, d, cur, 0, exps);
    for (auto& e : exps) out.push_back(Polynomial::monomial(std::move(e)));
  }
  return out;
}

/// dim of degree-k spherical harmonics on S^n: C(n+k, n) - C(n+k-2, n).
inline long harmonic_dimension(int n, int k) {
  auto binom = [](long a, long b) -> long {
    if (b < 0 || a < b) return 0;
    long r = 1;
    for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  return binom(n + k, n) - binom(n + k - 2, n);
}

/// A spanning, linearly independent set for P_m restricted to S^n (or its
/// zero-mean subspace), with the exact Gram matrix of sphere inner products.
struct RestrictedBasis {
  int dim_sphere = 0;
  int degree = 0;
  bool zero_mean = true;
  std::vector<Polynomial> members;
  Eigen::MatrixXd gram;
  double condition = 0.0;           // of the diagonally normalized Gram
  std::vector<std::string> warnings;

  std::size_t size() const { return members.size(); }
  double norm(std::size_t k) const { return std::sqrt(gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))); }

  /// Member k scaled to unit L^2(S^n, mu) norm.
  Polynomial normalized(std::size_t k) const { return members[k] * (1.0 / norm(k)); }
  std::vector<Polynomial> normalized_members() const {
    std::vector<Polynomial> out;
    for (std::size_t k = 0; k < size(); ++k) out.push_back(normalized(k));
    return out;
  }
};

inline constexpr double kRankThreshold = 1e-10;

namespace detail {

inline RestrictedBasis reduce_basis(int n, int m, bool zero_mean, std::vector<Polynomial> candidates) {
  const std::size_t count = candidates.size();
  Eigen::MatrixXd g(count, count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i; j < count; ++j)
      g(i, j) = g(j, i) = sphere_inner_product(candidates[i], candidates[j]);

  // pivoted Cholesky on the diagonally normalized Gram
  Eigen::VectorXd scale = g.diagonal().cwiseSqrt();
  Eigen::MatrixXd a = scale.cwiseInverse().asDiagonal() * g * scale.cwiseInverse().asDiagonal();
  std::vector<int> remaining(count);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<int> chosen;
  Eigen::MatrixXd work = a;
  double largest = 0.0;
  RestrictedBasis basis;
  while (!remaining.empty()) {
    int best = -1;
    double best_val = -1.0;
    for (int r : remaining)
      if (work(r, r) > best_val) {
        best_val = work(r, r);
        best = r;
      }
    if (chosen.empty()) largest = best_val;
    if (best_val <= kRankThreshold * largest) {
      if (best_val > 0.1 * kRankThreshold * largest)
        basis.warnings.push_back("rejected pivot " + std::to_string(best_val) + " within 10x of the rank threshold");
      break;
    }
    if (best_val <= 10.0 * kRankThreshold * largest)
      basis.warnings.push_back("accepted pivot " + std::to_string(best_val) + " within 10x of the rank threshold");
    chosen.push_back(best);
    remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    const double piv = std::sqrt(best_val);
    Eigen::VectorXd col = work.col(best) / piv;
    for (int r : remaining)
      for (int s : remaining) work(r, s) -= col[r] * col[s];
  }
  std::sort(chosen.begin(), chosen.end());

  basis.dim_sphere = n;
  basis.degree = m;
  basis.zero_mean = zero_mean;
  for (int c : chosen) basis.members.push_back(candidates[c]);
  const auto l = static_cast<Eigen::Index>(chosen.size());
  basis.gram.resize(l, l);
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index j = 0; j < l; ++j) basis.gram(i, j) = g(chosen[i], chosen[j]);
  if (l > 0) {
    Eigen::VectorXd d = basis.gram.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd normalized = d.asDiagonal() * basis.gram * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
    basis.condition = eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
  }
  return basis;
}

}  // namespace detail

/// Basis of the zero-mean polynomials of degree <= m restricted to S^n:
/// mean-subtracted monomials reduced by pivoted Cholesky of the exact Gram.
inline RestrictedBasis restricted_zero_mean_basis(int n, int m) {
  if (n < 1) throw DomainError("restricted_zero_mean_basis: require n >= 1");
  if (m < 1) throw DomainError("restricted_zero_mean_basis: require m >= 1");
  const double area = sphere_area(n);
  std::vector<Polynomial> candidates;
  for (auto& mono : monomial_basis(n, m)) {
    if (mono.degree() == 0) continue;
    const double mean = sphere_integral(mono) / area;
    Polynomial centered = mono - Polynomial::constant(n + 1, mean);
    candidates.push_back(std::move(centered));
  }
  return detail::reduce_basis(n, m, true, std::move(candidates));
}

/// Basis of all of P_m restricted to S^n (constant included).
inline RestrictedBasis restricted_basis(int n, int m) {
  if (n < 1 || m < 0) throw DomainError("restricted_basis: require n >= 1, m >= 0");
  return detail::reduce_basis(n, m, false, monomial_basis(n, m));
}

}  // namespace mtlab
