#pragma once

// Sharp constants of the Moser-Trudinger and Moser-Trudinger-Onofri
// inequalities for W^{s, n/s} on n-manifolds.

#include <cmath>
#include <numbers>

#include "mtlab/errors.hpp"
#include "mtlab/sphere.hpp"

namespace mtlab {

struct MTConstants {
  int s = 1;
  int n = 2;
  double a = 0.0;      // exponential-class constant
  double alpha = 0.0;  // Onofri-class constant
};

/// a_n = n |S^{n-1}|^{1/(n-1)}
inline double mt_a(int n) {
  if (n < 2) throw DomainError("mt_a: require n >= 2");
  return n * std::pow(sphere_area(n - 1), 1.0 / (n - 1));
}

/// alpha_n = ((n-1)/n)^{n-1} / |S^{n-1}|
inline double mt_alpha(int n) {
  if (n < 2) throw DomainError("mt_alpha: require n >= 2");
  return std::pow((n - 1.0) / n, n - 1) / sphere_area(n - 1);
}

inline MTConstants mt_constants(int s, int n) {
  if (s < 1) throw DomainError("mt_constants: require s >= 1");
  if (s >= n) throw DomainError("require s < n");
  const double pi_half_n = std::pow(std::numbers::pi, 0.5 * n);
  const double gamma_ratio = (s % 2 == 0) ? std::tgamma(0.5 * s) / std::tgamma(0.5 * (n - s))
                                          : std::tgamma(0.5 * (s + 1)) / std::tgamma(0.5 * (n - s + 1));
  const double kernel = pi_half_n * std::pow(2.0, s) * gamma_ratio;
  const double shell = sphere_area(n - 1);
  MTConstants c;
  c.s = s;
  c.n = n;
  c.a = n / shell * std::pow(kernel, static_cast<double>(n) / (n - s));
  c.alpha = s * std::pow((n - s) * shell / n, static_cast<double>(n - s) / s) * std::pow(1.0 / kernel, static_cast<double>(n) / s);
  return c;
}

}  // namespace mtlab
