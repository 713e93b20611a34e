#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mtlab/grid.hpp"
#include "mtlab/polynomial.hpp"
#include "mtlab/sphere.hpp"

using namespace mtlab;
constexpr double kPi = std::numbers::pi;

namespace {

// Monte Carlo oracles, independent of the Gamma-function formulas.

// |S^3| = 4 vol(B^4); vol(B^4) by hit-or-miss in [-1, 1]^4.
double mc_area_s3(int samples) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  long hits = 0;
  for (int i = 0; i < samples; ++i) {
    double r2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double c = u(rng);
      r2 += c * c;
    }
    hits += (r2 <= 1.0);
  }
  return 4.0 * 16.0 * static_cast<double>(hits) / samples;
}

// area(S^n) * mean of x^alpha under uniform sampling (normalized Gaussians)
double mc_moment(const std::vector<int>& alpha, int samples, std::uint64_t seed) {
  const int n = static_cast<int>(alpha.size()) - 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(alpha.size());
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r2 = 0.0;
    for (auto& c : x) {
      c = g(rng);
      r2 += c * c;
    }
    const double r = std::sqrt(r2);
    double v = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) v *= std::pow(x[k] / r, alpha[k]);
    sum += v;
  }
  const double area = (n == 2) ? 4.0 * kPi : 2.0 * kPi * kPi;  // only used for n in {2, 3}
  return area * sum / samples;
}

std::vector<std::vector<int>> multi_indices(int ambient, int max_degree) {
  std::vector<std::vector<int>> out;
  for (const auto& p : monomial_basis(ambient - 1, max_degree)) out.push_back(p.terms().begin()->first);
  return out;
}

double grid_monomial(const QuadratureGrid& g, const std::vector<int>& alpha) {
  return g.integrate([&](const auto& x) {
    double v = 1.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) v *= std::pow(x[k], alpha[k]);
    return v;
  });
}

}  // namespace

TEST(SphereArea, KnownValues) {
  EXPECT_NEAR(sphere_area(1), 2.0 * kPi, 1e-14);
  EXPECT_NEAR(sphere_area(2), 4.0 * kPi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 2.0 * kPi * kPi, 1e-13);
  EXPECT_THROW(sphere_area(0), DomainError);
}

TEST(SphereArea, S3AgainstMonteCarlo) {
  const double mc = mc_area_s3(10'000'000);
  EXPECT_NEAR(sphere_area(3) / mc, 1.0, 1e-3);
}

TEST(SpherePoint, RenormalizesInput) {
  SpherePoint p{3.0, 4.0, 0.0};
  EXPECT_NEAR(p.coords().norm(), 1.0, 1e-15);
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_THROW((SpherePoint{0.0, 0.0, 0.0}), DomainError);
}

TEST(GeodesicDistance, SpecialConfigurations) {
  const auto e1 = SpherePoint::axis(3, 0);
  const auto e2 = SpherePoint::axis(3, 1);
  const auto m1 = SpherePoint::axis(3, 0, -1.0);
  EXPECT_EQ(geodesic_distance(e1, e1), 0.0);
  EXPECT_NEAR(geodesic_distance(e1, m1), kPi, 1e-15);
  EXPECT_NEAR(geodesic_distance(e1, e2), kPi / 2, 1e-15);
}

TEST(GeodesicDistance, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto x = random_sphere_point(3, rng);
    const auto y = random_sphere_point(3, rng);
    const auto z = random_sphere_point(3, rng);
    EXPECT_EQ(geodesic_distance(x, y), geodesic_distance(y, x));
    EXPECT_LE(geodesic_distance(x, z), geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12);
    EXPECT_GT(geodesic_distance(x, y), 0.0);
  }
}

TEST(MonomialMoment, SpecExamples) {
  EXPECT_EQ(monomial_moment({1, 0, 0}, 2), 0.0);
  EXPECT_NEAR(monomial_moment({2, 0, 0}, 2), 4.0 * kPi / 3.0, 1e-14);
  EXPECT_NEAR(monomial_moment({2, 2, 0}, 2), 4.0 * kPi / 15.0, 1e-14);
  EXPECT_NEAR(monomial_moment({0, 0, 0, 0}, 3), sphere_area(3), 1e-13);
  EXPECT_THROW(monomial_moment({-2, 0, 0}, 2), DomainError);
}

TEST(MonomialMoment, AgreesWithMonteCarlo) {
  const int samples = 10'000'000;
  EXPECT_NEAR(mc_moment({2, 2, 0}, samples, 99) / monomial_moment({2, 2, 0}, 2), 1.0, 2e-3);
  EXPECT_NEAR(mc_moment({4, 0, 0}, samples / 5, 100) / monomial_moment({4, 0, 0}, 2), 1.0, 5e-3);
  EXPECT_NEAR(mc_moment({2, 0, 2, 2}, samples / 5, 101) / monomial_moment({2, 0, 2, 2}, 3), 1.0, 2e-2);
}

TEST(BuildGrid, WeightsSumToAreaAndPositive) {
  for (int n : {2, 3, 4}) {
    const QuadratureGrid g = build_grid(n);
    double sum = 0.0;
    for (double w : g.weights) {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum / sphere_area(n), 1.0, 1e-12) << "n = " << n;
    EXPECT_GT(g.mesh_scale, 0.0);
  }
  const QuadratureGrid g64 = build_grid(2, 64);
  EXPECT_EQ(g64.size(), 64u * 128u);
  EXPECT_NEAR(g64.integrate([](const auto&) { return 1.0; }), 4.0 * kPi, 1e-10);
}

TEST(BuildGrid, UnsupportedDimensionOrResolution) {
  EXPECT_THROW(build_grid(5, 16), DomainError);
  EXPECT_THROW(build_grid(1, 16), DomainError);
  EXPECT_THROW(build_grid(2, 4), DomainError);
}

TEST(BuildGrid, SpecExamplesAgainstMomentFormula) {
  const QuadratureGrid g2 = build_grid(2, 64);
  EXPECT_NEAR(grid_monomial(g2, {2, 0, 0}) / (4.0 * kPi / 3.0), 1.0, 1e-8);
  const QuadratureGrid g3 = build_grid(3, 32);
  const double exact = monomial_moment({2, 2, 0, 0}, 3);
  EXPECT_NEAR(grid_monomial(g3, {2, 2, 0, 0}) / exact, 1.0, 1e-6);
}

TEST(BuildGrid, MomentConsistencyUpToDegreeSix) {
  for (int n : {2, 3}) {
    const QuadratureGrid g = build_grid(n);
    for (const auto& alpha : multi_indices(n + 1, 6)) {
      const double exact = monomial_moment(alpha, n);
      const double q = grid_monomial(g, alpha);
      if (exact == 0.0)
        EXPECT_NEAR(q, 0.0, 1e-12);
      else
        EXPECT_NEAR(q / exact, 1.0, 1e-8);
    }
  }
}

TEST(BuildGrid, ErrorNonIncreasingOverDoublingSweep) {
  for (int n : {2, 3}) {
    double previous = std::numeric_limits<double>::infinity();
    for (int res : {1, 2, 4, 8, 16}) {
      const QuadratureGrid g = sphere_product_rule(n, res);
      double worst = 0.0;
      for (const auto& alpha : multi_indices(n + 1, 6)) {
        const double exact = monomial_moment(alpha, n);
        worst = std::max(worst, std::abs(grid_monomial(g, alpha) - exact));
      }
      EXPECT_LE(worst, previous + 1e-13) << "n = " << n << " resolution " << res;
      previous = worst;
    }
    EXPECT_LT(previous, 1e-12);
  }
}

TEST(BuildGrid, RotationInvariance) {
  std::mt19937_64 rng(2024);
  for (int n : {2, 3}) {
    const QuadratureGrid g = build_grid(n);
    const Eigen::MatrixXd q = random_orthogonal(n + 1, rng);
    // random polynomial of degree 4
    Polynomial p(n + 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (const auto& m : monomial_basis(n, 4)) p += m * coef(rng);
    const double direct = g.integrate([&](const auto& x) { return p(x); });
    const double rotated = g.integrate([&](const auto& x) { return p(Eigen::VectorXd(q * x)); });
    EXPECT_NEAR(direct, rotated, 1e-10);
    EXPECT_NEAR(direct, sphere_integral(p), 1e-10);
  }
}

TEST(GridGradient, HighOrderFiniteDifferences) {
  const QuadratureGrid g = build_grid(2, 64);
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) values[i] = g.points(2, static_cast<Eigen::Index>(i));
  const auto grad = grid_gradient_norms(g, values);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = g.points(2, static_cast<Eigen::Index>(i));
    worst = std::max(worst, std::abs(grad[i] * grad[i] - (1.0 - z * z)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(RadialQuadrature, SpecExamples) {
  auto one = [](double) { return 1.0; };
  EXPECT_NEAR(radial_quadrature(2, one, 0.0, kPi, 16), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(radial_quadrature(2, one, 0.0, kPi / 2, 16), 2.0 * kPi, 1e-12);
  auto inv_sq = [](double t) { return 1.0 / (t * t); };
  const double value = radial_quadrature(2, inv_sq, 1e-3, 0.5, 16);
  // reference: 10x nodes per panel
  const double reference = radial_quadrature(2, inv_sq, 1e-3, 0.5, 160);
  EXPECT_NEAR(value / reference, 1.0, 1e-8);
  // leading behavior 2 pi log(0.5 / 1e-3)
  EXPECT_NEAR(value / (2.0 * kPi * std::log(500.0)), 1.0, 1e-2);
}

TEST(RadialQuadrature, MonomialsInCosine) {
  // integral over S^3 of x_0^4 equals |S^2| * int cos^4 t sin^2 t dt
  auto f = [](double t) { return std::pow(std::cos(t), 4); };
  EXPECT_NEAR(radial_quadrature(3, f, 0.0, kPi, 16) / monomial_moment({4, 0, 0, 0}, 3), 1.0, 1e-9);
}

TEST(RadialQuadrature, ErrorsAndPreconditions) {
  auto bad = [](double t) { return t < 0.2 ? std::nan("") : 1.0; };
  EXPECT_THROW(radial_quadrature(2, bad, 0.0, 1.0, 16), NumericError);
  auto one = [](double) { return 1.0; };
  EXPECT_THROW(radial_quadrature(2, one, 0.5, 0.2, 16), DomainError);
  EXPECT_THROW(radial_quadrature(2, one, 0.0, 1.0, 8), DomainError);
}

TEST(CapPatch, IntegratesPolynomialsOverCaps) {
  std::mt19937_64 rng(5);
  for (int n : {2, 3}) {
    const auto c = random_sphere_point(n, rng);
    const double cut[] = {0.1};
    // whole sphere as a cap: compare with exact moments
    const CapPatch patch = make_cap_patch(c, graded_panels(0.0, kPi, cut), 20, 8);
    Polynomial p(n + 1);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (const auto& m : monomial_basis(n, 4)) p += m * coef(rng);
    const double q = patch.integrate([&](double, const Eigen::VectorXd& x) { return p(x); });
    EXPECT_NEAR(q, sphere_integral(p), 1e-11);
    EXPECT_NEAR(patch.integrate_radial([](double) { return 1.0; }), sphere_area(n), 1e-12);
  }
}
