#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mtlab/moment_design.hpp"

using namespace mtlab;
constexpr double kPi = std::numbers::pi;

namespace {

// Design average vs sphere average of a random polynomial of degree <= m,
// checked against exact moments.
double exactness_defect(const MomentDesign& d, std::mt19937_64& rng) {
  Polynomial p(d.n + 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (const auto& mono : monomial_basis(d.n, d.m)) p += mono * coef(rng);
  double design_avg = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) design_avg += d.weights[i] * p(d.points[i].coords());
  return std::abs(design_avg - sphere_integral(p) / sphere_area(d.n));
}

// Zero weighted first moment: x3 = -(a x1 + b x2) normalized, a, b > 0.
std::vector<SpherePoint> balanced_triple(std::mt19937_64& rng) {
  const auto x1 = random_sphere_point(2, rng);
  const auto x2 = random_sphere_point(2, rng);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  const Eigen::VectorXd x3 = -(w(rng) * x1.coords() + w(rng) * x2.coords());
  return {x1, x2, SpherePoint(x3)};
}

}  // namespace

TEST(MomentResidual, AntipodalPairFirstMoments) {
  MomentDesign d;
  d.n = 2;
  d.m = 1;
  d.points = {SpherePoint::axis(3, 0), SpherePoint::axis(3, 0, -1.0)};
  d.weights = {0.5, 0.5};
  EXPECT_LE(moment_residual(d), 1e-15);
}

TEST(MomentResidual, TetrahedronSecondMoments) {
  const double s = 1.0 / std::sqrt(3.0);
  MomentDesign d;
  d.n = 2;
  d.m = 2;
  d.points = {SpherePoint{s, s, s}, SpherePoint{s, -s, -s}, SpherePoint{-s, s, -s}, SpherePoint{-s, -s, s}};
  d.weights = {0.25, 0.25, 0.25, 0.25};
  EXPECT_LE(moment_residual(d), 1e-12);
}

TEST(MomentResidual, SinglePointAgainstNormalizedBasisOracle) {
  MomentDesign d;
  d.n = 2;
  d.m = 1;
  d.points = {SpherePoint::axis(3, 0)};
  d.weights = {1.0};
  // zero-mean basis for m = 1 is the coordinates; unit L^2(mu) norm is sqrt(4 pi / 3)
  const double oracle = 1.0 / std::sqrt(4.0 * kPi / 3.0);
  EXPECT_NEAR(moment_residual(d), oracle, 1e-14);
  EXPECT_GT(moment_residual(d), 0.4);
}

TEST(MomentResidual, RejectsBadWeights) {
  MomentDesign d = simplex_design(2);
  d.weights[0] = -0.25;
  d.weights[1] = 0.75;
  EXPECT_THROW(moment_residual(d), InvariantError);
  d.weights = {0.3, 0.3, 0.3, 0.3};
  EXPECT_THROW(moment_residual(d), InvariantError);
}

TEST(SolveWeights, Tetrahedron) {
  const auto simplex = simplex_design(2);
  const auto sol = solve_weights(simplex.points, 2);
  ASSERT_TRUE(sol.feasible);
  for (double w : sol.weights) EXPECT_NEAR(w, 0.25, 1e-10);
  EXPECT_LE(sol.residual, 1e-10);
}

TEST(SolveWeights, AntipodalPair) {
  const auto sol = solve_weights({SpherePoint::axis(3, 0), SpherePoint::axis(3, 0, -1.0)}, 1);
  ASSERT_TRUE(sol.feasible);
  EXPECT_NEAR(sol.weights[0], 0.5, 1e-12);
  EXPECT_NEAR(sol.weights[1], 0.5, 1e-12);
}

TEST(SolveWeights, ThreePointsAreInfeasibleForDegreeTwo) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SpherePoint> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(random_sphere_point(2, rng));
    EXPECT_FALSE(solve_weights(pts, 2).feasible);
    EXPECT_FALSE(solve_weights(balanced_triple(rng), 2).feasible);
  }
}

TEST(SolveWeights, WeightsAreOnTheSimplex) {
  std::mt19937_64 rng(8);
  std::vector<SpherePoint> pts;
  for (int i = 0; i < 12; ++i) pts.push_back(random_sphere_point(2, rng));
  const auto sol = solve_weights(pts, 2);
  double sum = 0.0;
  for (double w : sol.weights) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SimplexDesign, GeometryAndExactness) {
  for (int n : {1, 2, 3, 4, 6}) {
    const MomentDesign d = simplex_design(n);
    ASSERT_EQ(d.size(), static_cast<std::size_t>(n + 2));
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n + 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
      sum += d.points[i].coords();
      EXPECT_DOUBLE_EQ(d.weights[i], 1.0 / (n + 2));
      for (std::size_t j = i + 1; j < d.size(); ++j)
        EXPECT_NEAR(d.points[i].coords().dot(d.points[j].coords()), -1.0 / (n + 1), 1e-14);
    }
    EXPECT_LE(sum.norm(), 1e-14);
    EXPECT_LE(d.residual, 1e-12);
  }
}

TEST(SimplexDesign, MutualDotFromCenteringIdentity) {
  // |sum x_i|^2 = N + N(N-1) c = 0 gives c = -1/(N-1) = -1/(n+1); n = 3 -> -1/4
  const MomentDesign d = simplex_design(3);
  EXPECT_NEAR(d.points[0].coords().dot(d.points[3].coords()), -0.25, 1e-14);
}

TEST(SimplexDesign, CoordinateMomentIdentities) {
  for (int n : {2, 3, 4}) {
    const MomentDesign d = simplex_design(n);
    for (int i = 0; i <= n; ++i) {
      double first = 0.0;
      double second = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        first += d.weights[k] * d.points[k][i];
        second += d.weights[k] * d.points[k][i] * d.points[k][i];
      }
      EXPECT_NEAR(first, 0.0, 1e-12);
      EXPECT_NEAR(second, 1.0 / (n + 1), 1e-12);
      for (int j = i + 1; j <= n; ++j) {
        double mixed = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) mixed += d.weights[k] * d.points[k][i] * d.points[k][j];
        EXPECT_NEAR(mixed, 0.0, 1e-12);
      }
    }
  }
}

TEST(SimplexDesign, RotationEquivariance) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    MomentDesign d = simplex_design(3);
    const Eigen::MatrixXd q = random_orthogonal(4, rng);
    for (auto& p : d.points) p = rotate(q, p);
    EXPECT_TRUE(moment_residual(d) <= kValidResidual);
  }
}

TEST(Exactness, ValidDesignsIntegrateRandomPolynomials) {
  std::mt19937_64 rng(77);
  const MomentDesign designs[] = {simplex_design(2), simplex_design(3), antipodal_design(2), antipodal_design(4)};
  for (const auto& d : designs) {
    ASSERT_TRUE(d.valid());
    for (int trial = 0; trial < 100; ++trial) EXPECT_LE(exactness_defect(d, rng), 1e-8);
  }
}

TEST(CertifyLowerBound, SpecExamples) {
  std::mt19937_64 rng(11);
  const auto triple = balanced_triple(rng);
  const auto cert = certify_lower_bound(triple);
  ASSERT_TRUE(cert.has_value());
  EXPECT_TRUE(cert->verify());
  EXPECT_NEAR(cert->witness_value, 1.0 / 3.0, 1e-14);

  EXPECT_FALSE(certify_lower_bound(simplex_design(2).points).has_value());

  std::vector<SpherePoint> copies(4, SpherePoint::axis(3, 0));
  const auto rank_one = certify_lower_bound(copies);
  ASSERT_TRUE(rank_one.has_value());
  EXPECT_TRUE(rank_one->verify());
}

TEST(CertifyLowerBound, GenericTriplesSpanEverything) {
  std::mt19937_64 rng(12);
  std::vector<SpherePoint> pts;
  for (int i = 0; i < 3; ++i) pts.push_back(random_sphere_point(2, rng));
  EXPECT_FALSE(certify_lower_bound(pts).has_value());
}

TEST(CertifyLowerBound, SoundnessAgainstWeightSolver) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<SpherePoint> pts = (trial % 2 == 0) ? balanced_triple(rng) : std::vector<SpherePoint>{};
    if (pts.empty()) {
      // n + 1 points of S^3 inside a random hyperplane
      const auto normal = random_sphere_point(3, rng);
      for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd v = random_sphere_point(3, rng).coords();
        v -= v.dot(normal.coords()) * normal.coords();
        pts.emplace_back(v);
      }
    }
    const auto cert = certify_lower_bound(pts);
    ASSERT_TRUE(cert.has_value());
    EXPECT_TRUE(cert->verify());
    EXPECT_FALSE(solve_weights(pts, 2).feasible);
  }
}

TEST(SearchDesign, TetrahedronIsFound) {
  const auto result = search_design(2, 2, 4, 20, 500);
  EXPECT_LE(result.best.residual, 1e-8);
  EXPECT_TRUE(result.best.valid());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      EXPECT_NEAR(result.best.points[i].coords().dot(result.best.points[j].coords()), -1.0 / 3.0, 1e-6);
}

TEST(SearchDesign, AntipodalPairIsFound) {
  const auto result = search_design(2, 1, 2, 20, 500);
  ASSERT_TRUE(result.best.valid());
  EXPECT_NEAR(result.best.points[0].coords().dot(result.best.points[1].coords()), -1.0, 1e-6);
}

TEST(SearchDesign, ThreePointsNeverValid) {
  const auto result = search_design(2, 2, 3, 50, 2000);
  EXPECT_FALSE(result.best.valid());
  for (double r : result.seed_residuals) EXPECT_GE(r, 1e-3);
}

TEST(SearchDesign, DeterministicAndValidUnderRotation) {
  const auto a = search_design(2, 2, 4, 3, 200, 5);
  const auto b = search_design(2, 2, 4, 3, 200, 5);
  ASSERT_EQ(a.seed_residuals, b.seed_residuals);
  for (std::size_t i = 0; i < a.best.size(); ++i) EXPECT_EQ(a.best.points[i].coords(), b.best.points[i].coords());
  std::mt19937_64 rng(4);
  MomentDesign rotated = a.best;
  const Eigen::MatrixXd q = random_orthogonal(3, rng);
  for (auto& p : rotated.points) p = rotate(q, p);
  EXPECT_EQ(rotated.valid() || moment_residual(rotated) <= kValidResidual, a.best.valid());
}
