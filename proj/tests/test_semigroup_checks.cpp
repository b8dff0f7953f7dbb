#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lsi/error.hpp"
#include "lsi/sampling.hpp"
#include "lsi/semigroup_checks.hpp"

using namespace lsi;
using lsi::testing::double_well;
using lsi::testing::gaussian;

TEST(Harnack, DiagonalPairsReduceToCauchySchwarz) {
  const auto& s = double_well(1001);
  std::mt19937_64 rng(1);
  const GridFunction f = random_positive_function(s.grid, rng, 2.0);
  std::vector<NodePair> pairs;
  for (std::size_t i = 0; i < s.grid.size(); i += 37) pairs.emplace_back(i, i);
  const auto r = check_harnack(*s.dec, f, 1.0, {0.1, 1.0, 3.0}, pairs);
  EXPECT_TRUE(r.passed);
  EXPECT_GE(r.worst_margin, -1e-12);
}

TEST(Harnack, GaussianSharpCurvature) {
  const auto& s = gaussian();
  const GridFunction f = (1.0 + s.x().array().square()).matrix();
  std::mt19937_64 rng(2);
  const auto pairs = sample_pairs(s.grid, 50, rng);
  const auto r = check_harnack(*s.dec, f, -1.0, {1.0}, pairs);
  EXPECT_TRUE(r.passed) << r.worst_margin;
  EXPECT_EQ(r.samples, 50u);
}

TEST(Harnack, DoubleWellWithCurvatureBound) {
  const auto& s = double_well();
  std::mt19937_64 rng(3);
  const auto pairs = sample_pairs(s.grid, 100, rng);
  for (int k = 0; k < 5; ++k) {
    const GridFunction f = random_positive_function(s.grid, rng, 2.0);
    EXPECT_TRUE(check_harnack(*s.dec, f, 1.0, {0.1, 1.0}, pairs).passed);
  }
}

TEST(Harnack, ZeroCurvatureLimitAndErrors) {
  const auto& s = gaussian(1001);
  std::mt19937_64 rng(4);
  const auto pairs = sample_pairs(s.grid, 20, rng);
  const GridFunction f = random_positive_function(s.grid, rng);
  const auto at_zero = check_harnack(*s.dec, f, 0.0, {1.0}, pairs);
  const auto near_zero = check_harnack(*s.dec, f, 1e-9, {1.0}, pairs);
  EXPECT_NEAR(at_zero.worst_margin, near_zero.worst_margin, 1e-7);
  GridFunction neg = f;
  neg[3] = -1.0;
  EXPECT_THROW(check_harnack(*s.dec, neg, 1.0, {1.0}, pairs), ConfigError);
  EXPECT_THROW(check_harnack(*s.dec, f, 1.0, {0.0}, pairs), ConfigError);
}

TEST(Harnack, MarginShrinksAsKDecreases) {
  const auto& s = double_well(1001);
  std::mt19937_64 rng(5);
  const GridFunction f = random_positive_function(s.grid, rng, 2.0);
  const std::vector<NodePair> pair = {{200, 700}};
  double previous = std::numeric_limits<double>::infinity();
  for (double K : {4.0, 2.0, 1.5, 1.0}) {
    const double m = check_harnack(*s.dec, f, K, {0.5}, pair).worst_margin;
    EXPECT_LE(m, previous);
    previous = m;
  }
}

TEST(Harnack, SkipsVanishingNodes) {
  const auto& s = gaussian(1001);
  const GridFunction zero = GridFunction::Zero(static_cast<Eigen::Index>(s.grid.size()));
  const auto r = check_harnack(*s.dec, zero, 1.0, {1.0}, {{10, 20}, {30, 40}});
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_TRUE(r.passed);
}

TEST(GradientCommutation, OrnsteinUhlenbeckEquality) {
  const auto& s = gaussian();
  // Equality case: only the O(h^2) grid error of the flow remains.
  const auto r = check_gradient_commutation(*s.dec, s.x(), -1.0, {0.5, 1.0, 2.0});
  EXPECT_LE(std::abs(r.worst_margin), 1e-3);
  EXPECT_LE(std::abs(r.worst_margin), 1e-5);
}

TEST(GradientCommutation, TimeZeroAndDoubleWell) {
  const auto& s = double_well();
  std::mt19937_64 rng(6);
  for (int k = 0; k < 5; ++k) {
    const GridFunction f = random_smooth_function(s.grid, rng);
    const auto zero = check_gradient_commutation(*s.dec, f, 1.0, {0.0});
    EXPECT_NEAR(zero.worst_margin, 0.0, 1e-14);
    EXPECT_TRUE(check_gradient_commutation(*s.dec, f, 1.0, {0.5, 2.0}).passed);
  }
}

TEST(PtUpper, GaussianMu0) {
  const auto& s = gaussian();
  const GridFunction ones = GridFunction::Ones(static_cast<Eigen::Index>(s.grid.size()));
  const auto r = check_pt_upper(*s.dec, ones, 0.1, 1.0, Point::Zero(1));
  EXPECT_NEAR(r.mu0, 0.84515425472851768, 1e-12);
  EXPECT_NEAR(r.mu0, 1.0 / std::sqrt(1.4), 1e-3);
  EXPECT_TRUE(r.report.passed);
  EXPECT_THROW(check_pt_upper(*s.dec, ones, 0.0, 1.0, Point::Zero(1)), ConfigError);
  EXPECT_THROW(check_pt_upper(*s.dec, ones, 0.1, 0.0, Point::Zero(1)), ConfigError);
}

TEST(PtUpper, DoubleWellSinProfile) {
  const auto& s = double_well();
  const GridFunction f = (1.0 + s.x().array().sin()).matrix();
  EXPECT_TRUE(check_pt_upper(*s.dec, f, 1.0, 1.0, Point::Zero(1)).report.passed);
}

TEST(BasePointMass, BoundedAndTendsToOne) {
  const auto& s = double_well(1001);
  double previous = 0.0;
  for (double K : {1.0, 0.1, 0.01, 1e-3, 1e-5}) {
    const double mu0 = base_point_mass(s.m(), s.grid, Point::Zero(1), K);
    EXPECT_LE(mu0, 1.0);
    EXPECT_GT(mu0, previous);
    previous = mu0;
  }
  EXPECT_NEAR(previous, 1.0, 1e-4);
}

TEST(SamplePairs, StayInBulk) {
  const auto& s = gaussian(1001);
  std::mt19937_64 rng(7);
  for (const auto& [i, j] : sample_pairs(s.grid, 200, rng)) {
    EXPECT_LE(std::abs(s.grid.node(i)[0]), 0.75 * 8.0 + 1e-12);
    EXPECT_LE(std::abs(s.grid.node(j)[0]), 0.75 * 8.0 + 1e-12);
  }
}
