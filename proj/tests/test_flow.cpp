#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lsi/error.hpp"
#include "lsi/flow.hpp"
#include "lsi/sampling.hpp"
#include "lsi/semigroup_checks.hpp"

using namespace lsi;
using lsi::testing::double_well;
using lsi::testing::gaussian;

namespace {

std::vector<double> ladder(double from, double to, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(from + (to - from) * k / (n - 1));
  return out;
}

ConstantChain chain_for(const lsi::testing::System& s, double K) {
  const auto rep = certify(s.p, *s.dec, [K] {
    CertifyOptions o;
    o.K_override = K;
    o.random_functions = 10;
    o.oracle.starts = 3;
    o.oracle.iters = 20;
    return o;
  }());
  return *rep.chain;
}

const ConstantChain& double_well_chain() {
  static const ConstantChain ch = [] {
    const auto& s = double_well();
    CertifyOptions o;
    o.random_functions = 10;
    o.oracle.starts = 3;
    o.oracle.iters = 20;
    return *certify(s.p, *s.dec, o).chain;
  }();
  return ch;
}

}  // namespace

TEST(Phi, ConstantIsZero) {
  const auto& s = gaussian(1001);
  const GridFunction c = GridFunction::Constant(static_cast<Eigen::Index>(s.grid.size()), 2.0);
  const auto tr = trace_phi(*s.dec, c, 1.0, {0.5, 1.0, 2.0});
  for (double v : tr.values.at("Phi")) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Phi, GaussianTiltIsEqualityCase) {
  // Exponentials saturate the Gaussian inequality and stay exponential under the flow.
  const auto& s = gaussian();
  const GridFunction f = (0.5 * s.x().array()).exp();
    // Zero up to the O(h^2) grid error; the separate terms are of order 0.1.
  for (double t : {0.0, 0.5, 2.0, 10.0}) EXPECT_NEAR(phi_functional(*s.dec, f, 1.0, t), 0.0, 1e-6);
}

TEST(Phi, RandomPositiveFunctions) {
  const auto& s = gaussian();
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const auto tr = trace_phi(*s.dec, random_positive_function(s.grid, rng), 1.0, ladder(0.05, 5.0, 20));
    EXPECT_TRUE(tr.monotone) << tr.worst_slope;
    EXPECT_GT(tr.values.at("Phi").front(), 0.0);
  }
}

TEST(Phi, SinProfileSlopesNonpositive) {
  const auto& s = gaussian();
  const GridFunction f = (1.0 + 0.5 * s.x().array().sin()).matrix();
  EXPECT_TRUE(trace_phi(*s.dec, f, 1.0, ladder(0.01, 5.0, 20)).monotone);
}

TEST(Phi, Errors) {
  const auto& s = gaussian(1001);
  EXPECT_THROW(trace_phi(*s.dec, s.x(), 1.0, {1.0}), ConfigError);
  const GridFunction one = GridFunction::Ones(static_cast<Eigen::Index>(s.grid.size()));
  EXPECT_THROW(trace_phi(*s.dec, one, 0.0, {1.0}), ConfigError);
}

TEST(Psi, ConstantIsZero) {
  const auto& s = double_well(1001);
  const GridFunction c = GridFunction::Constant(static_cast<Eigen::Index>(s.grid.size()), -1.5);
  const auto tr = trace_psi(*s.dec, c, double_well_chain(), {1.0, 2.0});
  for (double v : tr.values.at("Psi")) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Psi, DoubleWellModeProbe) {
  const auto& s = double_well();
  const GridFunction m1 = s.dec->mode(1);
  const GridFunction f = (1.0 + 0.3 * m1.array() / m1.cwiseAbs().maxCoeff()).matrix();
  const auto tr = trace_psi(*s.dec, f, double_well_chain(), ladder(1.0, 10.0, 20));
  EXPECT_TRUE(tr.monotone) << tr.worst_slope;
  EXPECT_GE(tr.values.at("Psi").front(), 0.0);
  EXPECT_THROW(trace_psi(*s.dec, f, double_well_chain(), {0.5}), ConfigError);
}

TEST(Psi, GaussianForcedBranch) {
  const auto& s = gaussian();
  const auto chain = chain_for(s, 0.1);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    const auto tr = trace_psi(*s.dec, random_smooth_function(s.grid, rng), chain, ladder(1.0, 10.0, 10));
    EXPECT_TRUE(tr.monotone);
  }
}

TEST(Theta, BoundsIdentityAndSign) {
  const auto& g = gaussian();
  const auto chain = chain_for(g, 0.1);
  const GridFunction constant = GridFunction::Ones(static_cast<Eigen::Index>(g.grid.size()));
  const auto th0 = theta_values(*g.dec, constant, 1.0);
  EXPECT_NEAR(th0.theta1, 0.0, 1e-12);
  EXPECT_NEAR(th0.theta2, 0.0, 1e-12);
  EXPECT_TRUE(theta_bounds(*g.dec, constant, chain).passed);
  EXPECT_TRUE(theta_bounds(*g.dec, (0.25 * g.x().array()).exp().matrix(), chain).passed);

  const auto& s = double_well();
  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    const GridFunction f = random_smooth_function(s.grid, rng);
    ASSERT_TRUE(theta_bounds(*s.dec, f, double_well_chain()).passed);
    for (double t : {0.3, 1.0, 4.0}) {
      const auto th = theta_values(*s.dec, f, t);
      EXPECT_GE(th.theta2, 0.0);
      EXPECT_NEAR(th.ent_pf2 - th.ent_star, th.theta1 + th.theta2, 1e-10 * std::max(1.0, th.ent_pf2));
    }
  }
}

TEST(EnergyDerivative, ConstantAndOrnsteinUhlenbeck) {
  const auto& s = gaussian();
  const GridFunction c = GridFunction::Ones(static_cast<Eigen::Index>(s.grid.size()));
  const auto zero = check_energy_derivative(*s.dec, s.p, c, 0.5);
  EXPECT_NEAR(zero.details.at("lhs"), 0.0, 1e-12);
  EXPECT_NEAR(zero.details.at("rhs"), 0.0, 1e-12);
  for (double t : {0.25, 1.0, 2.0}) {
    const auto r = check_energy_derivative(*s.dec, s.p, s.x(), t);
    EXPECT_NEAR(r.details.at("lhs"), -2.0 * std::exp(-2.0 * t), 1e-3 * std::exp(-2.0 * t));
    EXPECT_LE(r.details.at("relative_error"), 1e-3);
    EXPECT_TRUE(r.passed);
  }
}

TEST(EnergyDerivative, SecondModeConvergesAtSecondOrder) {
  const auto coarse = check_energy_derivative(*double_well(1001).dec, double_well(1001).p, double_well(1001).dec->mode(2), 0.5);
  const auto fine = check_energy_derivative(*double_well().dec, double_well().p, double_well().dec->mode(2), 0.5);
  EXPECT_TRUE(coarse.passed);
  EXPECT_TRUE(fine.passed);
  const double order = std::log2(coarse.details.at("relative_error") / fine.details.at("relative_error"));
  EXPECT_GE(order, 1.5) << coarse.details.at("relative_error") << " " << fine.details.at("relative_error");
}

TEST(VarianceAndEntStar, DerivativeIdentities) {
  const auto& s = double_well();
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const GridFunction f = random_smooth_function(s.grid, rng);
    const GridFunction g = random_positive_function(s.grid, rng, 2.0);
    for (double t : {0.2, 1.0}) {
      EXPECT_TRUE(check_variance_derivative(*s.dec, f, t).passed);
      const auto r = check_entstar_derivative(*s.dec, g, t);
      EXPECT_TRUE(r.passed) << r.details.at("relative_error");
    }
  }
}

TEST(Rothaus, ExamplesAndRandom) {
  const auto& s = double_well(1001);
  const auto n = static_cast<Eigen::Index>(s.grid.size());
  std::mt19937_64 rng(8);
  const GridFunction f = random_smooth_function(s.grid, rng);
  const auto a0 = check_rothaus(s.m(), f, 0.0);
  EXPECT_TRUE(a0.passed);
  const GridFunction k = GridFunction::Constant(n, 1.7);
  EXPECT_TRUE(check_rothaus(s.m(), k, -3.1).passed);
  std::uniform_real_distribution<double> a(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_TRUE(check_rothaus(s.m(), random_smooth_function(s.grid, rng), a(rng)).passed);
  }
}

TEST(FlowTable, ColumnsAndNaNs) {
  const auto& s = double_well(1001);
  const GridFunction f = (1.0 + 0.2 * s.x().array().cos()).matrix();
  const auto rows = flow_table(*s.dec, f, 0.0, nullptr, {0.0, 1.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(std::isnan(rows[0].phi));
  EXPECT_TRUE(std::isnan(rows[0].psi));
  EXPECT_NEAR(rows[0].energy, energy(s.gen(), f), 1e-14);
  EXPECT_LT(rows[1].energy, rows[0].energy);
}
