#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "coorbital/distance_form.hpp"
#include "test_support.hpp"

using namespace coorbital;

TEST(ConcyclicityE, KnownTriples) {
  const double r3 = std::sqrt(3.0);
  EXPECT_NEAR(concyclicity_E(r3, r3, r3), 0.0, 1e-13);
  EXPECT_NEAR(concyclicity_E(1.0, 1.0, r3), 0.0, 1e-13);
  EXPECT_DOUBLE_EQ(concyclicity_E(1.0, 1.0, 1.0), -2.0);
}

TEST(ConcyclicityE, VanishesOnRandomRingTriples) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const auto th = test::random_angles(rng, 3 + std::size_t(k % 6), 0.05);
    EXPECT_LT(concyclicity_residual(distances_from_config(RingConfiguration(th, 3.0))), 1e-10);
  }
}

TEST(DistanceSet, PolygonValuesAndValidation) {
  const auto sq = distances_from_config(RingConfiguration({0.0, kPi / 2, kPi, 3 * kPi / 2}, 3.0));
  EXPECT_NEAR(sq(0, 1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sq(0, 2), 2.0, 1e-15);
  std::vector<double> th(5);
  for (int i = 0; i < 5; ++i) th[std::size_t(i)] = kTwoPi * i / 5;
  const auto p = distances_from_config(RingConfiguration(th, 3.0));
  EXPECT_NEAR(p(0, 1), 2 * std::sin(kPi / 5), 1e-15);
  EXPECT_NEAR(p(0, 2), 2 * std::sin(2 * kPi / 5), 1e-15);
  Eigen::MatrixXd bad(3, 3);
  bad << 0, 0.1, 1.9, 0.1, 0, 0.1, 1.9, 0.1, 0;
  EXPECT_THROW(DistanceSet{bad}, DomainError);
}

TEST(ThreeBodyLagrange, EquilateralMultiplier) {
  const double r = std::sqrt(3.0);
  const double w = w_coefficient(r, 1, 1, PotentialExponent(3.0));
  const double lambda = -w / (2 * (9 + 2 * 3 - 4 * 3));
  const auto res = n3_lagrange_residuals(r, r, r, MassVector{1, 1, 1}, lambda, PotentialExponent(3.0));
  // Each residual cancels two terms of size r |w|.
  for (double v : res) EXPECT_NEAR(v, 0.0, 8 * std::numeric_limits<double>::epsilon() * r * std::abs(w));
}

TEST(ThreeBodyEliminated, EquilateralIsCritical) {
  const double r = std::sqrt(3.0);
  const auto res = n3_eliminated_residuals(r, r, r, MassVector{1, 1, 1}, PotentialExponent(3.0));
  EXPECT_NEAR(res[0], 0.0, 1e-14);
  EXPECT_NEAR(res[1], 0.0, 1e-14);
}

TEST(ThreeBodyEliminated, MatchesLagrangeAfterEliminatingMultiplier) {
  std::mt19937_64 rng(2);
  const PotentialExponent s(3.0);
  for (int k = 0; k < 200; ++k) {
    const auto th = test::random_angles(rng, 3, 0.3);
    const auto m = test::random_masses(rng, 3);
    const auto d = distances_from_config(RingConfiguration(th, 3.0));
    const double r12 = d(0, 1), r13 = d(0, 2), r23 = d(1, 2);
    const double b13 = detail::e_bracket(r13, r12, r23);
    if (std::abs(b13) < 1e-3) continue;
    // Choose lambda to zero the (1,3) Lagrange row, then the other rows are the eliminated residuals.
    const double lambda = -w_coefficient(r13, m[0], m[2], s) / (2 * b13);
    const auto lag = n3_lagrange_residuals(r12, r13, r23, MassVector(m), lambda, s);
    const auto eli = n3_eliminated_residuals(r12, r23, r13, MassVector(m), s);
    EXPECT_NEAR(lag[1], 0.0, 1e-12);
    EXPECT_NEAR(lag[0], eli[0], 1e-10);
    EXPECT_NEAR(lag[2], eli[1], 1e-10);
  }
}

TEST(ThreeBodyEliminated, ChainRuleAgainstAngularGradient) {
  // theta = (0, a, b): dV/da = R1 cos(a/2) - R2 cos((b-a)/2), dV/db = R2 cos((b-a)/2)
  // wherever the implicit r13 chart is valid.
  const MassVector m{1.0, 0.7, 0.4};
  int checked = 0;
  for (int i = 1; i < 60; ++i)
    for (int j = 1; j < 60; ++j) {
      const double a = kTwoPi * i / 60, b = a + (kTwoPi - a) * j / 60;
      if (b - a < 0.05 || kTwoPi - b < 0.05) continue;
      const RingConfiguration c({0.0, a, b}, 3.0);
      const auto g = potential_gradient(c, m);
      const auto d = distances_from_config(c);
      const double b13 = detail::e_bracket(d(0, 2), d(0, 1), d(1, 2));
      if (std::abs(b13) < 1e-3) continue;
      const auto r = n3_eliminated_residuals(d(0, 1), d(1, 2), d(0, 2), m, PotentialExponent(3.0));
      const double ca = std::cos(a / 2), cb = std::cos((b - a) / 2);
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      EXPECT_NEAR(g[1], r[0] * ca - r[1] * cb, 1e-9 * scale);
      EXPECT_NEAR(g[2], r[1] * cb, 1e-9 * scale);
      ++checked;
    }
  EXPECT_GT(checked, 2000);
}

TEST(ThreeBodyEliminated, RejectsDegenerateInput) {
  EXPECT_THROW(n3_eliminated_residuals(1, 1, 1, MassVector{1, 1}, PotentialExponent(3.0)), DomainError);
  EXPECT_THROW(n3_eliminated_residuals(0, 1, 1, MassVector{1, 1, 1}, PotentialExponent(3.0)), DomainError);
}
