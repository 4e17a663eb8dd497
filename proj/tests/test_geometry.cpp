#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coorbital/geometry.hpp"
#include "test_support.hpp"

using namespace coorbital;

TEST(ChordDistance, KnownValues) {
  EXPECT_NEAR(chord_distance(kPi), 2.0, 1e-15);
  EXPECT_NEAR(chord_distance(kPi / 3.0), 1.0, 1e-15);
  EXPECT_NEAR(chord_distance(kPi / 2.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(chord_distance(-kPi / 2.0 + 4.0 * kPi), std::sqrt(2.0), 1e-14);
}

TEST(ChordDistance, MatchesLawOfCosines) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double d = u(rng);
    EXPECT_NEAR(chord_distance(d), std::sqrt(2.0 - 2.0 * std::cos(d)), 1e-7);
  }
}

TEST(PotentialExponent, RejectsBelowTwo) {
  EXPECT_THROW(PotentialExponent(1.99), DomainError);
  EXPECT_THROW(PotentialExponent(std::nan("")), DomainError);
  EXPECT_TRUE(PotentialExponent(2.0).is_vortex());
  EXPECT_FALSE(PotentialExponent(3.0).is_vortex());
}

TEST(RingConfiguration, ReducesAnglesAndDetectsCollisions) {
  const RingConfiguration c({-kPi / 2.0, 5.0 * kPi}, 3.0);
  EXPECT_NEAR(c.theta(0), 1.5 * kPi, 1e-14);
  EXPECT_NEAR(c.theta(1), kPi, 1e-14);
  EXPECT_NEAR(c.difference(0, 1), kPi / 2.0, 1e-14);
  EXPECT_THROW(RingConfiguration({0.0, kTwoPi}, 3.0), CollisionError);
  EXPECT_THROW(RingConfiguration({0.0, 1e-10}, 3.0), CollisionError);
  EXPECT_THROW(RingConfiguration({0.0}, 3.0), DomainError);
  EXPECT_THROW(RingConfiguration({0.0, std::nan("")}, 3.0), DomainError);
}

TEST(MassVector, PositivePredicate) {
  EXPECT_TRUE((MassVector{1.0, 0.5}.positive()));
  EXPECT_FALSE((MassVector{1.0, 0.0}.positive()));
  EXPECT_FALSE((MassVector{1.0, -1.0}.positive()));
  EXPECT_FALSE(MassVector{}.positive());
  const RingConfiguration c({0.0, 1.0, 2.0}, 3.0);
  EXPECT_THROW(check_sizes(c, MassVector{1.0, 1.0}), DomainError);
}

TEST(FValue, KnownZerosAndValues) {
  EXPECT_NEAR(f_value(kPi / 3.0, 3.0), 0.0, 1e-15);
  EXPECT_NEAR(f_value(kPi, 3.0), 0.0, 1e-15);
  EXPECT_NEAR(f_value(kPi, 2.5), 0.0, 1e-15);
  EXPECT_NEAR(f_value(5.0 * kPi / 3.0, 3.0), 0.0, 1e-15);
  // (sqrt 2)^-3 - 1 computed in long double.
  const long double expect = std::pow(std::sqrt(2.0L), -3.0L) - 1.0L;
  EXPECT_NEAR(f_value(kPi / 2.0, 3.0), double(expect), 1e-15);
  EXPECT_NEAR(f_value(kPi / 2.0, 3.0), -0.6464466094067262, 1e-15);
  EXPECT_THROW(f_value(0.0, 3.0), CollisionError);
  EXPECT_THROW(f_value(kTwoPi, 3.0), CollisionError);
}

TEST(FValue, IsOdd) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, kTwoPi - 0.01);
  for (double s : {2.0, 2.5, 3.0, 5.0})
    for (int k = 0; k < 500; ++k) {
      const double d = u(rng);
      EXPECT_NEAR(f_value(-d, s), -f_value(d, s), 1e-12);
    }
}

TEST(FValue, MatchesLongDoubleEvaluation) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, kTwoPi - 0.05);
  for (int k = 0; k < 500; ++k) {
    const double d = u(rng);
    const long double r = 2.0L * std::abs(std::sin(0.5L * d));
    const long double ref = std::sin((long double)d) * (std::pow(r, -3.0L) - 1.0L);
    EXPECT_NEAR(f_value(d, 3.0), double(ref), 1e-12 * std::max(1.0L, std::abs(ref)));
  }
}

TEST(HessianEntry, AntipodalValues) {
  // r = 2: 2 - 1 + (s-2)/(4 * 2^(s-2)) - (s-1)/2^s.
  EXPECT_NEAR(hessian_entry(kPi, 3.0), 1.0 + 1.0 / 8.0 - 2.0 / 8.0, 1e-15);
  EXPECT_NEAR(hessian_entry(kPi, 3.0), 0.875, 1e-15);
  EXPECT_NEAR(hessian_entry(kPi, 2.0), 0.75, 1e-15);
}

TEST(HessianEntry, TrigAndDistanceFormsAgree) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, kTwoPi - 0.05);
  for (double s : {2.0, 2.5, 3.0, 4.0})
    for (int k = 0; k < 500; ++k) {
      const double d = u(rng);
      const PotentialExponent e(s);
      const double a = hessian_entry(d, e), b = hessian_entry_trig(d, e);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST(HessianEntry, IsDerivativeOfF) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, kTwoPi - 0.1);
  const double h = 1e-6;
  for (double s : {2.0, 3.0})
    for (int k = 0; k < 200; ++k) {
      const double d = u(rng);
      const double fd = (f_value(d + h, s) - f_value(d - h, s)) / (2 * h);
      EXPECT_NEAR(hessian_entry(d, s), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST(HallPotential, SinglePairAndEquilateral) {
  EXPECT_NEAR(hall_potential(RingConfiguration({0.0, kPi}, 3.0), MassVector{1, 1}), 2.5, 1e-14);
  // Vortex pair term -log r + r^2/2 at r = 2.
  EXPECT_NEAR(hall_potential(RingConfiguration({0.0, kPi}, 2.0), MassVector{1, 1}), -std::log(2.0) + 2.0, 1e-14);
  const RingConfiguration eq({0.0, 2 * kPi / 3, 4 * kPi / 3}, 3.0);
  EXPECT_NEAR(hall_potential(eq, MassVector{1, 1, 1}), 3.0 * (1.0 / std::sqrt(3.0) + 1.5), 1e-13);
  EXPECT_NEAR(hall_potential(eq, MassVector{1, 1, 1}), 6.2320508075688772, 1e-13);
}

TEST(HallPotential, RotationAndRelabelingInvariance) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const auto th = test::random_angles(rng, 5);
    const auto m = test::random_masses(rng, 5);
    const double v = hall_potential(RingConfiguration(th, 3.0), MassVector(m));
    auto rot = th;
    for (double& t : rot) t += 1.2345;
    EXPECT_NEAR(hall_potential(RingConfiguration(rot, 3.0), MassVector(m)), v, 1e-12 * std::abs(v));

    std::vector<std::size_t> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pt(5), pm(5);
    for (std::size_t i = 0; i < 5; ++i) {
      pt[i] = th[perm[i]];
      pm[i] = m[perm[i]];
    }
    const RingConfiguration a(th, 3.0), b(pt, 3.0);
    EXPECT_NEAR(hall_potential(b, MassVector(pm)), v, 1e-12 * std::abs(v));
    const auto ga = potential_gradient(a, MassVector(m));
    const auto gb = potential_gradient(b, MassVector(pm));
    const auto ha = hessian(a, MassVector(m));
    const auto hb = hessian(b, MassVector(pm));
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_NEAR(gb[Eigen::Index(i)], ga[Eigen::Index(perm[i])], 1e-12);
      for (std::size_t j = 0; j < 5; ++j)
        EXPECT_NEAR(hb(Eigen::Index(i), Eigen::Index(j)), ha(Eigen::Index(perm[i]), Eigen::Index(perm[j])), 1e-12);
    }
  }
}

TEST(PotentialGradient, KnownCases) {
  for (int n = 3; n <= 8; ++n) {
    std::vector<double> th(static_cast<std::size_t>(n)), m(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < n; ++i) th[std::size_t(i)] = kTwoPi * i / n;
    const auto g = potential_gradient(RingConfiguration(th, 3.0), MassVector(m));
    EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-14);
  }
  const auto g = potential_gradient(RingConfiguration({0.0, kPi / 2}, 3.0), MassVector{1, 1});
  EXPECT_NEAR(g[0], -f_value(-kPi / 2, 3.0), 1e-15);
  EXPECT_NEAR(g[0], -0.6464466094067262, 1e-15);
}

TEST(PotentialGradient, SumsToZeroAndMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (double s : {2.0, 2.5, 3.0})
    for (int k = 0; k < 60; ++k) {
      const std::size_t n = 3 + std::size_t(k % 5);
      const auto th = test::random_angles(rng, n);
      const auto m = test::random_masses(rng, n);
      const RingConfiguration c(th, s);
      const auto g = potential_gradient(c, MassVector(m));
      EXPECT_LT(std::abs(g.sum()), 1e-12);
      const auto fd = test::fd_gradient(th, m, s, 1e-6);
      for (std::size_t i = 0; i < n; ++i)
        EXPECT_NEAR(g[Eigen::Index(i)], fd[i], 1e-5 * std::max(1.0, std::abs(fd[i])));
    }
}

TEST(Hessian, RowSumsSymmetryAndEntries) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + std::size_t(k % 7);
    const auto th = test::random_angles(rng, n);
    const auto m = test::random_masses(rng, n);
    const RingConfiguration c(th, 3.0);
    const auto h = hessian(c, MassVector(m));
    EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((h * Eigen::VectorXd::Ones(Eigen::Index(n))).cwiseAbs().maxCoeff(), 1e-12);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        EXPECT_NEAR(h(Eigen::Index(i), Eigen::Index(j)), m[i] * m[j] * hessian_entry(th[i] - th[j], 3.0), 1e-14);
      }
  }
}

TEST(Hessian, AntipodalPair) {
  const auto h = hessian(RingConfiguration({0.0, kPi}, 3.0), MassVector{1, 1});
  EXPECT_NEAR(h(0, 1), 0.875, 1e-15);
  EXPECT_NEAR(h(0, 0), -0.875, 1e-15);
}

TEST(Hessian, MatchesFiniteDifferencesOfPotential) {
  std::mt19937_64 rng(12);
  for (double s : {2.0, 2.5, 3.0})
    for (int k = 0; k < 40; ++k) {
      const std::size_t n = 3 + std::size_t(k % 4);
      const auto th = test::random_angles(rng, n);
      const auto m = test::random_masses(rng, n);
      const auto h = hessian(RingConfiguration(th, s), MassVector(m));
      const auto fd = test::fd_hessian(th, m, s, 1e-4);
      const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
      EXPECT_LT((h - fd).cwiseAbs().maxCoeff(), 1e-4 * scale);
    }
}
