#pragma once

// Ring geometry of the 1+N coorbital problem: chord distances, the kernel
// function f, Hall's effective potential and its first two derivatives.
//
// All bodies sit on the unit circle around a unit central mass. Angles are
// stored reduced to [0, 2pi); pairwise differences are reduced to (-pi, pi]
// before any trigonometric evaluation.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coorbital/errors.hpp"

namespace coorbital {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Pairwise separations below this many radians are collisions.
inline constexpr double kCollisionThreshold = 1e-9;

/// Reduce an angle to [0, 2pi).
inline double reduce_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Reduce an angular difference to (-pi, pi].
inline double reduce_difference(double delta) {
  double r = std::remainder(delta, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Exponent s of the homogeneous interaction; s = 2 selects the vortex
/// (logarithmic) potential.
class PotentialExponent {
 public:
  explicit PotentialExponent(double s) : s_(s) {
    if (!(s >= 2.0) || !std::isfinite(s)) {
      std::ostringstream os;
      os << "potential exponent must satisfy s >= 2, got " << s;
      throw DomainError(os.str());
    }
  }

  double value() const { return s_; }
  bool is_vortex() const { return s_ == 2.0; }

  friend bool operator==(const PotentialExponent&, const PotentialExponent&) = default;

 private:
  double s_;
};

inline void check_no_collision(double reduced_delta) {
  if (std::abs(reduced_delta) < kCollisionThreshold) {
    std::ostringstream os;
    os << "collision: angular separation " << reduced_delta << " below " << kCollisionThreshold;
    throw CollisionError(os.str());
  }
}

/// N >= 2 points on the unit circle together with the potential exponent.
class RingConfiguration {
 public:
  RingConfiguration(std::vector<double> thetas, PotentialExponent s) : thetas_(std::move(thetas)), s_(s) {
    if (thetas_.size() < 2) throw DomainError("a ring configuration needs at least two points");
    for (double& t : thetas_) {
      if (!std::isfinite(t)) throw DomainError("non-finite angle");
      t = reduce_angle(t);
    }
    for (std::size_t i = 0; i < thetas_.size(); ++i)
      for (std::size_t j = i + 1; j < thetas_.size(); ++j)
        check_no_collision(reduce_difference(thetas_[i] - thetas_[j]));
  }

  RingConfiguration(std::vector<double> thetas, double s)
      : RingConfiguration(std::move(thetas), PotentialExponent(s)) {}

  std::size_t size() const { return thetas_.size(); }
  double theta(std::size_t i) const { return thetas_[i]; }
  std::span<const double> thetas() const { return thetas_; }
  const PotentialExponent& exponent() const { return s_; }
  double s() const { return s_.value(); }

  /// theta_i - theta_j reduced to (-pi, pi].
  double difference(std::size_t i, std::size_t j) const { return reduce_difference(thetas_[i] - thetas_[j]); }

  double min_separation() const {
    double best = kPi;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) best = std::min(best, std::abs(difference(i, j)));
    return best;
  }

 private:
  std::vector<double> thetas_;
  PotentialExponent s_;
};

/// The N infinitesimal masses.
class MassVector {
 public:
  MassVector() = default;
  explicit MassVector(std::vector<double> m) : m_(std::move(m)) {
    for (double v : m_)
      if (!std::isfinite(v)) throw DomainError("non-finite mass");
  }
  MassVector(std::initializer_list<double> m) : MassVector(std::vector<double>(m)) {}

  std::size_t size() const { return m_.size(); }
  double operator[](std::size_t i) const { return m_[i]; }
  std::span<const double> values() const { return m_; }

  bool positive() const {
    for (double v : m_)
      if (!(v > 0.0)) return false;
    return !m_.empty();
  }

  Eigen::VectorXd as_eigen() const { return Eigen::Map<const Eigen::VectorXd>(m_.data(), Eigen::Index(m_.size())); }

 private:
  std::vector<double> m_;
};

inline void check_sizes(const RingConfiguration& config, const MassVector& m) {
  if (config.size() != m.size()) {
    std::ostringstream os;
    os << "mass vector has " << m.size() << " entries for " << config.size() << " ring points";
    throw DomainError(os.str());
  }
}

/// Chord length 2|sin(delta/2)| between two unit-circle points.
inline double chord_distance(double delta) { return 2.0 * std::abs(std::sin(0.5 * reduce_difference(delta))); }

/// f(delta) = sin(delta) (r^-s - 1); zero at delta = pi/3, pi, 5pi/3.
inline double f_value(double delta, const PotentialExponent& s) {
  const double d = reduce_difference(delta);
  check_no_collision(d);
  const double r = 2.0 * std::abs(std::sin(0.5 * d));
  return std::sin(d) * (std::pow(r, -s.value()) - 1.0);
}

inline double f_value(double delta, double s) { return f_value(delta, PotentialExponent(s)); }

/// h(delta) = f'(delta), written in the chord distance r.
inline double hessian_entry(double delta, const PotentialExponent& s) {
  const double d = reduce_difference(delta);
  check_no_collision(d);
  const double sv = s.value();
  const double r = 2.0 * std::abs(std::sin(0.5 * d));
  return 0.5 * r * r - 1.0 + (sv - 2.0) / (4.0 * std::pow(r, sv - 2.0)) - (sv - 1.0) / std::pow(r, sv);
}

inline double hessian_entry(double delta, double s) { return hessian_entry(delta, PotentialExponent(s)); }

/// Same quantity as hessian_entry, in the trigonometric form
/// -cos(d) - (s + (s-2) cos d) / (2^(s+1) |sin(d/2)|^s).
inline double hessian_entry_trig(double delta, const PotentialExponent& s) {
  const double d = reduce_difference(delta);
  check_no_collision(d);
  const double sv = s.value();
  const double c = std::cos(d);
  return -c - (sv + (sv - 2.0) * c) / (std::pow(2.0, sv + 1.0) * std::pow(std::abs(std::sin(0.5 * d)), sv));
}

/// Pair term of Hall's potential as a function of the chord length.
/// For the vortex case the pair term is -log r + r^2/2, the s -> 2 limit
/// of 1/((s-2) r^(s-2)) up to a constant, so that dV/dtheta matches f.
inline double hall_pair_term(double r, const PotentialExponent& s) {
  if (s.is_vortex()) return -std::log(r) + 0.5 * r * r;
  const double sv = s.value();
  return 1.0 / ((sv - 2.0) * std::pow(r, sv - 2.0)) + 0.5 * r * r;
}

/// V = sum_{i<j} m_i m_j (pair term of r_ij).
inline double hall_potential(const RingConfiguration& config, const MassVector& m) {
  check_sizes(config, m);
  double v = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i)
    for (std::size_t j = i + 1; j < config.size(); ++j)
      v += m[i] * m[j] * hall_pair_term(chord_distance(config.difference(i, j)), config.exponent());
  return v;
}

/// dV/dtheta_i = -m_i sum_{j != i} m_j f(theta_i - theta_j).
inline Eigen::VectorXd potential_gradient(const RingConfiguration& config, const MassVector& m) {
  check_sizes(config, m);
  const std::size_t n = config.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) acc += m[j] * f_value(config.difference(i, j), config.exponent());
    g[Eigen::Index(i)] = -m[i] * acc;
  }
  return g;
}

/// Hessian of V in the angles. Off-diagonal m_i m_j h_ij; each diagonal is
/// minus the sum of its row, so the all-ones vector is always in the kernel.
inline Eigen::MatrixXd hessian(const RingConfiguration& config, const MassVector& m) {
  check_sizes(config, m);
  const auto n = Eigen::Index(config.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = m[std::size_t(i)] * m[std::size_t(j)] *
                       hessian_entry(config.difference(std::size_t(i), std::size_t(j)), config.exponent());
      h(i, j) = v;
      h(j, i) = v;
    }
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) acc += h(i, j);
    h(i, i) = -acc;
  }
  return h;
}

}  // namespace coorbital
