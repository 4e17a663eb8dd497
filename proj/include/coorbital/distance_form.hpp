#pragma once

// Mutual-distance formulation of the coorbital equations: the concyclicity
// constraint E for three unit-circle points and the N = 3 critical-point
// systems (Lagrange form and the form with r13 eliminated through E = 0).
// Used as an oracle that is independent of the angle formulation.

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

#include <Eigen/Dense>

#include "coorbital/errors.hpp"
#include "coorbital/geometry.hpp"

namespace coorbital {

/// Pairwise chord lengths of N points.
class DistanceSet {
 public:
  explicit DistanceSet(Eigen::MatrixXd r) : r_(std::move(r)) {
    const Eigen::Index n = r_.rows();
    if (r_.cols() != n || n < 2) throw DomainError("distance set needs a square matrix of at least two points");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = r_(i, j);
        if (!(v > 0.0 && v <= 2.0 + 1e-12) || std::abs(v - r_(j, i)) > 1e-15)
          throw DomainError("distances must be symmetric and lie in (0, 2]");
      }
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
          if (i != j && j != k && i != k && r_(i, k) > r_(i, j) + r_(j, k) + 1e-12)
            throw DomainError("triangle inequality violated");
  }

  std::size_t size() const { return std::size_t(r_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return r_(Eigen::Index(i), Eigen::Index(j)); }
  const Eigen::MatrixXd& matrix() const { return r_; }

 private:
  Eigen::MatrixXd r_;
};

inline DistanceSet distances_from_config(const RingConfiguration& config) {
  const auto n = Eigen::Index(config.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = chord_distance(config.difference(std::size_t(i), std::size_t(j)));
      r(i, j) = d;
      r(j, i) = d;
    }
  return DistanceSet(std::move(r));
}

/// E_abc: vanishes iff the three chord lengths fit on one unit circle.
inline double concyclicity_E(double r_ab, double r_bc, double r_ac) {
  const double ab2 = r_ab * r_ab, bc2 = r_bc * r_bc, ac2 = r_ac * r_ac;
  return ab2 * bc2 * ac2 + ab2 * ab2 - 2 * ab2 * ac2 + ac2 * ac2 - 2 * ab2 * bc2 - 2 * ac2 * bc2 + bc2 * bc2;
}

/// max |E| over all triples.
inline double concyclicity_residual(const DistanceSet& d) {
  double worst = 0.0;
  const std::size_t n = d.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        worst = std::max(worst, std::abs(concyclicity_E(d(a, b), d(b, c), d(a, c))));
  return worst;
}

/// W_ij = m_i m_j (1 - r^-s); dV/dr_ij = r_ij W_ij.
inline double w_coefficient(double r, double mi, double mj, const PotentialExponent& s) {
  return mi * mj * (1.0 - std::pow(r, -s.value()));
}

struct WCoefficients {
  Eigen::MatrixXd W;
};

inline WCoefficients w_coefficients(const DistanceSet& d, const MassVector& m, const PotentialExponent& s) {
  if (m.size() != d.size()) throw DomainError("mass vector size mismatch");
  const auto n = Eigen::Index(d.size());
  WCoefficients out{Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) out.W(i, j) = w_coefficient(d.matrix()(i, j), m[std::size_t(i)], m[std::size_t(j)], s);
  return out;
}

namespace detail {

inline void check_three(const MassVector& m) {
  if (m.size() != 3) throw DomainError("N = 3 system needs three masses");
}

inline void check_positive_distances(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw DomainError("distances must be positive");
}

/// dE/dr_ij = 2 r_ij * bracket_ij, with bracket_ij = r_ik^2 r_jk^2 + 2 r_ij^2 - 2 r_ik^2 - 2 r_jk^2.
inline double e_bracket(double rij, double rik, double rjk) {
  return rik * rik * rjk * rjk + 2 * rij * rij - 2 * rik * rik - 2 * rjk * rjk;
}

}  // namespace detail

/// r_ij (W_ij + 2 lambda bracket_ij) for the pairs (1,2), (1,3), (2,3).
inline std::array<double, 3> n3_lagrange_residuals(double r12, double r13, double r23, const MassVector& m,
                                                   double lambda, const PotentialExponent& s) {
  detail::check_three(m);
  detail::check_positive_distances(r12, r13, r23);
  const double w12 = w_coefficient(r12, m[0], m[1], s);
  const double w13 = w_coefficient(r13, m[0], m[2], s);
  const double w23 = w_coefficient(r23, m[1], m[2], s);
  return {r12 * (w12 + 2 * lambda * detail::e_bracket(r12, r13, r23)),
          r13 * (w13 + 2 * lambda * detail::e_bracket(r13, r12, r23)),
          r23 * (w23 + 2 * lambda * detail::e_bracket(r23, r12, r13))};
}

/// Critical-point equations in the independent distances (r12, r23), with
/// the derivatives of r13 taken implicitly from E = 0:
///   r12 (W12 - W13 bracket_12 / bracket_13),  r23 (W23 - W13 bracket_23 / bracket_13).
inline std::array<double, 2> n3_eliminated_residuals(double r12, double r23, double r13, const MassVector& m,
                                                     const PotentialExponent& s) {
  detail::check_three(m);
  detail::check_positive_distances(r12, r13, r23);
  const double b12 = detail::e_bracket(r12, r13, r23);
  const double b13 = detail::e_bracket(r13, r12, r23);
  const double b23 = detail::e_bracket(r23, r12, r13);
  const double scale = std::max({std::abs(b12), std::abs(b23), 1.0});
  if (std::abs(b13) < 1e-13 * scale) {
    std::ostringstream os;
    os << "degenerate denominator dE/dr13 = " << b13;
    throw DomainError(os.str());
  }
  const double w12 = w_coefficient(r12, m[0], m[1], s);
  const double w13 = w_coefficient(r13, m[0], m[2], s);
  const double w23 = w_coefficient(r23, m[1], m[2], s);
  return {r12 * (w12 - w13 * b12 / b13), r23 * (w23 - w13 * b23 / b13)};
}

}  // namespace coorbital
