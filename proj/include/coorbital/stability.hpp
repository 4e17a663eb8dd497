#pragma once

// Hessian inertia, Morse index and the eigenvalue counts they imply for the
// linearisation of a coorbital relative equilibrium, plus the block
// decomposition of the Hessian for symmetric 1+5 configurations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "coorbital/cc_system.hpp"
#include "coorbital/errors.hpp"
#include "coorbital/geometry.hpp"

namespace coorbital {

struct Inertia {
  int plus = 0;
  int zero = 0;
  int minus = 0;

  int size() const { return plus + zero + minus; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

inline constexpr double kDefaultEigenTolerance = 1e-8;

namespace detail {

template <class Range>
Inertia count_signs(const Range& values, double tol) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  Inertia out;
  for (double v : values) {
    if (std::abs(v) <= tol * scale || scale == 0.0)
      ++out.zero;
    else if (v > 0.0)
      ++out.plus;
    else
      ++out.minus;
  }
  return out;
}

}  // namespace detail

/// Sign counts of the eigenvalues of a symmetric matrix; |lambda| below
/// tol * max|lambda| counts as zero.
inline Inertia inertia(const Eigen::MatrixXd& s, double tol = kDefaultEigenTolerance) {
  if (s.rows() != s.cols()) throw DomainError("inertia requires a square matrix");
  if (s.size() == 0) return {};
  const double norm = s.cwiseAbs().maxCoeff();
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, norm))
    throw DomainError("inertia requires a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  return detail::count_signs(std::vector<double>(ev.data(), ev.data() + ev.size()), tol);
}

/// Sign counts of the (real) eigenvalues of A = M^-1 H, computed with a
/// general eigensolver so it stays independent of the symmetric path.
inline Inertia inertia_of_mass_weighted(const Eigen::MatrixXd& h, const MassVector& m,
                                        double tol = kDefaultEigenTolerance) {
  if (!m.positive()) throw DomainError("masses must be positive");
  const Eigen::MatrixXd a = m.as_eigen().cwiseInverse().asDiagonal() * h;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<double> re(std::size_t(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) re[std::size_t(i)] = ev[i].real();
  return detail::count_signs(re, tol);
}

struct LinearizationCounts {
  int imaginary = 0;
  int positive = 0;
  int negative = 0;
};

struct StabilityReport {
  std::size_t n = 0;
  Inertia inertia_H;
  Inertia inertia_A;
  int morse_index = 0;
  LinearizationCounts linearization_counts;
  /// Morse index N-1 with exactly one (rotational) zero eigenvalue.
  bool is_linearly_stable_candidate = false;
  bool inertia_consistent = false;
  /// ||F m||_inf / ||m||_inf.
  double residual = 0.0;
  /// Set when the residual exceeds kNearSolutionResidual.
  bool residual_warning = false;
};

inline constexpr double kNearSolutionResidual = 1e-6;

/// A relative equilibrium with Morse index k has 2k imaginary eigenvalues in
/// its linearisation and N - k each of positive and negative ones.
inline LinearizationCounts linearization_counts(std::size_t n, int morse_index) {
  return {2 * morse_index, int(n) - morse_index, int(n) - morse_index};
}

inline StabilityReport stability_report(const RingConfiguration& config, const MassVector& m,
                                     double tol = kDefaultEigenTolerance) {
  check_sizes(config, m);
  if (!m.positive()) throw DomainError("stability_report requires positive masses");
  const Eigen::MatrixXd h = hessian(config, m);

  StabilityReport r;
  r.n = config.size();
  r.inertia_H = inertia(h, tol);
  r.inertia_A = inertia_of_mass_weighted(h, m, tol);
  r.inertia_consistent = r.inertia_H == r.inertia_A;
  r.morse_index = r.inertia_H.minus;
  r.linearization_counts = linearization_counts(r.n, r.morse_index);
  r.is_linearly_stable_candidate = r.morse_index == int(r.n) - 1 && r.inertia_H.zero == 1;

  const CoorbitalMatrix f = build_F(config);
  double mmax = 0.0;
  for (double v : m.values()) mmax = std::max(mmax, std::abs(v));
  r.residual = kernel_residual(f, m) / mmax;
  r.residual_warning = r.residual > kNearSolutionResidual;
  return r;
}

// ---------------------------------------------------------------------------
// Symmetric 1+5 block decomposition

/// Congruence that splits the symmetric 1+5 Hessian into the rotational
/// zero, a mirror-symmetric block and a mirror-antisymmetric block.
inline Eigen::Matrix<double, 5, 5> sym5_congruence() {
  Eigen::Matrix<double, 5, 5> p;
  p << 1, 1, 0, 1, 0,  //
      1, 0, 1, 0, 1,   //
      1, 0, 0, 0, 0,   //
      1, 0, 1, 0, -1,  //
      1, 1, 0, -1, 0;
  return p;
}

/// Hessian entries h_ij of the sym-1+5 member (theta1, theta2).
struct Sym5HValues {
  double h12, h13, h14, h15, h23, h24;
};

inline Sym5HValues sym5_h_values(double theta1, double theta2, const PotentialExponent& s) {
  check_sym5_order(theta1, theta2);
  return {hessian_entry(theta1 - theta2, s), hessian_entry(theta1, s),      hessian_entry(theta1 + theta2, s),
          hessian_entry(2.0 * theta1, s),    hessian_entry(theta2, s),      hessian_entry(2.0 * theta2, s)};
}

struct Sym5Blocks {
  Eigen::Matrix2d H1;
  Eigen::Matrix2d H2;
  Eigen::Matrix<double, 5, 5> P;
  /// max |block + (P^T H P) block| over both blocks; the closed forms are
  /// the blocks of -P^T H P.
  double consistency_error = 0.0;
  /// Largest entry of P^T H P outside the block pattern.
  double off_block = 0.0;
  /// Max-norm of the full Hessian, for relative comparisons.
  double hessian_norm = 0.0;
};

/// Closed-form 2x2 blocks of the symmetric 1+5 Hessian for masses
/// (m1, m2, m3, m2, m1), with the congruence check against the full Hessian.
inline Sym5Blocks sym5_blocks(double theta1, double theta2, double m1, double m2, double m3,
                              const PotentialExponent& s) {
  if (!(theta2 > 0.0 && theta2 < theta1 && theta1 < 0.5 * kPi))
    throw DomainError("sym5_blocks requires 0 < theta2 < theta1 < pi/2");
  const Sym5HValues h = sym5_h_values(theta1, theta2, s);
  const double a = h.h12 + h.h14;

  Sym5Blocks b;
  b.H1 << 2 * a * m1 * m2 + 2 * h.h13 * m1 * m3, -2 * m1 * m2 * a,  //
      -2 * m1 * m2 * a, 2 * a * m1 * m2 + 2 * h.h23 * m2 * m3;
  const double c = 2 * m1 * m2 * (-h.h12 + h.h14);
  b.H2 << 2 * m1 * (2 * h.h15 * m1 + a * m2 + h.h13 * m3), c,  //
      c, 2 * m2 * (a * m1 + 2 * h.h24 * m2 + h.h23 * m3);
  b.P = sym5_congruence();

  const RingConfiguration config({theta1, theta2, 0.0, -theta2, -theta1}, s);
  const Eigen::MatrixXd full = hessian(config, MassVector{m1, m2, m3, m2, m1});
  b.hessian_norm = full.cwiseAbs().maxCoeff();
  const Eigen::Matrix<double, 5, 5> c5 = b.P.transpose() * full * b.P;

  b.consistency_error = std::max((b.H1 + c5.block<2, 2>(1, 1)).cwiseAbs().maxCoeff(),
                                 (b.H2 + c5.block<2, 2>(3, 3)).cwiseAbs().maxCoeff());
  double off = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const bool in_h1 = (i == 1 || i == 2) && (j == 1 || j == 2);
      const bool in_h2 = (i == 3 || i == 4) && (j == 3 || j == 4);
      if (!in_h1 && !in_h2) off = std::max(off, std::abs(c5(i, j)));
    }
  b.off_block = off;
  return b;
}

inline Sym5Blocks sym5_blocks(double theta1, double theta2, double m1, double m2, double m3, double s = 3.0) {
  return sym5_blocks(theta1, theta2, m1, m2, m3, PotentialExponent(s));
}

/// det(H1) = 4((h12 + h14)(h13 m1 + h23 m2) + h13 h23 m3) m1 m2 m3.
inline double sym5_det_h1(double theta1, double theta2, double m1, double m2, double m3,
                          const PotentialExponent& s) {
  const Sym5HValues h = sym5_h_values(theta1, theta2, s);
  return 4.0 * ((h.h12 + h.h14) * (h.h13 * m1 + h.h23 * m2) + h.h13 * h.h23 * m3) * m1 * m2 * m3;
}

}  // namespace coorbital
