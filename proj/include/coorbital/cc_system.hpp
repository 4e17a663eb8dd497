#pragma once

// The antisymmetric mass-coefficient matrix F (F m = 0 characterises
// coorbital central configurations), its Pfaffian and numerical kernel, and
// the reflection-symmetric configuration families.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "coorbital/errors.hpp"
#include "coorbital/geometry.hpp"

namespace coorbital {

struct CoorbitalMatrix {
  Eigen::MatrixXd entries;
  RingConfiguration source;

  std::size_t size() const { return source.size(); }
};

/// F_ij = f(theta_i - theta_j). Antisymmetric by construction.
inline CoorbitalMatrix build_F(const RingConfiguration& config) {
  const auto n = Eigen::Index(config.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = f_value(config.difference(std::size_t(i), std::size_t(j)), config.exponent());
      f(i, j) = v;
      f(j, i) = -v;
    }
  return {std::move(f), config};
}

namespace detail {

template <class T, class At>
T pfaffian_rec(std::vector<std::size_t>& idx, At& at) {
  if (idx.empty()) return T(1.0);
  const std::size_t first = idx.front();
  T total(0.0);
  bool have = false;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const std::size_t col = idx[k];
    std::vector<std::size_t> rest;
    rest.reserve(idx.size() - 2);
    for (std::size_t q = 1; q < idx.size(); ++q)
      if (q != k) rest.push_back(idx[q]);
    T term = at(first, col) * pfaffian_rec<T>(rest, at);
    // Expansion sign (-1)^(k+1) for 0-based position k >= 1.
    if (k % 2 == 0) term = -term;
    total = have ? total + term : term;
    have = true;
  }
  return total;
}

}  // namespace detail

/// Pfaffian of the n x n antisymmetric matrix whose upper entries are given
/// by `at(i, j)` (i < j), by recursive expansion along the first row.
/// Generic over the scalar so interval enclosures reuse the same sum.
template <class T, class At>
T pfaffian_expand(std::size_t n, At at) {
  if (n % 2 != 0) throw DomainError("Pfaffian requires an even dimension");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return detail::pfaffian_rec<T>(idx, at);
}

inline double pfaffian(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("Pfaffian requires a square matrix");
  return pfaffian_expand<double>(std::size_t(a.rows()),
                                 [&](std::size_t i, std::size_t j) { return a(Eigen::Index(i), Eigen::Index(j)); });
}

inline double pfaffian(const CoorbitalMatrix& f) { return pfaffian(f.entries); }

inline constexpr double kDefaultKernelTolerance = 1e-9;

/// Orthonormal basis of the numerical kernel of F.
struct KernelBasis {
  std::vector<Eigen::VectorXd> vectors;
  double tolerance = kDefaultKernelTolerance;
  std::vector<double> singular_values;  // descending

  std::size_t dimension() const { return vectors.size(); }
};

/// Singular values below tol * (largest singular value) count as zero. The
/// singular values of a real antisymmetric matrix come in equal pairs; if
/// the cut splits a pair the partner is included so the dimension keeps the
/// parity of N.
inline KernelBasis mass_kernel(const Eigen::MatrixXd& f, double tol = kDefaultKernelTolerance) {
  if (!(tol > 0.0 && tol <= 1e-4)) throw DomainError("kernel tolerance must lie in (0, 1e-4]");
  const Eigen::Index n = f.rows();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = n > 0 ? sv[0] : 0.0;

  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (smax > 0.0 && sv[k] >= tol * smax) ++rank;
  if (rank % 2 != 0) --rank;

  KernelBasis out;
  out.tolerance = tol;
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index k = rank; k < n; ++k) out.vectors.emplace_back(v.col(k));
  return out;
}

inline KernelBasis mass_kernel(const CoorbitalMatrix& f, double tol = kDefaultKernelTolerance) {
  return mass_kernel(f.entries, tol);
}

/// sign * (v1 + alpha v2) > 0 componentwise for alpha in the open interval (lo, hi).
struct AlphaInterval {
  int sign = 1;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double representative() const {
    if (std::isinf(lo) && std::isinf(hi)) return 0.0;
    if (std::isinf(lo)) return hi - std::max(1.0, std::abs(hi));
    if (std::isinf(hi)) return lo + std::max(1.0, std::abs(lo));
    return 0.5 * (lo + hi);
  }
};

/// Positive part of a kernel of dimension 1 or 2.
struct PositiveMassRegion {
  std::size_t dimension = 0;
  bool empty = true;
  /// dimension 2: nonempty sign/alpha intervals (at most one per sign).
  std::vector<AlphaInterval> intervals;
  /// A positive kernel vector, normalised to unit max-norm, when one exists.
  std::optional<Eigen::VectorXd> representative;
};

namespace detail {

inline std::optional<AlphaInterval> alpha_interval(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2, int sign) {
  const double scale = std::max(v1.cwiseAbs().maxCoeff(), v2.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  AlphaInterval iv;
  iv.sign = sign;
  for (Eigen::Index k = 0; k < v1.size(); ++k) {
    const double a = sign * v1[k];
    const double b = sign * v2[k];
    if (std::abs(b) <= eps) {
      if (!(a > eps)) return std::nullopt;
      continue;
    }
    const double bound = -a / b;
    if (b > 0.0)
      iv.lo = std::max(iv.lo, bound);
    else
      iv.hi = std::min(iv.hi, bound);
  }
  if (!(iv.lo < iv.hi)) return std::nullopt;
  return iv;
}

}  // namespace detail

inline PositiveMassRegion positive_mass_region(const std::vector<Eigen::VectorXd>& basis) {
  PositiveMassRegion out;
  out.dimension = basis.size();
  if (basis.empty()) return out;
  if (basis.size() >= 3) throw UnsupportedError("positive mass region only supported for kernel dimension 1 or 2");

  if (basis.size() == 1) {
    const Eigen::VectorXd& v = basis[0];
    const double eps = 1e-12 * v.cwiseAbs().maxCoeff();
    if ((v.array() > eps).all()) {
      out.empty = false;
      out.representative = v / v.maxCoeff();
    } else if ((v.array() < -eps).all()) {
      out.empty = false;
      out.representative = v / v.minCoeff();
    }
    return out;
  }

  for (int sign : {1, -1})
    if (auto iv = detail::alpha_interval(basis[0], basis[1], sign)) out.intervals.push_back(*iv);
  if (!out.intervals.empty()) {
    out.empty = false;
    const AlphaInterval& iv = out.intervals.front();
    Eigen::VectorXd m = iv.sign * (basis[0] + iv.representative() * basis[1]);
    out.representative = m / m.maxCoeff();
  }
  return out;
}

inline PositiveMassRegion positive_mass_region(const KernelBasis& basis) { return positive_mass_region(basis.vectors); }

// ---------------------------------------------------------------------------
// Symmetric families

enum class FamilyKind { Type1_1p4, Type2_1p4, Type1_1p6, Type2_1p6, Type2_1p8, Sym_1p5 };

inline constexpr std::array<FamilyKind, 6> kAllFamilies = {FamilyKind::Type1_1p4, FamilyKind::Type2_1p4,
                                                           FamilyKind::Type1_1p6, FamilyKind::Type2_1p6,
                                                           FamilyKind::Type2_1p8, FamilyKind::Sym_1p5};

inline std::string_view family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Type1_1p4: return "type1-1+4";
    case FamilyKind::Type2_1p4: return "type2-1+4";
    case FamilyKind::Type1_1p6: return "type1-1+6";
    case FamilyKind::Type2_1p6: return "type2-1+6";
    case FamilyKind::Type2_1p8: return "type2-1+8";
    case FamilyKind::Sym_1p5: return "sym-1+5";
  }
  return "?";
}

/// Accepts the canonical names and the shell-friendly "1p4" spelling.
inline FamilyKind parse_family(std::string_view name) {
  std::string norm(name);
  for (std::size_t i = 1; i + 1 < norm.size(); ++i)
    if (norm[i] == 'p' && std::isdigit(static_cast<unsigned char>(norm[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(norm[i + 1])))
      norm[i] = '+';
  for (FamilyKind k : kAllFamilies)
    if (family_name(k) == norm) return k;
  throw DomainError("unknown family '" + std::string(name) + "'");
}

inline std::size_t family_body_count(FamilyKind k) {
  switch (k) {
    case FamilyKind::Type1_1p4:
    case FamilyKind::Type2_1p4: return 4;
    case FamilyKind::Type1_1p6:
    case FamilyKind::Type2_1p6: return 6;
    case FamilyKind::Type2_1p8: return 8;
    case FamilyKind::Sym_1p5: return 5;
  }
  return 0;
}

inline std::size_t family_free_count(FamilyKind k) {
  switch (k) {
    case FamilyKind::Type1_1p4: return 1;
    case FamilyKind::Type2_1p4: return 2;
    case FamilyKind::Type1_1p6: return 2;
    case FamilyKind::Type2_1p6: return 3;
    case FamilyKind::Type2_1p8: return 4;
    case FamilyKind::Sym_1p5: return 2;
  }
  return 0;
}

struct SymmetricFamily {
  FamilyKind kind;
  std::vector<double> free_angles;
};

/// Full angle list of a family member.
///   type1-1+4: (0, a, pi, -a)            type2-1+4: (a, b, -b, -a)
///   type1-1+6: (0, a, b, pi, -b, -a)     type2-1+6: (a, b, c, -c, -b, -a)
///   type2-1+8: (a, b, c, d, -d, -c, -b, -a)
///   sym-1+5:   (a, b, 0, -b, -a) with 0 < b < a < pi
/// Free angles must lie in (0, pi) and be pairwise distinct.
inline RingConfiguration expand_family(const SymmetricFamily& fam, const PotentialExponent& s) {
  const std::size_t want = family_free_count(fam.kind);
  const auto& a = fam.free_angles;
  if (a.size() != want) {
    std::ostringstream os;
    os << family_name(fam.kind) << " takes " << want << " free angles, got " << a.size();
    throw DomainError(os.str());
  }
  for (double t : a)
    if (!(t > 0.0 && t < kPi)) throw DomainError("free angles of " + std::string(family_name(fam.kind)) + " must lie in (0, pi)");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (std::abs(a[i] - a[j]) < kCollisionThreshold) throw DomainError("free angles must be distinct");
  if (fam.kind == FamilyKind::Sym_1p5 && !(a[1] < a[0]))
    throw DomainError("sym-1+5 ordering requires 0 < theta2 < theta1 < pi");

  std::vector<double> th;
  switch (fam.kind) {
    case FamilyKind::Type1_1p4: th = {0.0, a[0], kPi, -a[0]}; break;
    case FamilyKind::Type2_1p4: th = {a[0], a[1], -a[1], -a[0]}; break;
    case FamilyKind::Type1_1p6: th = {0.0, a[0], a[1], kPi, -a[1], -a[0]}; break;
    case FamilyKind::Type2_1p6: th = {a[0], a[1], a[2], -a[2], -a[1], -a[0]}; break;
    case FamilyKind::Type2_1p8: th = {a[0], a[1], a[2], a[3], -a[3], -a[2], -a[1], -a[0]}; break;
    case FamilyKind::Sym_1p5: th = {a[0], a[1], 0.0, -a[1], -a[0]}; break;
  }
  return RingConfiguration(std::move(th), s);
}

inline RingConfiguration expand_family(const SymmetricFamily& fam, double s = 3.0) {
  return expand_family(fam, PotentialExponent(s));
}

// ---------------------------------------------------------------------------
// Symmetric 1+5 with symmetric masses (m1 = m5, m2 = m4)

/// The f-values of the sym-1+5 member (theta1, theta2); names follow body
/// indices, e.g. f12 = f(theta1 - theta2).
struct Sym5FValues {
  double f12, f13, f14, f15, f23, f24;
};

inline void check_sym5_order(double theta1, double theta2) {
  if (!(theta2 > 0.0 && theta2 < theta1 && theta1 < kPi)) {
    if (std::abs(theta1 - theta2) < kCollisionThreshold) throw CollisionError("sym-1+5: theta1 == theta2");
    throw DomainError("sym-1+5 requires 0 < theta2 < theta1 < pi");
  }
}

inline Sym5FValues sym5_f_values(double theta1, double theta2, const PotentialExponent& s) {
  check_sym5_order(theta1, theta2);
  return {f_value(theta1 - theta2, s), f_value(theta1, s),          f_value(theta1 + theta2, s),
          f_value(2.0 * theta1, s),    f_value(theta2, s),          f_value(2.0 * theta2, s)};
}

/// The two independent rows of F m = 0 acting on (m1, m2, m3).
inline Eigen::Matrix<double, 2, 3> sym5_reduced_system(double theta1, double theta2, const PotentialExponent& s) {
  const Sym5FValues v = sym5_f_values(theta1, theta2, s);
  Eigen::Matrix<double, 2, 3> a;
  a << v.f15, v.f12 + v.f14, v.f13,  //
      -v.f12 + v.f14, v.f24, v.f23;
  return a;
}

inline Eigen::Matrix<double, 2, 3> sym5_reduced_system(double theta1, double theta2, double s = 3.0) {
  return sym5_reduced_system(theta1, theta2, PotentialExponent(s));
}

/// The 2x2 minors (Z1, Z2, Z3) of the reduced system; Z_i vanishes where a
/// kernel mass vector has m_i = 0. The kernel direction is (Z1, -Z2, Z3).
inline std::array<double, 3> zero_mass_values(double theta1, double theta2, const PotentialExponent& s) {
  const Sym5FValues v = sym5_f_values(theta1, theta2, s);
  return {v.f23 * (v.f12 + v.f14) - v.f13 * v.f24,  //
          v.f13 * (v.f12 - v.f14) + v.f15 * v.f23,  //
          v.f12 * v.f12 - v.f14 * v.f14 + v.f15 * v.f24};
}

inline std::array<double, 3> zero_mass_values(double theta1, double theta2, double s = 3.0) {
  return zero_mass_values(theta1, theta2, PotentialExponent(s));
}

/// Mirror pairs (i, j) of the reflection that defines a family.
inline std::vector<std::pair<std::size_t, std::size_t>> family_mirror_pairs(FamilyKind k) {
  const std::size_t n = family_body_count(k);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  switch (k) {
    case FamilyKind::Type2_1p4:
    case FamilyKind::Type2_1p6:
    case FamilyKind::Type2_1p8:
    case FamilyKind::Sym_1p5:
      for (std::size_t i = 0; i < n / 2; ++i) out.emplace_back(i, n - 1 - i);
      break;
    case FamilyKind::Type1_1p4:
    case FamilyKind::Type1_1p6:
      for (std::size_t i = 1; i < n / 2; ++i) out.emplace_back(i, n - i);
      break;
  }
  return out;
}

/// Largest relative difference |m_i - m_j| / max(|m_i|, |m_j|) over mirror pairs.
inline double mass_asymmetry(const Eigen::VectorXd& m, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double worst = 0.0;
  for (auto [i, j] : pairs) {
    const double a = m[Eigen::Index(i)], b = m[Eigen::Index(j)];
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale > 0.0) worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

/// A positive kernel vector (unit max-norm) that breaks the mirror symmetry
/// as much as possible while keeping every mass away from zero. Scans the
/// alpha intervals of a two-dimensional kernel; returns nothing when no
/// positive vector has asymmetry above min_asymmetry.
inline std::optional<Eigen::VectorXd> pick_positive_asymmetric(
    const std::vector<Eigen::VectorXd>& basis, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    double min_asymmetry = 1e-3) {
  const PositiveMassRegion region = positive_mass_region(basis);
  if (region.empty) return std::nullopt;
  if (basis.size() == 1) {
    if (mass_asymmetry(*region.representative, pairs) > min_asymmetry) return region.representative;
    return std::nullopt;
  }

  std::optional<Eigen::VectorXd> best;
  double best_score = -1.0;
  auto consider = [&](int sign, double alpha) {
    Eigen::VectorXd m = sign * (basis[0] + alpha * basis[1]);
    const double top = m.maxCoeff();
    if (!(top > 0.0)) return;
    m /= top;
    const double margin = m.minCoeff();
    const double asym = mass_asymmetry(m, pairs);
    if (!(margin > 0.0) || !(asym > min_asymmetry)) return;
    const double score = std::min(margin, asym);
    if (score > best_score) {
      best_score = score;
      best = m;
    }
  };
  for (const AlphaInterval& iv : region.intervals) {
    if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) {
      for (int k = 1; k < 32; ++k) consider(iv.sign, iv.lo + (iv.hi - iv.lo) * k / 32.0);
    } else if (std::isfinite(iv.hi) || std::isfinite(iv.lo)) {
      const double edge = std::isfinite(iv.hi) ? iv.hi : iv.lo;
      const double dir = std::isfinite(iv.hi) ? -1.0 : 1.0;
      const double w = std::max(1.0, std::abs(edge));
      for (double step : {1.0 / 64, 1.0 / 16, 1.0 / 8, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 32.0})
        consider(iv.sign, edge + dir * w * step);
    } else {
      for (int k = -16; k <= 16; ++k) consider(iv.sign, 0.5 * k);
    }
  }
  return best;
}

/// Residual max-norm of F m.
inline double kernel_residual(const CoorbitalMatrix& f, const MassVector& m) {
  if (m.size() != f.size()) throw DomainError("mass vector size mismatch");
  return (f.entries * m.as_eigen()).cwiseAbs().maxCoeff();
}

}  // namespace coorbital
