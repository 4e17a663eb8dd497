#pragma once

// Certified re-verification with interval arithmetic: interval versions of
// f, h and the Pfaffian, a sign-certified bisection, and reports for the
// 1+4 and 1+6 / 1+8 asymmetric-mass examples and for the nonvanishing of
// det(H2) over the convex symmetric 1+5 region.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coorbital/cc_system.hpp"
#include "coorbital/errors.hpp"
#include "coorbital/geometry.hpp"
#include "coorbital/interval.hpp"
#include "coorbital/parallel.hpp"
#include "coorbital/stability.hpp"

namespace coorbital {

using IntervalMatrix = std::vector<std::vector<Interval>>;

/// Enclosure of f over delta. |sin(delta/2)| has period 2pi in delta, so no
/// range reduction is needed.
inline Interval interval_f(const Interval& delta, double s) {
  static_cast<void>(PotentialExponent{s});
  const Interval sh = abs(sin(delta * Interval(0.5)));
  if (!(sh.lo() > 0.0)) throw CollisionError("interval_f: enclosure reaches a collision");
  const Interval r = Interval(2.0) * sh;
  return sin(delta) * (pow(r, -s) - Interval(1.0));
}

/// Enclosure of h = f' over delta.
inline Interval interval_h(const Interval& delta, double s) {
  static_cast<void>(PotentialExponent{s});
  const Interval sh = abs(sin(delta * Interval(0.5)));
  if (!(sh.lo() > 0.0)) throw CollisionError("interval_h: enclosure reaches a collision");
  const Interval r = Interval(2.0) * sh;
  Interval out = sqr(r) * Interval(0.5) - Interval(1.0) - Interval(s - 1.0) * pow(r, -s);
  if (s != 2.0) out += Interval(s - 2.0) / (Interval(4.0) * pow(r, s - 2.0));
  return out;
}

/// Interval angle list of a family member; the type-1 antipodal point uses
/// a certified enclosure of pi.
inline std::vector<Interval> interval_family_thetas(FamilyKind kind, const std::vector<Interval>& a) {
  if (a.size() != family_free_count(kind)) throw DomainError("wrong number of free angles");
  const Interval pi = interval_pi();
  switch (kind) {
    case FamilyKind::Type1_1p4: return {0.0, a[0], pi, -a[0]};
    case FamilyKind::Type2_1p4: return {a[0], a[1], -a[1], -a[0]};
    case FamilyKind::Type1_1p6: return {0.0, a[0], a[1], pi, -a[1], -a[0]};
    case FamilyKind::Type2_1p6: return {a[0], a[1], a[2], -a[2], -a[1], -a[0]};
    case FamilyKind::Type2_1p8: return {a[0], a[1], a[2], a[3], -a[3], -a[2], -a[1], -a[0]};
    case FamilyKind::Sym_1p5: return {a[0], a[1], 0.0, -a[1], -a[0]};
  }
  return {};
}

/// F_ij = f(theta_i - theta_j) over interval angles.
inline IntervalMatrix interval_F(const std::vector<Interval>& thetas, double s) {
  const std::size_t n = thetas.size();
  IntervalMatrix f(n, std::vector<Interval>(n, Interval(0.0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      f[i][j] = interval_f(thetas[i] - thetas[j], s);
      f[j][i] = -f[i][j];
    }
  return f;
}

inline Interval interval_pfaffian(const IntervalMatrix& f) {
  return pfaffian_expand<Interval>(f.size(), [&](std::size_t i, std::size_t j) { return f[i][j]; });
}

inline Interval interval_family_pfaffian(FamilyKind kind, const std::vector<Interval>& free_angles, double s) {
  return interval_pfaffian(interval_F(interval_family_thetas(kind, free_angles), s));
}

/// Solves A x = b by Gaussian elimination with pivots chosen by largest
/// mignitude. Returns nothing if some pivot column cannot be certified
/// nonsingular.
inline std::optional<std::vector<Interval>> interval_solve(IntervalMatrix a, std::vector<Interval> b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (a[i][k].mig() > a[p][k].mig()) p = i;
    if (!(a[p][k].mig() > 0.0)) return std::nullopt;
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Interval q = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= q * a[k][j];
      b[i] -= q * b[k];
    }
  }
  std::vector<Interval> x(n, Interval(0.0));
  for (std::size_t k = n; k-- > 0;) {
    Interval acc = b[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= a[k][j] * x[j];
    x[k] = acc / a[k][k];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Sign-certified bisection

struct CertifiedRoot {
  Interval enclosure;
  int depth = 0;
  Interval value_lo;  // g at the lower bracket end
  Interval value_hi;  // g at the upper bracket end
};

/// Bisection on a bracket whose endpoint values have certified opposite
/// signs. g must be an interval extension of a function that is continuous
/// wherever it is defined; the bracket is first checked to be inside that
/// domain. Each step moves to a nearby split point if the midpoint value
/// cannot be signed.
inline CertifiedRoot certify_bracket(const std::function<Interval(const Interval&)>& g, const Interval& bracket,
                                     int max_depth) {
  if (max_depth < 1 || max_depth > 60) throw DomainError("max_depth must lie in [1, 60]");
  double a = bracket.lo();
  double b = bracket.hi();
  if (!(a < b)) throw DomainError("bracket must have positive width");

  CertifiedRoot out;
  try {
    constexpr int kPieces = 16;
    for (int k = 0; k < kPieces; ++k) {
      const double lo = a + (b - a) * k / kPieces;
      const double hi = k + 1 == kPieces ? b : a + (b - a) * (k + 1) / kPieces;
      g(Interval(lo, hi));
    }
    out.value_lo = g(Interval(a));
    out.value_hi = g(Interval(b));
  } catch (const CollisionError& e) {
    throw InconclusiveError(std::string("bracket leaves the domain of g: ") + e.what());
  } catch (const DomainError& e) {
    throw InconclusiveError(std::string("bracket leaves the domain of g: ") + e.what());
  }
  const CertifiedSign sa = certified_sign(out.value_lo);
  const CertifiedSign sb = certified_sign(out.value_hi);
  if (sa == CertifiedSign::contains_zero || sb == CertifiedSign::contains_zero || sa == sb) {
    std::ostringstream os;
    os << "endpoint signs not certified opposite: g(lo) " << out.value_lo << ", g(hi) " << out.value_hi;
    throw InconclusiveError(os.str());
  }

  const double target = std::ldexp(b - a, -max_depth);
  while (b - a > target) {
    std::optional<std::pair<double, CertifiedSign>> split;
    for (double frac : {0.5, 0.375, 0.625, 0.25, 0.75}) {
      const double c = a + frac * (b - a);
      if (!(c > a && c < b)) continue;
      const CertifiedSign sc = certified_sign(g(Interval(c)));
      if (sc != CertifiedSign::contains_zero) {
        split = std::make_pair(c, sc);
        break;
      }
    }
    if (!split) {
      std::ostringstream os;
      os << "cannot certify a sign inside [" << a << ", " << b << "] above the requested width " << target;
      throw InconclusiveError(os.str());
    }
    if (split->second == sa)
      a = split->first;
    else
      b = split->first;
    ++out.depth;
  }
  out.enclosure = Interval(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct Assertion {
  std::string name;
  std::optional<Interval> enclosure;
  bool passed = false;
  std::string detail;
};

struct CertificateReport {
  std::string target;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<Assertion> assertions;
  /// Certified mass enclosures, when the target produces a mass vector.
  std::vector<Interval> masses;
  std::vector<Interval> angles;

  bool passed() const {
    if (assertions.empty()) return false;
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }
  const Assertion* find(const std::string& name) const {
    for (const auto& a : assertions)
      if (a.name == name) return &a;
    return nullptr;
  }
};

/// Throws CertificationError naming the first failed assertion.
inline void require_certified(const CertificateReport& r) {
  for (const auto& a : r.assertions)
    if (!a.passed) throw CertificationError(r.target + ": assertion '" + a.name + "' not certified: " + a.detail);
  if (r.assertions.empty()) throw CertificationError(r.target + ": empty report");
}

namespace detail {

inline std::string interval_text(const Interval& x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline void add(CertificateReport& r, std::string name, std::optional<Interval> enc, bool ok, std::string detail) {
  r.assertions.push_back({std::move(name), enc, ok, std::move(detail)});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1+4: symmetric configuration (t1, t2, -t2, -t1) with asymmetric masses

struct FourBodyCertificateOptions {
  Interval theta1 = pi_fraction(1, 6);
  /// Mixing parameter of the mass family (1, a f12, a f12, -1 + a f23).
  Interval alpha = Interval(-2.5);
  /// Replace alpha by 2 / f23, the one value giving mirror-symmetric masses.
  bool alpha_symmetric = false;
  Interval bracket = Interval(1.9, 2.0);
  int max_depth = 40;
  double s = 3.0;
};

/// Entries are reported in the orientation fbar_ij = f(theta_j - theta_i),
/// in which the published values f12 ~ -0.536 and f23 ~ -0.565 are stated.
/// The masses (1, a f12, a f12, -1 + a f23) span the kernel when f14 = 0
/// and f12 = -f13.
inline CertificateReport certify_four_body(const FourBodyCertificateOptions& opt = {}) {
  CertificateReport rep;
  rep.target = "thm1";
  rep.parameters = {{"theta1_lo", opt.theta1.lo()}, {"theta1_hi", opt.theta1.hi()}, {"s", opt.s},
                    {"bracket_lo", opt.bracket.lo()}, {"bracket_hi", opt.bracket.hi()},
                    {"max_depth", double(opt.max_depth)}};
  const Interval t1 = opt.theta1;
  const double s = opt.s;
  auto fbar = [s](const Interval& from, const Interval& to) { return interval_f(to - from, s); };

  const Interval f14 = fbar(t1, -t1);
  detail::add(rep, "f14_zero", f14, f14.contains(0.0) && f14.width() < 1e-12,
              "f14 must vanish exactly: r14 = 1 at theta1 = pi/6");

  auto g = [&](const Interval& t2) { return fbar(t1, t2) + fbar(t1, -t2); };
  CertifiedRoot root;
  try {
    root = certify_bracket(g, opt.bracket, opt.max_depth);
  } catch (const InconclusiveError& e) {
    detail::add(rep, "theta2_root", std::nullopt, false, e.what());
    return rep;
  }
  const Interval t2 = root.enclosure;
  rep.angles = {t1, t2, -t2, -t1};
  detail::add(rep, "theta2_root", t2, t2.subset_of(Interval(1.9355, 1.9365)) && t2.width() < 1e-6,
              "root of f12 + f13 in the bracket, expected near 1.936");

  const Interval f12 = fbar(t1, t2), f13 = fbar(t1, -t2), f23 = fbar(t2, -t2);
  detail::add(rep, "f12_equals_minus_f13", f12 + f13, (f12 + f13).contains(0.0), "f12 + f13 over the root enclosure");
  detail::add(rep, "f12_value", f12, f12.subset_of(Interval(-0.537, -0.535)), "expected -0.536 +- 0.001");
  detail::add(rep, "f23_value", f23, f23.subset_of(Interval(-0.566, -0.564)), "expected -0.565 +- 0.001");

  IntervalMatrix fm(4, std::vector<Interval>(4, Interval(0.0)));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      fm[i][j] = fbar(rep.angles[i], rep.angles[j]);
      fm[j][i] = -fm[i][j];
    }
  const Interval pf = interval_pfaffian(fm);
  detail::add(rep, "pfaffian_zero", pf, pf.contains(0.0), "Pf = f12^2 - f13^2 + f14 f23 over the enclosure");

  const Interval alpha = opt.alpha_symmetric ? Interval(2.0) / f23 : opt.alpha;
  rep.parameters.emplace_back("alpha_lo", alpha.lo());
  rep.parameters.emplace_back("alpha_hi", alpha.hi());
  rep.masses = {Interval(1.0), alpha * f12, alpha * f12, Interval(-1.0) + alpha * f23};
  bool positive = true;
  for (const Interval& m : rep.masses) positive = positive && m.lo() > 0.0;
  const Interval alpha_max = Interval(1.0) / f23;
  detail::add(rep, "positive_masses", std::nullopt, positive,
              "all mass enclosures > 0; positivity holds for alpha < 1/f23 = " + detail::interval_text(alpha_max));

  bool residual_ok = true;
  Interval worst(0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    Interval row(0.0);
    for (std::size_t j = 0; j < 4; ++j) row += fm[i][j] * rep.masses[j];
    residual_ok = residual_ok && row.contains(0.0);
    if (row.mag() > worst.mag()) worst = row;
  }
  detail::add(rep, "kernel_residual", worst, residual_ok, "every row of F m encloses 0");

  const Interval diff = rep.masses[0] - rep.masses[3];
  detail::add(rep, "asymmetric_masses", diff, diff.excludes_zero(), "m1 - m4 = 2 - alpha f23 excludes 0");
  return rep;
}

// ---------------------------------------------------------------------------
// Kernel vectors at a certified Pfaffian zero

struct KernelCertificate {
  bool minor_invertible = false;
  std::size_t free_a = 0, free_b = 0;
  std::vector<Interval> masses;
  /// Largest |row| of F m over the enclosures.
  std::vector<Interval> rows;
};

/// With a, b fixed to m_hat's values, solves the remaining rows of F m = 0.
/// If that (N-2)-minor is invertible and Pf(F) = 0, F has rank N-2 and the
/// solution is a kernel vector; over a certified root enclosure the true
/// kernel vector lies inside the returned enclosures.
inline KernelCertificate certify_kernel_vector(const IntervalMatrix& f, const Eigen::VectorXd& m_hat) {
  const std::size_t n = f.size();
  Eigen::MatrixXd mid(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mid(Eigen::Index(i), Eigen::Index(j)) = f[i][j].mid();

  KernelCertificate out;
  double best = -1.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<Eigen::Index> keep;
      for (std::size_t k = 0; k < n; ++k)
        if (k != a && k != b) keep.push_back(Eigen::Index(k));
      const Eigen::MatrixXd sub = mid(keep, keep);
      const double p = std::abs(pfaffian(sub));
      if (p > best) {
        best = p;
        out.free_a = a;
        out.free_b = b;
      }
    }

  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < n; ++k)
    if (k != out.free_a && k != out.free_b) rest.push_back(k);
  const Interval ma(m_hat[Eigen::Index(out.free_a)]), mb(m_hat[Eigen::Index(out.free_b)]);
  IntervalMatrix a(rest.size(), std::vector<Interval>(rest.size()));
  std::vector<Interval> rhs(rest.size());
  for (std::size_t i = 0; i < rest.size(); ++i) {
    for (std::size_t j = 0; j < rest.size(); ++j) a[i][j] = f[rest[i]][rest[j]];
    rhs[i] = -(f[rest[i]][out.free_a] * ma + f[rest[i]][out.free_b] * mb);
  }
  const auto x = interval_solve(a, rhs);
  if (!x) return out;
  out.minor_invertible = true;
  out.masses.assign(n, Interval(0.0));
  out.masses[out.free_a] = ma;
  out.masses[out.free_b] = mb;
  for (std::size_t i = 0; i < rest.size(); ++i) out.masses[rest[i]] = (*x)[i];
  for (std::size_t i = 0; i < n; ++i) {
    Interval row(0.0);
    for (std::size_t j = 0; j < n; ++j) row += f[i][j] * out.masses[j];
    out.rows.push_back(row);
  }
  return out;
}

namespace detail {

inline void add_kernel_assertions(CertificateReport& rep, FamilyKind kind, const std::vector<Interval>& free_angles,
                                  double s) {
  const std::vector<Interval> thetas = interval_family_thetas(kind, free_angles);
  rep.angles = thetas;
  std::vector<double> mid;
  for (const Interval& t : free_angles) mid.push_back(t.mid());
  const RingConfiguration cfg = expand_family({kind, mid}, s);
  const KernelBasis basis = mass_kernel(build_F(cfg), 1e-6);
  const auto pairs = family_mirror_pairs(kind);
  std::optional<Eigen::VectorXd> m_hat;
  if (basis.dimension() >= 1 && basis.dimension() <= 2) m_hat = pick_positive_asymmetric(basis.vectors, pairs, 1e-2);
  if (!m_hat) {
    add(rep, "positive_kernel_vector", std::nullopt, false,
        "no positive asymmetric vector in the numerical kernel (dimension " + std::to_string(basis.dimension()) + ")");
    return;
  }
  const KernelCertificate kc = certify_kernel_vector(interval_F(thetas, s), *m_hat);
  if (!kc.minor_invertible) {
    add(rep, "positive_kernel_vector", std::nullopt, false, "complementary minor not certified invertible");
    return;
  }
  rep.masses = kc.masses;
  bool positive = true;
  for (const Interval& m : kc.masses) positive = positive && m.lo() > 0.0;
  add(rep, "positive_kernel_vector", std::nullopt, positive, "all certified mass enclosures are > 0");

  std::optional<Interval> witness;
  for (auto [i, j] : pairs) {
    const Interval d = kc.masses[i] - kc.masses[j];
    if (d.excludes_zero() && (!witness || d.mig() > witness->mig())) witness = d;
  }
  add(rep, "asymmetric_masses", witness, witness.has_value(), "some mirror pair has certified different masses");

  bool rows_ok = true;
  Interval worst(0.0);
  for (const Interval& r : kc.rows) {
    rows_ok = rows_ok && r.contains(0.0);
    if (r.mag() > worst.mag()) worst = r;
  }
  add(rep, "kernel_residual", worst, rows_ok, "every row of F m encloses 0");
}

}  // namespace detail

struct PfaffianZeroOptions {
  int max_depth = 32;
  double s = 3.0;
};

/// n = 6: theta1 = pi/8, theta2 = 3pi/7, Pfaffian root in theta3 over
/// (4pi/5, 13pi/16). n = 8: Pfaffian sign change over the box
/// (61pi/702, 63pi/725) x (95pi/289, 24pi/73) x (32pi/55, 71pi/122) x
/// (91pi/110, 24pi/29), with the zero isolated along theta4.
inline CertificateReport certify_pfaffian_zero(int n, const PfaffianZeroOptions& opt = {}) {
  if (n != 6 && n != 8) throw DomainError("certify_pfaffian_zero handles n = 6 or n = 8 (use certify_four_body for n = 4)");
  CertificateReport rep;
  const double s = opt.s;

  if (n == 6) {
    rep.target = "thm4n6";
    const Interval t1 = pi_fraction(1, 8), t2 = pi_fraction(3, 7);
    const Interval bracket(pi_fraction(4, 5).hi(), pi_fraction(13, 16).lo());
    rep.parameters = {{"s", s}, {"bracket_lo", bracket.lo()}, {"bracket_hi", bracket.hi()},
                      {"max_depth", double(opt.max_depth)}};
    auto g = [&](const Interval& t3) { return interval_family_pfaffian(FamilyKind::Type2_1p6, {t1, t2, t3}, s); };
    CertifiedRoot root;
    try {
      root = certify_bracket(g, bracket, opt.max_depth);
    } catch (const InconclusiveError& e) {
      detail::add(rep, "pfaffian_sign_change", std::nullopt, false, e.what());
      return rep;
    }
    detail::add(rep, "pfaffian_sign_change", Interval::hull(root.value_lo, root.value_hi), true,
                "Pf at 4pi/5: " + detail::interval_text(root.value_lo) +
                    ", at 13pi/16: " + detail::interval_text(root.value_hi));
    const Interval t3 = root.enclosure;
    detail::add(rep, "theta3_root", t3,
                t3.width() < 1e-4 && t3.subset_of(bracket) && t3.subset_of(Interval(2.5349 - 5e-4, 2.5349 + 5e-4)),
                "Pfaffian zero expected near 2.5349");
    detail::add_kernel_assertions(rep, FamilyKind::Type2_1p6, {t1, t2, t3}, s);
    return rep;
  }

  rep.target = "thm4n8";
  const std::array<Interval, 4> box = {
      Interval(pi_fraction(61, 702).hi(), pi_fraction(63, 725).lo()),
      Interval(pi_fraction(95, 289).hi(), pi_fraction(24, 73).lo()),
      Interval(pi_fraction(32, 55).hi(), pi_fraction(71, 122).lo()),
      Interval(pi_fraction(91, 110).hi(), pi_fraction(24, 29).lo()),
  };
  rep.parameters = {{"s", s}, {"max_depth", double(opt.max_depth)}};
  for (int k = 0; k < 4; ++k) {
    rep.parameters.emplace_back("theta" + std::to_string(k + 1) + "_lo", box[std::size_t(k)].lo());
    rep.parameters.emplace_back("theta" + std::to_string(k + 1) + "_hi", box[std::size_t(k)].hi());
  }
  auto pf = [&](const std::array<Interval, 4>& t) {
    return interval_family_pfaffian(FamilyKind::Type2_1p8, {t[0], t[1], t[2], t[3]}, s);
  };

  try {
    const Interval whole = pf(box);
    detail::add(rep, "no_collision_in_box", whole, true, "Pfaffian enclosure defined over the whole box");
  } catch (const CollisionError& e) {
    detail::add(rep, "no_collision_in_box", std::nullopt, false, e.what());
    return rep;
  }

  std::optional<Interval> neg, posv;
  for (int mask = 0; mask < 16; ++mask) {
    std::array<Interval, 4> corner;
    for (int k = 0; k < 4; ++k)
      corner[std::size_t(k)] = Interval((mask >> k) & 1 ? box[std::size_t(k)].hi() : box[std::size_t(k)].lo());
    const Interval v = pf(corner);
    if (v.hi() < 0.0 && (!neg || v.hi() < neg->hi())) neg = v;
    if (v.lo() > 0.0 && (!posv || v.lo() > posv->lo())) posv = v;
  }
  detail::add(rep, "pfaffian_sign_change", neg && posv ? std::optional(Interval::hull(*neg, *posv)) : std::nullopt,
              neg && posv, "certified negative and positive Pfaffian values at box corners");

  // Isolate the zero along theta4 at a fixed (theta1, theta2, theta3): the
  // box midpoint if it brackets, else the first corner that does.
  std::vector<std::array<double, 3>> anchors = {{box[0].mid(), box[1].mid(), box[2].mid()}};
  for (int mask = 0; mask < 8; ++mask)
    anchors.push_back({(mask & 1) ? box[0].hi() : box[0].lo(), (mask & 2) ? box[1].hi() : box[1].lo(),
                       (mask & 4) ? box[2].hi() : box[2].lo()});
  std::optional<CertifiedRoot> root;
  std::array<double, 3> anchor{};
  std::string last_error = "no anchor brackets a zero along theta4";
  for (const auto& a : anchors) {
    auto g = [&](const Interval& t4) { return pf({Interval(a[0]), Interval(a[1]), Interval(a[2]), t4}); };
    try {
      root = certify_bracket(g, box[3], opt.max_depth);
      anchor = a;
      break;
    } catch (const InconclusiveError& e) {
      last_error = e.what();
    }
  }
  if (!root) {
    detail::add(rep, "theta4_root", std::nullopt, false, last_error);
    return rep;
  }
  rep.parameters.emplace_back("anchor_theta1", anchor[0]);
  rep.parameters.emplace_back("anchor_theta2", anchor[1]);
  rep.parameters.emplace_back("anchor_theta3", anchor[2]);
  detail::add(rep, "theta4_root", root->enclosure, root->enclosure.subset_of(box[3]),
              "Pfaffian zero isolated along theta4 inside the box");
  detail::add_kernel_assertions(rep, FamilyKind::Type2_1p8,
                                {Interval(anchor[0]), Interval(anchor[1]), Interval(anchor[2]), root->enclosure}, s);
  return rep;
}

// ---------------------------------------------------------------------------
// Symmetric 1+5: interval versions of the reduced system and Hessian blocks

struct IntervalSym5F {
  Interval f12, f13, f14, f15, f23, f24;
};

inline IntervalSym5F interval_sym5_f(const Interval& t1, const Interval& t2, double s) {
  return {interval_f(t1 - t2, s), interval_f(t1, s), interval_f(t1 + t2, s),
          interval_f(Interval(2.0) * t1, s), interval_f(t2, s), interval_f(Interval(2.0) * t2, s)};
}

inline std::array<Interval, 3> interval_zero_mass_values(const Interval& t1, const Interval& t2, double s) {
  const IntervalSym5F v = interval_sym5_f(t1, t2, s);
  return {v.f23 * (v.f12 + v.f14) - v.f13 * v.f24,  //
          v.f13 * (v.f12 - v.f14) + v.f15 * v.f23,  //
          sqr(v.f12) - sqr(v.f14) + v.f15 * v.f24};
}

struct IntervalSym5H {
  Interval h12, h13, h14, h15, h23, h24;
};

inline IntervalSym5H interval_sym5_h(const Interval& t1, const Interval& t2, double s) {
  return {interval_h(t1 - t2, s), interval_h(t1, s), interval_h(t1 + t2, s),
          interval_h(Interval(2.0) * t1, s), interval_h(t2, s), interval_h(Interval(2.0) * t2, s)};
}

inline Interval interval_det_h1(const Interval& t1, const Interval& t2, const Interval& m1, const Interval& m2,
                                const Interval& m3, double s) {
  const IntervalSym5H h = interval_sym5_h(t1, t2, s);
  return Interval(4.0) * ((h.h12 + h.h14) * (h.h13 * m1 + h.h23 * m2) + h.h13 * h.h23 * m3) * m1 * m2 * m3;
}

inline Interval interval_det_h2(const Interval& t1, const Interval& t2, const Interval& m1, const Interval& m2,
                                const Interval& m3, double s) {
  const IntervalSym5H h = interval_sym5_h(t1, t2, s);
  const Interval a = h.h12 + h.h14;
  const Interval two(2.0);
  const Interval d11 = two * m1 * (two * h.h15 * m1 + a * m2 + h.h13 * m3);
  const Interval d22 = two * m2 * (a * m1 + two * h.h24 * m2 + h.h23 * m3);
  const Interval c = two * m1 * m2 * (h.h14 - h.h12);
  return d11 * d22 - sqr(c);
}

/// det(H2) in floating point, for sampling and tests.
inline double sym5_det_h2(double theta1, double theta2, double m1, double m2, double m3, const PotentialExponent& s) {
  const Sym5HValues h = sym5_h_values(theta1, theta2, s);
  const double a = h.h12 + h.h14;
  const double d11 = 2 * m1 * (2 * h.h15 * m1 + a * m2 + h.h13 * m3);
  const double d22 = 2 * m2 * (a * m1 + 2 * h.h24 * m2 + h.h23 * m3);
  const double c = 2 * m1 * m2 * (h.h14 - h.h12);
  return d11 * d22 - c * c;
}

// ---------------------------------------------------------------------------
// det(H2) over the convex region pi/6 < theta2 < pi/3, theta2 < theta1 < pi/2,
// theta1 - theta2 < pi/3

enum class MassSampling { equal, simplex, kernel };

inline std::string_view to_string(MassSampling m) {
  switch (m) {
    case MassSampling::equal: return "equal";
    case MassSampling::simplex: return "simplex";
    case MassSampling::kernel: return "kernel";
  }
  return "?";
}

inline MassSampling parse_mass_sampling(std::string_view s) {
  if (s == "equal") return MassSampling::equal;
  if (s == "simplex") return MassSampling::simplex;
  if (s == "kernel") return MassSampling::kernel;
  throw DomainError("unknown mass sampling '" + std::string(s) + "'");
}

enum class BoxStatus { det_nonzero, no_central_configuration, unresolved };

inline std::string_view to_string(BoxStatus b) {
  switch (b) {
    case BoxStatus::det_nonzero: return "det_nonzero";
    case BoxStatus::no_central_configuration: return "no_central_configuration";
    case BoxStatus::unresolved: return "unresolved";
  }
  return "?";
}

/// Mass vector (m1, m2, m3) of the symmetric 1+5 ring, or the kernel
/// direction (Z1, -Z2, Z3) when unset.
using Sym5Masses = std::optional<std::array<double, 3>>;

/// Classifies one box. no_central_configuration: for fixed masses a row of
/// the reduced system is certified nonzero; for kernel masses two
/// components of (Z1, -Z2, Z3) have certified opposite signs, so no
/// positive kernel vector exists. det_nonzero: the det(H2) enclosure
/// excludes zero. Boxes touching a collision are unresolved.
inline BoxStatus evaluate_detH2_box(const Interval& t1, const Interval& t2, const Sym5Masses& masses, double s) {
  if (!(t2.lo() < t1.hi())) throw DomainError("box lies outside theta2 < theta1");
  try {
    Interval m1, m2, m3;
    if (masses) {
      m1 = (*masses)[0];
      m2 = (*masses)[1];
      m3 = (*masses)[2];
      const IntervalSym5F v = interval_sym5_f(t1, t2, s);
      const Interval r1 = v.f15 * m1 + (v.f12 + v.f14) * m2 + v.f13 * m3;
      const Interval r2 = (v.f14 - v.f12) * m1 + v.f24 * m2 + v.f23 * m3;
      if (r1.excludes_zero() || r2.excludes_zero()) return BoxStatus::no_central_configuration;
    } else {
      const auto z = interval_zero_mass_values(t1, t2, s);
      m1 = z[0];
      m2 = -z[1];
      m3 = z[2];
      const bool any_pos = m1.lo() > 0.0 || m2.lo() > 0.0 || m3.lo() > 0.0;
      const bool any_neg = m1.hi() < 0.0 || m2.hi() < 0.0 || m3.hi() < 0.0;
      if (any_pos && any_neg) return BoxStatus::no_central_configuration;
    }
    if (interval_det_h2(t1, t2, m1, m2, m3, s).excludes_zero()) return BoxStatus::det_nonzero;
  } catch (const CollisionError&) {
  } catch (const DomainError&) {
  }
  return BoxStatus::unresolved;
}

struct DetH2Options {
  int grid_n = 32;
  int max_depth = 6;
  MassSampling sampling = MassSampling::equal;
  /// Simplex slices use masses (i, j, k) / K with i + j + k = K, all >= 1.
  int simplex_resolution = 5;
  /// Total box evaluations allowed per mass slice.
  std::size_t max_boxes = 2'000'000;
  unsigned threads = 1;
  double s = 3.0;
};

struct BoxRecord {
  std::string id;
  Interval theta1, theta2;
  BoxStatus status = BoxStatus::unresolved;
  int depth = 0;
  /// Unresolved box whose corner values of det(H2) have certified opposite signs.
  bool det_sign_change = false;
};

struct SliceCoverage {
  std::string label;
  Sym5Masses masses;
  double area_total = 0.0;
  double area_det_nonzero = 0.0;
  double area_no_cc = 0.0;
  double area_unresolved = 0.0;
  std::size_t boxes_det_nonzero = 0;
  std::size_t boxes_no_cc = 0;
  std::size_t boxes_unresolved = 0;
  std::size_t boxes_evaluated = 0;
  std::size_t det_sign_change_boxes = 0;
  bool resource_limit_hit = false;
  /// Unresolved leaves sorted by id.
  std::vector<BoxRecord> unresolved;

  double certified_fraction() const {
    return area_total > 0.0 ? (area_det_nonzero + area_no_cc) / area_total : 0.0;
  }
};

struct CoverageReport {
  DetH2Options options;
  std::vector<SliceCoverage> slices;

  /// Worst slice.
  double certified_fraction() const {
    double f = slices.empty() ? 0.0 : 1.0;
    for (const auto& s : slices) f = std::min(f, s.certified_fraction());
    return f;
  }
  std::size_t det_sign_change_boxes() const {
    std::size_t n = 0;
    for (const auto& s : slices) n += s.det_sign_change_boxes;
    return n;
  }
  bool resource_limit_hit() const {
    return std::any_of(slices.begin(), slices.end(), [](const SliceCoverage& s) { return s.resource_limit_hit; });
  }
};

namespace detail {

inline bool box_meets_region(double a1, double b1, double a2, double b2) {
  const double third = kPi / 3.0;
  return b1 > a2 && a1 - b2 < third && a2 < third && b2 > kPi / 6.0 && a1 < 0.5 * kPi;
}

struct SliceAccumulator {
  SliceCoverage cov;
  std::vector<BoxRecord> leaves;
};

inline bool det_corner_sign_change(const Interval& t1, const Interval& t2, const Sym5Masses& masses, double s) {
  bool pos = false, neg = false;
  for (double a : {t1.lo(), t1.hi()})
    for (double b : {t2.lo(), t2.hi()}) {
      if (!(b > 0.0 && b < a)) continue;
      try {
        Interval m1, m2, m3;
        if (masses) {
          m1 = (*masses)[0];
          m2 = (*masses)[1];
          m3 = (*masses)[2];
        } else {
          const auto z = interval_zero_mass_values(Interval(a), Interval(b), s);
          m1 = z[0];
          m2 = -z[1];
          m3 = z[2];
        }
        const Interval d = interval_det_h2(Interval(a), Interval(b), m1, m2, m3, s);
        pos = pos || d.lo() > 0.0;
        neg = neg || d.hi() < 0.0;
      } catch (const Error&) {
      }
    }
  return pos && neg;
}

inline void subdivide(const Interval& t1, const Interval& t2, int depth, const std::string& id,
                      const Sym5Masses& masses, const DetH2Options& opt, std::size_t& budget,
                      std::vector<BoxRecord>& leaves, bool& limit_hit) {
  if (!box_meets_region(t1.lo(), t1.hi(), t2.lo(), t2.hi())) return;
  BoxStatus st = BoxStatus::unresolved;
  if (budget > 0) {
    --budget;
    st = evaluate_detH2_box(t1, t2, masses, opt.s);
  } else {
    limit_hit = true;
  }
  if (st == BoxStatus::unresolved && depth < opt.max_depth && budget == 0) limit_hit = true;
  if (st != BoxStatus::unresolved || depth >= opt.max_depth || budget == 0) {
    BoxRecord rec{id, t1, t2, st, depth, false};
    if (st == BoxStatus::unresolved) rec.det_sign_change = det_corner_sign_change(t1, t2, masses, opt.s);
    leaves.push_back(std::move(rec));
    return;
  }
  const double c1 = t1.mid(), c2 = t2.mid();
  const Interval h1[2] = {Interval(t1.lo(), c1), Interval(c1, t1.hi())};
  const Interval h2[2] = {Interval(t2.lo(), c2), Interval(c2, t2.hi())};
  for (int q = 0; q < 4; ++q)
    subdivide(h1[q & 1], h2[q >> 1], depth + 1, id + char('0' + q), masses, opt, budget, leaves, limit_hit);
}

inline SliceCoverage run_slice(const Sym5Masses& masses, std::string label, const DetH2Options& opt) {
  const double lo1 = kPi / 6.0, hi1 = kPi / 2.0, lo2 = kPi / 6.0, hi2 = kPi / 3.0;
  const std::size_t g = std::size_t(opt.grid_n);
  const std::size_t cells = g * g;
  const std::size_t per_cell = std::max<std::size_t>(1, opt.max_boxes / cells);

  std::vector<std::vector<BoxRecord>> per(cells);
  std::vector<std::size_t> used(cells, 0);
  std::vector<char> limit(cells, 0);
  parallel_for(cells, opt.threads, [&](std::size_t c) {
    const std::size_t i = c / g, j = c % g;
    const Interval t1(lo1 + (hi1 - lo1) * double(i) / double(g),
                      i + 1 == g ? hi1 : lo1 + (hi1 - lo1) * double(i + 1) / double(g));
    const Interval t2(lo2 + (hi2 - lo2) * double(j) / double(g),
                      j + 1 == g ? hi2 : lo2 + (hi2 - lo2) * double(j + 1) / double(g));
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "c%04zu_%04zu/", i, j);
    std::size_t budget = per_cell;
    bool hit = false;
    subdivide(t1, t2, 0, idbuf, masses, opt, budget, per[c], hit);
    used[c] = per_cell - budget;
    limit[c] = hit;
  });

  SliceCoverage cov;
  cov.label = std::move(label);
  cov.masses = masses;
  for (std::size_t c = 0; c < cells; ++c) {
    cov.boxes_evaluated += used[c];
    cov.resource_limit_hit = cov.resource_limit_hit || limit[c];
    for (BoxRecord& r : per[c]) {
      const double area = r.theta1.width() * r.theta2.width();
      cov.area_total += area;
      switch (r.status) {
        case BoxStatus::det_nonzero:
          cov.area_det_nonzero += area;
          ++cov.boxes_det_nonzero;
          break;
        case BoxStatus::no_central_configuration:
          cov.area_no_cc += area;
          ++cov.boxes_no_cc;
          break;
        case BoxStatus::unresolved:
          cov.area_unresolved += area;
          ++cov.boxes_unresolved;
          if (r.det_sign_change) ++cov.det_sign_change_boxes;
          cov.unresolved.push_back(std::move(r));
          break;
      }
    }
  }
  std::sort(cov.unresolved.begin(), cov.unresolved.end(),
            [](const BoxRecord& a, const BoxRecord& b) { return a.id < b.id; });
  return cov;
}

}  // namespace detail

/// Adaptive subdivision of the bounding rectangle [pi/6, pi/2] x [pi/6, pi/3]
/// into grid_n^2 cells, refined up to max_depth quadtree levels; boxes that
/// miss the region are dropped. Area fractions are over the kept leaves,
/// which cover the region. When the box budget runs out the remaining boxes
/// are reported unresolved and resource_limit_hit is set.
inline CoverageReport certify_detH2_region(const DetH2Options& opt = {}) {
  if (opt.grid_n < 32) throw DomainError("grid_n must be at least 32");
  if (opt.max_depth < 0 || opt.max_depth > 20) throw DomainError("max_depth must lie in [0, 20]");
  static_cast<void>(PotentialExponent{opt.s});

  CoverageReport rep;
  rep.options = opt;
  switch (opt.sampling) {
    case MassSampling::equal:
      rep.slices.push_back(detail::run_slice(std::array<double, 3>{1.0, 1.0, 1.0}, "equal", opt));
      break;
    case MassSampling::kernel:
      rep.slices.push_back(detail::run_slice(std::nullopt, "kernel", opt));
      break;
    case MassSampling::simplex: {
      const int k = opt.simplex_resolution;
      if (k < 3) throw DomainError("simplex_resolution must be at least 3");
      for (int i = 1; i < k; ++i)
        for (int j = 1; i + j < k; ++j) {
          const int l = k - i - j;
          std::ostringstream label;
          label << "simplex(" << i << "," << j << "," << l << ")/" << k;
          rep.slices.push_back(detail::run_slice(
              std::array<double, 3>{double(i) / k, double(j) / k, double(l) / k}, label.str(), opt));
        }
      break;
    }
  }
  return rep;
}

}  // namespace coorbital
