#pragma once

// Root finding and curve tracing: the restricted 1+2+1 problem, Pfaffian
// and zero-mass curves of two-parameter families, asymmetric positive
// kernel vectors on Pfaffian zeros, damped Newton for the full and reduced
// central-configuration equations, and the convex-region filters.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coorbital/cc_system.hpp"
#include "coorbital/errors.hpp"
#include "coorbital/geometry.hpp"
#include "coorbital/parallel.hpp"

namespace coorbital {

// ---------------------------------------------------------------------------
// 1+2+1: two bodies at 0 and theta2, a test body theta3

enum class CaseLabel { equilateral_plus, equilateral_minus, collinear };

inline std::string_view to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::equilateral_plus: return "equilateral+";
    case CaseLabel::equilateral_minus: return "equilateral-";
    case CaseLabel::collinear: return "collinear";
  }
  return "?";
}

inline CaseLabel parse_case_label(std::string_view s) {
  if (s == "equilateral+" || s == "equilateral" || s == "equilateral-plus") return CaseLabel::equilateral_plus;
  if (s == "equilateral-" || s == "equilateral-minus") return CaseLabel::equilateral_minus;
  if (s == "collinear") return CaseLabel::collinear;
  throw DomainError("unknown case label '" + std::string(s) + "'");
}

/// theta2 of each case: pi/3, 5pi/3, pi.
inline double case_theta2(CaseLabel c) {
  switch (c) {
    case CaseLabel::equilateral_plus: return kPi / 3.0;
    case CaseLabel::equilateral_minus: return 5.0 * kPi / 3.0;
    case CaseLabel::collinear: return kPi;
  }
  return 0.0;
}

/// Search intervals for theta3; each holds exactly one root.
inline std::vector<std::pair<double, double>> case_intervals(CaseLabel c) {
  switch (c) {
    case CaseLabel::equilateral_plus:
      return {{0.0, kPi / 3.0}, {kPi / 3.0, kPi}, {kPi, 4.0 * kPi / 3.0}, {4.0 * kPi / 3.0, kTwoPi}};
    case CaseLabel::equilateral_minus:
      return {{0.0, 2.0 * kPi / 3.0}, {2.0 * kPi / 3.0, kPi}, {kPi, 5.0 * kPi / 3.0}, {5.0 * kPi / 3.0, kTwoPi}};
    case CaseLabel::collinear: return {{0.0, kPi}, {kPi, kTwoPi}};
  }
  return {};
}

struct RootList {
  CaseLabel case_label = CaseLabel::collinear;
  std::vector<double> roots;  // sorted, in (0, 2pi)
  std::vector<std::pair<double, double>> intervals;
  std::vector<int> per_interval_counts;
  double m1 = 0.5;
  double s = 3.0;
  /// The vortex case s = 2 lies outside the hypothesis of the root count.
  bool outside_hypothesis = false;
};

/// m1 f(theta3) + (1 - m1) f(theta3 - theta2).
inline double restricted_1p2p1(double theta3, double theta2, double m1, const PotentialExponent& s) {
  return m1 * f_value(theta3, s) + (1.0 - m1) * f_value(theta3 - theta2, s);
}

inline double restricted_1p2p1_derivative(double theta3, double theta2, double m1, const PotentialExponent& s) {
  return m1 * hessian_entry(theta3, s) + (1.0 - m1) * hessian_entry(theta3 - theta2, s);
}

inline constexpr int kRootScanSamples = 4096;

/// Sign scan on each interval, bisection of every sign change to width
/// 1e-13, then one Newton step kept only if it improves the residual.
inline RootList solve_1p2p1(double m1, CaseLabel label, const PotentialExponent& s) {
  if (!(m1 > 0.0 && m1 < 1.0)) throw DomainError("m1 must lie in (0, 1)");
  RootList out;
  out.case_label = label;
  out.m1 = m1;
  out.s = s.value();
  out.outside_hypothesis = s.is_vortex();
  out.intervals = case_intervals(label);
  const double t2 = case_theta2(label);
  auto g = [&](double t) { return restricted_1p2p1(t, t2, m1, s); };

  for (const auto& [lo, hi] : out.intervals) {
    int count = 0;
    const double h = (hi - lo) / kRootScanSamples;
    double a = lo + 0.5 * h;
    double ga = g(a);
    for (int k = 1; k < kRootScanSamples; ++k) {
      const double b = lo + (k + 0.5) * h;
      const double gb = g(b);
      if ((ga < 0.0) != (gb < 0.0) || ga == 0.0) {
        double x0 = a, x1 = b, g0 = ga;
        if (ga == 0.0) {
          x1 = a;
        } else {
          while (x1 - x0 > 1e-13) {
            const double c = 0.5 * (x0 + x1);
            const double gc = g(c);
            if ((gc < 0.0) == (g0 < 0.0)) {
              x0 = c;
              g0 = gc;
            } else {
              x1 = c;
            }
          }
        }
        double root = 0.5 * (x0 + x1);
        const double d = restricted_1p2p1_derivative(root, t2, m1, s);
        if (d != 0.0) {
          const double polished = root - g(root) / d;
          if (polished >= x0 - 1e-12 && polished <= x1 + 1e-12 && std::abs(g(polished)) <= std::abs(g(root)))
            root = polished;
        }
        out.roots.push_back(root);
        ++count;
      }
      a = b;
      ga = gb;
    }
    out.per_interval_counts.push_back(count);
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

inline RootList solve_1p2p1(double m1, CaseLabel label, double s = 3.0) {
  return solve_1p2p1(m1, label, PotentialExponent(s));
}

// ---------------------------------------------------------------------------
// Two-parameter families and contour tracing

inline double pfaffian_on_family(const SymmetricFamily& fam, const PotentialExponent& s) {
  if (family_body_count(fam.kind) % 2 != 0) throw DomainError("Pfaffian needs an even-N family");
  return pfaffian(build_F(expand_family(fam, s)));
}

inline double pfaffian_on_family(const SymmetricFamily& fam, double s = 3.0) {
  return pfaffian_on_family(fam, PotentialExponent(s));
}

enum class CurveTag { Pfaffian, Z1, Z2, Z3 };

inline std::string_view to_string(CurveTag t) {
  switch (t) {
    case CurveTag::Pfaffian: return "pfaffian";
    case CurveTag::Z1: return "z1";
    case CurveTag::Z2: return "z2";
    case CurveTag::Z3: return "z3";
  }
  return "?";
}

inline CurveTag parse_curve_tag(std::string_view s) {
  std::string low(s);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  if (low == "pfaffian") return CurveTag::Pfaffian;
  if (low == "z1") return CurveTag::Z1;
  if (low == "z2") return CurveTag::Z2;
  if (low == "z3") return CurveTag::Z3;
  throw DomainError("unknown function tag '" + std::string(s) + "'");
}

struct Window {
  double x0 = 0.02, x1 = kPi - 0.02;
  double y0 = 0.02, y1 = kPi - 0.02;
};

struct Polyline {
  CurveTag tag = CurveTag::Pfaffian;
  std::vector<std::array<double, 2>> points;
  bool closed = false;
};

struct TraceResult {
  CurveTag tag = CurveTag::Pfaffian;
  FamilyKind family = FamilyKind::Type2_1p4;
  Window window;
  int grid_n = 0;
  std::vector<Polyline> polylines;
  /// Cells (i, j) with an odd number of accepted crossings.
  std::vector<std::array<int, 2>> degenerate_cells;
  /// Sign changes rejected as poles (|f| did not fall below the tolerance).
  std::size_t rejected_crossings = 0;
};

inline constexpr double kTraceTolerance = 1e-8;

/// The traced function at (x, y) = free angles, NaN where undefined
/// (collision, family ordering). Z tags need the sym-1+5 family; the
/// Pfaffian needs an even family with two free angles.
inline std::function<double(double, double)> curve_function(CurveTag tag, FamilyKind fam, const PotentialExponent& s) {
  if (family_free_count(fam) != 2) throw DomainError("tracing needs a family with two free angles");
  if (tag == CurveTag::Pfaffian) {
    if (family_body_count(fam) % 2 != 0) throw DomainError("Pfaffian needs an even-N family");
    return [fam, s](double x, double y) {
      try {
        return pfaffian_on_family({fam, {x, y}}, s);
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
  }
  if (fam != FamilyKind::Sym_1p5) throw DomainError("zero-mass curves are defined for sym-1+5");
  const int idx = tag == CurveTag::Z1 ? 0 : tag == CurveTag::Z2 ? 1 : 2;
  return [idx, s](double x, double y) {
    if (!(y < x)) return std::numeric_limits<double>::quiet_NaN();
    try {
      return zero_mass_values(x, y, s)[std::size_t(idx)];
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

namespace detail {

struct EdgeCrossing {
  bool accepted = false;
  std::array<double, 2> point{};
};

inline EdgeCrossing refine_edge(const std::function<double(double, double)>& fn, std::array<double, 2> p0, double f0,
                                std::array<double, 2> p1) {
  double t0 = 0.0, t1 = 1.0;
  auto at = [&](double t) { return std::array<double, 2>{p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])}; };
  for (int it = 0; it < 80; ++it) {
    const double tm = 0.5 * (t0 + t1);
    const auto pm = at(tm);
    const double fm = fn(pm[0], pm[1]);
    if (!std::isfinite(fm)) return {};
    if (std::abs(fm) < kTraceTolerance && (t1 - t0) < 1e-10) return {true, pm};
    if ((fm < 0.0) == (f0 < 0.0)) {
      t0 = tm;
      f0 = fm;
    } else {
      t1 = tm;
    }
    if (t1 - t0 < 1e-17) break;
  }
  const auto pm = at(0.5 * (t0 + t1));
  const double fm = fn(pm[0], pm[1]);
  if (std::isfinite(fm) && std::abs(fm) < kTraceTolerance) return {true, pm};
  return {};
}

}  // namespace detail

/// Marching squares on a grid_n x grid_n cell grid over the window. Each
/// sign change on a grid edge is refined by bisection to |f| < 1e-8; sign
/// changes across poles never reach the tolerance and are dropped. Saddle
/// cells are resolved with the value at the cell centre. Segments are
/// chained through shared edges into open polylines (in order of their
/// first edge) followed by closed loops.
inline TraceResult trace_zero_curve(CurveTag tag, FamilyKind fam, const Window& w, int grid_n,
                                    const PotentialExponent& s, unsigned threads = 1) {
  if (grid_n < 16) throw DomainError("grid_n must be at least 16");
  if (!(w.x0 > 0.0 && w.x1 < kPi && w.y0 > 0.0 && w.y1 < kPi && w.x0 < w.x1 && w.y0 < w.y1))
    throw DomainError("trace window must be a nonempty rectangle inside (0, pi)^2");
  const auto fn = curve_function(tag, fam, s);
  const std::size_t n = std::size_t(grid_n);
  const double hx = (w.x1 - w.x0) / double(n), hy = (w.y1 - w.y0) / double(n);
  auto node = [&](std::size_t i, std::size_t j) {
    return std::array<double, 2>{i == n ? w.x1 : w.x0 + double(i) * hx, j == n ? w.y1 : w.y0 + double(j) * hy};
  };

  std::vector<double> val((n + 1) * (n + 1));
  parallel_for(n + 1, threads, [&](std::size_t j) {
    for (std::size_t i = 0; i <= n; ++i) {
      const auto p = node(i, j);
      val[j * (n + 1) + i] = fn(p[0], p[1]);
    }
  });
  auto v = [&](std::size_t i, std::size_t j) { return val[j * (n + 1) + i]; };
  auto changes = [](double a, double b) { return std::isfinite(a) && std::isfinite(b) && ((a < 0.0) != (b < 0.0)); };

  // Edge ids: horizontal (i,j)-(i+1,j) -> j*n + i; vertical (i,j)-(i,j+1) -> H + j*(n+1) + i.
  const std::size_t horiz = n * (n + 1);
  auto hid = [&](std::size_t i, std::size_t j) { return j * n + i; };
  auto vid = [&](std::size_t i, std::size_t j) { return horiz + j * (n + 1) + i; };

  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (changes(v(i, j), v(i + 1, j))) candidates.push_back(hid(i, j));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= n; ++i)
      if (changes(v(i, j), v(i, j + 1))) candidates.push_back(vid(i, j));
  std::sort(candidates.begin(), candidates.end());

  std::vector<detail::EdgeCrossing> found(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t k) {
    const std::size_t e = candidates[k];
    std::size_t i, j, i2, j2;
    if (e < horiz) {
      i = e % n;
      j = e / n;
      i2 = i + 1;
      j2 = j;
    } else {
      i = (e - horiz) % (n + 1);
      j = (e - horiz) / (n + 1);
      i2 = i;
      j2 = j + 1;
    }
    found[k] = detail::refine_edge(fn, node(i, j), v(i, j), node(i2, j2));
  });

  TraceResult out;
  out.tag = tag;
  out.family = fam;
  out.window = w;
  out.grid_n = grid_n;
  std::map<std::size_t, std::array<double, 2>> points;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (found[k].accepted)
      points.emplace(candidates[k], found[k].point);
    else
      ++out.rejected_crossings;
  }

  std::vector<std::array<std::size_t, 2>> segments;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bottom = hid(i, j), top = hid(i, j + 1), left = vid(i, j), right = vid(i + 1, j);
      std::vector<std::size_t> hits;
      for (std::size_t e : {bottom, right, top, left})
        if (points.count(e)) hits.push_back(e);
      if (hits.empty()) continue;
      if (hits.size() == 2) {
        segments.push_back({hits[0], hits[1]});
      } else if (hits.size() == 4) {
        const auto c = std::array<double, 2>{node(i, j)[0] + 0.5 * hx, node(i, j)[1] + 0.5 * hy};
        const double fc = fn(c[0], c[1]);
        const bool center_neg = fc < 0.0;
        // Corners whose sign differs from the centre are cut off.
        if ((v(i, j) < 0.0) != center_neg || !std::isfinite(fc)) {
          segments.push_back({bottom, left});
          segments.push_back({right, top});
        } else {
          segments.push_back({bottom, right});
          segments.push_back({left, top});
        }
      } else {
        out.degenerate_cells.push_back({int(i), int(j)});
      }
    }

  std::map<std::size_t, std::vector<std::size_t>> by_edge;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    by_edge[segments[k][0]].push_back(k);
    by_edge[segments[k][1]].push_back(k);
  }
  std::vector<char> used(segments.size(), 0);
  auto walk = [&](std::size_t start_edge, std::size_t seg) {
    Polyline pl;
    pl.tag = tag;
    std::size_t edge = start_edge;
    pl.points.push_back(points.at(edge));
    while (true) {
      used[seg] = 1;
      edge = segments[seg][0] == edge ? segments[seg][1] : segments[seg][0];
      pl.points.push_back(points.at(edge));
      std::optional<std::size_t> next;
      for (std::size_t k : by_edge[edge])
        if (!used[k]) next = k;
      if (!next) break;
      seg = *next;
    }
    if (pl.points.size() > 2 && edge == start_edge) pl.closed = true;
    out.polylines.push_back(std::move(pl));
  };
  for (const auto& [edge, segs] : by_edge)
    if (segs.size() == 1 && !used[segs[0]]) walk(edge, segs[0]);
  for (std::size_t k = 0; k < segments.size(); ++k)
    if (!used[k]) walk(std::min(segments[k][0], segments[k][1]), k);
  return out;
}

inline TraceResult trace_zero_curve(CurveTag tag, FamilyKind fam, const Window& w, int grid_n, double s = 3.0,
                                    unsigned threads = 1) {
  return trace_zero_curve(tag, fam, w, grid_n, PotentialExponent(s), threads);
}

// ---------------------------------------------------------------------------
// Asymmetric positive masses on a Pfaffian zero

struct AsymmetricSolution {
  SymmetricFamily family;
  RingConfiguration config;
  MassVector masses;
  double residual = 0.0;
  double asymmetry = 0.0;
  double pfaffian = 0.0;
};

namespace detail {

/// Root of the Pfaffian in the last free angle near the seed: expand a
/// bracket around the seed, bisect, then polish with secant steps.
inline std::vector<double> solve_last_angle(FamilyKind kind, std::vector<double> free, const PotentialExponent& s) {
  const std::size_t last = free.size() - 1;
  auto g = [&](double t) {
    std::vector<double> a = free;
    a[last] = t;
    return pfaffian_on_family({kind, a}, s);
  };
  auto safe = [&](double t) -> std::optional<double> {
    if (!(t > 0.0 && t < kPi)) return std::nullopt;
    try {
      return g(t);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const double t0 = free[last];
  const auto g0 = safe(t0);
  if (!g0) throw DomainError("seed is not a valid family member");
  if (*g0 == 0.0) return free;

  std::optional<std::pair<double, double>> bracket;
  for (double h = 1e-4; h < 1.0 && !bracket; h *= 2.0)
    for (double sign : {1.0, -1.0}) {
      const auto gh = safe(t0 + sign * h);
      if (gh && ((*gh < 0.0) != (*g0 < 0.0))) {
        bracket = sign > 0 ? std::make_pair(t0, t0 + h) : std::make_pair(t0 - h, t0);
        break;
      }
    }
  if (!bracket) throw ConvergenceError("no Pfaffian sign change near the seed");
  double a = bracket->first, b = bracket->second;
  double ga = g(a);
  while (b - a > 1e-15 * std::max(1.0, std::abs(a))) {
    const double c = 0.5 * (a + b);
    if (c <= a || c >= b) break;
    const double gc = g(c);
    if (gc == 0.0) {
      a = b = c;
      break;
    }
    if ((gc < 0.0) == (ga < 0.0)) {
      a = c;
      ga = gc;
    } else {
      b = c;
    }
  }
  free[last] = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
  return free;
}

}  // namespace detail

/// Polishes the seed onto the Pfaffian zero set (even N; type-1 families
/// have Pf = 0 identically and odd N always has a kernel) and picks a
/// positive kernel vector with maximal mirror asymmetry.
inline AsymmetricSolution find_asymmetric_positive(const SymmetricFamily& seed, const PotentialExponent& s) {
  const bool even = family_body_count(seed.kind) % 2 == 0;
  std::vector<double> free = seed.free_angles;
  const RingConfiguration seed_cfg = expand_family(seed, s);
  if (even && std::abs(pfaffian(build_F(seed_cfg))) > 1e-14) free = detail::solve_last_angle(seed.kind, free, s);

  AsymmetricSolution out{{seed.kind, free}, expand_family({seed.kind, free}, s), MassVector{}, 0, 0, 0};
  const CoorbitalMatrix f = build_F(out.config);
  if (even) out.pfaffian = pfaffian(f);
  const KernelBasis basis = mass_kernel(f, 1e-9);
  if (basis.dimension() == 0) throw ConvergenceError("numerical kernel is trivial at the polished configuration");
  if (basis.dimension() > 2) throw UnsupportedError("kernel dimension above 2");
  const auto pairs = family_mirror_pairs(seed.kind);
  const PositiveMassRegion region = positive_mass_region(basis);
  if (region.empty) throw NoPositiveMassError("no positive mass vector in the kernel");
  const auto m = pick_positive_asymmetric(basis.vectors, pairs, 1e-3);
  if (!m) throw NoPositiveMassError("positive kernel vectors exist but none is asymmetric");
  out.masses = MassVector(std::vector<double>(m->data(), m->data() + m->size()));
  out.residual = kernel_residual(f, out.masses);
  out.asymmetry = mass_asymmetry(*m, pairs);
  return out;
}

inline AsymmetricSolution find_asymmetric_positive(const SymmetricFamily& seed, double s = 3.0) {
  return find_asymmetric_positive(seed, PotentialExponent(s));
}

// ---------------------------------------------------------------------------
// Convex-region filters

/// Gaps between consecutive points in the given order, each in [0, 2pi).
inline std::vector<double> ordered_gaps(std::span<const double> thetas) {
  std::vector<double> g;
  for (std::size_t i = 0; i + 1 < thetas.size(); ++i) g.push_back(reduce_angle(thetas[i] - thetas[i + 1]));
  return g;
}

struct RegionBResult {
  bool in_region = false;
  std::array<double, 3> gaps{};
  double span = 0.0;
  /// span = pi: impossible with three gaps below pi/3, flagged as an inconsistency.
  bool half_circle = false;
};

/// Membership of a convex 1+4 configuration, listed in order around the
/// circle (either direction) with span theta_14 <= pi, in the set
/// theta_12, theta_23, theta_34 < pi/3 < theta_14.
inline RegionBResult region_B_details(const RingConfiguration& config) {
  if (config.size() != 4) throw DomainError("region B needs four ring points");
  std::vector<double> th(config.thetas().begin(), config.thetas().end());
  auto gaps = ordered_gaps(th);
  double span = gaps[0] + gaps[1] + gaps[2];
  if (span > kPi + 1e-12) {
    std::reverse(th.begin(), th.end());
    gaps = ordered_gaps(th);
    std::reverse(gaps.begin(), gaps.end());
    span = gaps[0] + gaps[1] + gaps[2];
  }
  if (span > kPi + 1e-12) throw DomainError("points are not in convex order spanning at most pi");
  RegionBResult r;
  r.gaps = {gaps[0], gaps[1], gaps[2]};
  r.span = span;
  r.half_circle = std::abs(span - kPi) <= 1e-12;
  const double third = kPi / 3.0;
  r.in_region = !r.half_circle && gaps[0] < third && gaps[1] < third && gaps[2] < third && span > third;
  return r;
}

inline bool region_B_check(const RingConfiguration& config) { return region_B_details(config).in_region; }

/// Membership of the symmetric 1+5 member (theta1, theta2) in the set
/// pi/6 < theta2 < pi/3, theta1 - theta2 < pi/3.
inline bool region_C_check(double theta1, double theta2) {
  if (!(theta2 > 0.0 && theta2 < theta1 && theta1 < 0.5 * kPi))
    throw DomainError("region C check needs 0 < theta2 < theta1 < pi/2");
  return theta2 > kPi / 6.0 && theta2 < kPi / 3.0 && theta1 - theta2 < kPi / 3.0;
}

// ---------------------------------------------------------------------------
// Factorisation of r_ij^3 r_kl^3 (f_ij - f_kl) for s = 3

struct FactorisationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// The bracketed factor, positive on (0, pi/2]^2.
  double bracket = 0.0;
};

inline FactorisationCheck factorisation_identity_check(double tij, double tkl) {
  const double half = 0.5 * kPi;
  if (!(tij > 0.0 && tij <= half && tkl > 0.0 && tkl <= half)) throw DomainError("angles must lie in (0, pi/2]");
  const double rij = 2.0 * std::sin(0.5 * tij), rkl = 2.0 * std::sin(0.5 * tkl);
  const double rij3 = rij * rij * rij, rkl3 = rkl * rkl * rkl;
  FactorisationCheck c;
  c.lhs = std::sin(tij) * rkl3 * (1.0 - rij3) - std::sin(tkl) * rij3 * (1.0 - rkl3);
  const double si = std::sin(0.5 * tij), sk = std::sin(0.5 * tkl);
  c.bracket = 8.0 * si * si * sk * sk * std::cos(0.5 * (tij + tkl)) * std::cos(0.25 * (tkl - tij)) +
              std::sin(0.25 * (tkl + tij)) * (1.0 + std::cos(0.5 * tij) * std::cos(0.5 * tkl));
  c.rhs = 32.0 * si * sk * std::sin(0.25 * (tkl - tij)) * c.bracket;
  return c;
}

// ---------------------------------------------------------------------------
// Damped Newton

struct NewtonOptions {
  int max_iterations = 100;
  int max_halvings = 30;
  double tolerance = 1e-12;
  /// A step that cannot reduce the residual still counts as converged below this.
  double stagnation_tolerance = 1e-10;
};

struct NewtonResult {
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// Newton with step halving on residual increase. Residual evaluations that
/// throw (collisions) count as increases.
inline NewtonResult damped_newton(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                                  const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
                                  Eigen::VectorXd x, const NewtonOptions& opt = {}) {
  NewtonResult out;
  auto norm_at = [&](const Eigen::VectorXd& p) -> std::optional<double> {
    try {
      const Eigen::VectorXd r = residual(p);
      const double v = r.cwiseAbs().maxCoeff();
      if (!std::isfinite(v)) return std::nullopt;
      return v;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto cur = norm_at(x);
  if (!cur) {
    out.x = x;
    out.message = "residual undefined at the seed";
    return out;
  }
  double r = *cur;
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (r < opt.tolerance) {
      out.converged = true;
      break;
    }
    out.iterations = it + 1;
    const Eigen::VectorXd step = jacobian(x).completeOrthogonalDecomposition().solve(residual(x));
    if (!step.allFinite()) {
      out.message = "singular Jacobian";
      break;
    }
    double lambda = 1.0;
    bool improved = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      const Eigen::VectorXd trial = x - lambda * step;
      const auto rt = norm_at(trial);
      if (rt && *rt < r) {
        x = trial;
        r = *rt;
        improved = true;
        break;
      }
    }
    if (!improved) {
      out.converged = r < opt.stagnation_tolerance;
      if (!out.converged) out.message = "step halving failed to reduce the residual";
      break;
    }
  }
  if (!out.converged && r < opt.tolerance) out.converged = true;
  if (!out.converged && out.message.empty()) out.message = "iteration limit reached";
  out.x = x;
  out.residual = r;
  return out;
}

namespace detail {

/// (F m)_i for the given rows.
inline Eigen::VectorXd cc_rows(const std::vector<double>& th, const MassVector& m, const std::vector<std::size_t>& rows,
                               const PotentialExponent& s) {
  Eigen::VectorXd r(Eigen::Index(rows.size()));
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const std::size_t i = rows[q];
    double acc = 0.0;
    for (std::size_t j = 0; j < th.size(); ++j)
      if (j != i) acc += f_value(th[i] - th[j], s) * m[j];
    r[Eigen::Index(q)] = acc;
  }
  return r;
}

/// d(F m)_i / d theta_k for the given rows and all k.
inline Eigen::MatrixXd cc_rows_jacobian(const std::vector<double>& th, const MassVector& m,
                                        const std::vector<std::size_t>& rows, const PotentialExponent& s) {
  const std::size_t n = th.size();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(Eigen::Index(rows.size()), Eigen::Index(n));
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const std::size_t i = rows[q];
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double h = hessian_entry(th[i] - th[k], s);
      j(Eigen::Index(q), Eigen::Index(k)) -= m[k] * h;
      j(Eigen::Index(q), Eigen::Index(i)) += m[k] * h;
    }
  }
  return j;
}

struct FamilyMap {
  std::vector<double> offset;
  Eigen::MatrixXd d;  // d theta / d free
  std::vector<std::size_t> rows;
};

inline FamilyMap family_map(FamilyKind kind) {
  const std::size_t n = family_body_count(kind), k = family_free_count(kind);
  FamilyMap fm;
  fm.offset.assign(n, 0.0);
  fm.d = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(k));
  auto set = [&](std::size_t body, std::size_t free, double c) { fm.d(Eigen::Index(body), Eigen::Index(free)) = c; };
  switch (kind) {
    case FamilyKind::Type2_1p4:
    case FamilyKind::Type2_1p6:
    case FamilyKind::Type2_1p8:
      for (std::size_t i = 0; i < k; ++i) {
        set(i, i, 1.0);
        set(n - 1 - i, i, -1.0);
        fm.rows.push_back(i);
      }
      break;
    case FamilyKind::Type1_1p4:
      fm.offset[2] = kPi;
      set(1, 0, 1.0);
      set(3, 0, -1.0);
      fm.rows = {1};
      break;
    case FamilyKind::Type1_1p6:
      fm.offset[3] = kPi;
      set(1, 0, 1.0);
      set(5, 0, -1.0);
      set(2, 1, 1.0);
      set(4, 1, -1.0);
      fm.rows = {1, 2};
      break;
    case FamilyKind::Sym_1p5:
      set(0, 0, 1.0);
      set(4, 0, -1.0);
      set(1, 1, 1.0);
      set(3, 1, -1.0);
      fm.rows = {0, 1};
      break;
  }
  return fm;
}

inline std::vector<double> family_angles(const FamilyMap& fm, const Eigen::VectorXd& free) {
  std::vector<double> th = fm.offset;
  const Eigen::VectorXd lin = fm.d * free;
  for (std::size_t i = 0; i < th.size(); ++i) th[i] += lin[Eigen::Index(i)];
  return th;
}

inline void check_family_masses(FamilyKind kind, const MassVector& m) {
  if (m.size() != family_body_count(kind)) throw DomainError("mass vector size does not match the family");
  if (!m.positive()) throw DomainError("masses must be positive");
  for (auto [i, j] : family_mirror_pairs(kind))
    if (std::abs(m[i] - m[j]) > 1e-12 * std::max(m[i], m[j]))
      throw DomainError("masses must share the family's mirror symmetry");
}

/// Canonical free angles modulo the reflection theta -> pi - theta of
/// type-2 families, and the relabelling (a, b) -> (b, a) of type2-1+4 when
/// m1 = m2.
inline std::vector<double> canonical_free(FamilyKind kind, std::vector<double> a, const MassVector& m) {
  std::vector<std::vector<double>> variants = {a};
  const bool type2 = kind == FamilyKind::Type2_1p4 || kind == FamilyKind::Type2_1p6 || kind == FamilyKind::Type2_1p8;
  if (type2) {
    std::vector<double> r = a;
    for (double& t : r) t = kPi - t;
    variants.push_back(r);
  }
  if (kind == FamilyKind::Type2_1p4 && std::abs(m[0] - m[1]) <= 1e-12 * std::max(m[0], m[1])) {
    const std::size_t cnt = variants.size();
    for (std::size_t q = 0; q < cnt; ++q) variants.push_back({variants[q][1], variants[q][0]});
  }
  return *std::min_element(variants.begin(), variants.end());
}

}  // namespace detail

struct FamilySolution {
  std::vector<double> free_angles;
  std::vector<double> thetas;
  double residual = 0.0;
  int iterations = 0;
  std::size_t seed_index = 0;
};

struct SeedFailure {
  std::size_t seed_index = 0;
  std::string message;
};

struct FamilySolveResult {
  std::vector<FamilySolution> solutions;
  std::vector<SeedFailure> failures;
};

/// Damped Newton on the independent rows of F m = 0 restricted to the
/// family, from every seed. Converged solutions whose free angles stay in
/// (0, pi) (and keep 0 < theta2 < theta1 for sym-1+5) are deduplicated
/// within 1e-8 modulo the family symmetries, in seed order.
inline FamilySolveResult solve_symmetric_family(FamilyKind kind, const MassVector& m,
                                                const std::vector<std::vector<double>>& seeds,
                                                const PotentialExponent& s, unsigned threads = 1,
                                                const NewtonOptions& opt = {}) {
  detail::check_family_masses(kind, m);
  const detail::FamilyMap fm = detail::family_map(kind);
  const std::size_t k = family_free_count(kind);

  std::vector<std::optional<FamilySolution>> sol(seeds.size());
  std::vector<std::string> msg(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t idx) {
    if (seeds[idx].size() != k) {
      msg[idx] = "seed has the wrong number of free angles";
      return;
    }
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(seeds[idx].data(), Eigen::Index(k));
    auto res = [&](const Eigen::VectorXd& x) { return detail::cc_rows(detail::family_angles(fm, x), m, fm.rows, s); };
    auto jac = [&](const Eigen::VectorXd& x) {
      return Eigen::MatrixXd(detail::cc_rows_jacobian(detail::family_angles(fm, x), m, fm.rows, s) * fm.d);
    };
    const NewtonResult r = damped_newton(res, jac, x0, opt);
    if (!r.converged) {
      msg[idx] = r.message;
      return;
    }
    std::vector<double> a(r.x.data(), r.x.data() + r.x.size());
    for (double t : a)
      if (!(t > 0.0 && t < kPi)) {
        msg[idx] = "solution left the family parameter range";
        return;
      }
    try {
      const RingConfiguration cfg = expand_family({kind, a}, s);
      (void)cfg;
    } catch (const Error& e) {
      msg[idx] = e.what();
      return;
    }
    FamilySolution fs;
    fs.free_angles = a;
    fs.thetas = detail::family_angles(fm, r.x);
    fs.residual = r.residual;
    fs.iterations = r.iterations;
    fs.seed_index = idx;
    sol[idx] = std::move(fs);
  });

  FamilySolveResult out;
  std::vector<std::vector<double>> canon;
  for (std::size_t idx = 0; idx < seeds.size(); ++idx) {
    if (!sol[idx]) {
      out.failures.push_back({idx, msg[idx]});
      continue;
    }
    const auto c = detail::canonical_free(kind, sol[idx]->free_angles, m);
    bool dup = false;
    for (const auto& prev : canon) {
      double d = 0.0;
      for (std::size_t q = 0; q < c.size(); ++q) d = std::max(d, std::abs(c[q] - prev[q]));
      if (d < 1e-8) dup = true;
    }
    if (dup) continue;
    canon.push_back(c);
    out.solutions.push_back(std::move(*sol[idx]));
  }
  return out;
}

inline FamilySolveResult solve_symmetric_family(FamilyKind kind, const MassVector& m,
                                                const std::vector<std::vector<double>>& seeds, double s = 3.0,
                                                unsigned threads = 1) {
  return solve_symmetric_family(kind, m, seeds, PotentialExponent(s), threads);
}

/// Unrestricted solve of F m = 0 with theta_0 held fixed (the rotation
/// gauge): rows 1..N-1 in the unknowns theta_1..theta_{N-1}.
struct CentralConfigurationSolve {
  std::vector<double> thetas;
  NewtonResult newton;
};

inline CentralConfigurationSolve solve_central_configuration(const MassVector& m, const std::vector<double>& seed,
                                                             const PotentialExponent& s, const NewtonOptions& opt = {}) {
  if (seed.size() != m.size() || seed.size() < 3) throw DomainError("seed and mass vector need matching size >= 3");
  if (!m.positive()) throw DomainError("masses must be positive");
  const std::size_t n = seed.size();
  std::vector<std::size_t> rows;
  for (std::size_t i = 1; i < n; ++i) rows.push_back(i);
  auto full = [&](const Eigen::VectorXd& x) {
    std::vector<double> th(n);
    th[0] = seed[0];
    for (std::size_t i = 1; i < n; ++i) th[i] = x[Eigen::Index(i - 1)];
    return th;
  };
  auto res = [&](const Eigen::VectorXd& x) { return detail::cc_rows(full(x), m, rows, s); };
  auto jac = [&](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd j = detail::cc_rows_jacobian(full(x), m, rows, s);
    return Eigen::MatrixXd(j.rightCols(Eigen::Index(n - 1)));
  };
  Eigen::VectorXd x0(Eigen::Index(n - 1));
  for (std::size_t i = 1; i < n; ++i) x0[Eigen::Index(i - 1)] = seed[i];
  CentralConfigurationSolve out;
  out.newton = damped_newton(res, jac, x0, opt);
  out.thetas = full(out.newton.x);
  return out;
}

inline CentralConfigurationSolve solve_central_configuration(const MassVector& m, const std::vector<double>& seed,
                                                             double s = 3.0) {
  return solve_central_configuration(m, seed, PotentialExponent(s));
}

}  // namespace coorbital
