// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "coorbital/coorbital.hpp"
#include "test_support.hpp"

using namespace coorbital;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

struct Run {
  int code = -1;
  std::string out;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Run cli(const std::string& args) {
  const std::string cmd = std::string(COORBITAL_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const json* assertion(const json& rep, const std::string& name) {
  for (const auto& a : rep["assertions"])
    if (a["name"] == name) return &a;
  return nullptr;
}

bool passed(const json& rep, const std::string& name) {
  const json* a = assertion(rep, name);
  return a && (*a)["passed"].get<bool>();
}

bool enclosure_within(const json& rep, const std::string& name, double lo, double hi) {
  const json* a = assertion(rep, name);
  if (!a || (*a)["enclosure"].is_null()) return false;
  return (*a)["enclosure"]["lo"].get<double>() >= lo && (*a)["enclosure"]["hi"].get<double>() <= hi;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome four_body_certificate() {
  Outcome o;
  const Run r = cli("certify thm1");
  o.require(r.code == 0, "exit code " + std::to_string(r.code));
  if (r.code != 0 && r.out.empty()) return o;
  const json j = json::parse(r.out);
  o.require(enclosure_within(j, "theta2_root", 1.9355, 1.9365), "theta2 enclosure outside [1.9355, 1.9365]");
  o.require(passed(j, "f12_equals_minus_f13"), "f12 = -f13 not certified");
  o.require(enclosure_within(j, "f12_value", -0.536 - 0.001, -0.536 + 0.001), "f12 outside -0.536 +- 0.001");
  o.require(enclosure_within(j, "f23_value", -0.565 - 0.001, -0.565 + 0.001), "f23 outside -0.565 +- 0.001");
  bool positive = j["masses"].size() == 4;
  for (const auto& m : j["masses"]) positive = positive && m["lo"].get<double>() > 0.0;
  o.require(positive, "masses not certified positive");
  o.require(passed(j, "asymmetric_masses"), "mass asymmetry not certified");
  return o;
}

Outcome six_and_eight_body_certificates() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const Run r6 = cli("certify thm4n6");
  o.require(seconds_since(t0) < 60.0, "thm4n6 over 60 s");
  o.require(r6.code == 0, "thm4n6 exit code " + std::to_string(r6.code));
  if (!r6.out.empty()) {
    const json j = json::parse(r6.out);
    o.require(passed(j, "pfaffian_sign_change"), "n=6 sign change not certified");
    const double lo = 4 * kPi / 5, hi = 13 * kPi / 16;
    o.require(enclosure_within(j, "theta3_root", std::max(lo, 2.5349 - 5e-4), std::min(hi, 2.5349 + 5e-4)),
              "n=6 theta3 enclosure not within 2.5349 +- 5e-4 inside (4pi/5, 13pi/16)");
  }
  t0 = std::chrono::steady_clock::now();
  const Run r8 = cli("certify thm4n8");
  o.require(seconds_since(t0) < 60.0, "thm4n8 over 60 s");
  o.require(r8.code == 0, "thm4n8 exit code " + std::to_string(r8.code));
  if (!r8.out.empty()) {
    const json j = json::parse(r8.out);
    o.require(passed(j, "pfaffian_sign_change"), "n=8 sign change over the box not certified");
    o.require(passed(j, "positive_kernel_vector"), "n=8 positive mass vector not certified");
    o.require(passed(j, "asymmetric_masses"), "n=8 asymmetry not certified");
  }
  return o;
}

std::vector<double> brute_force_roots(double theta2, double m1) {
  constexpr int kSamples = 100000;
  auto g = [&](double t) {
    const long double a = 2.0L * std::abs(std::sin(0.5L * t));
    const long double b = 2.0L * std::abs(std::sin(0.5L * (t - theta2)));
    return double(m1 * std::sin((long double)t) * (1.0L / (a * a * a) - 1.0L) +
                  (1.0L - m1) * std::sin((long double)t - theta2) * (1.0L / (b * b * b) - 1.0L));
  };
  std::vector<double> roots;
  const double h = kTwoPi / kSamples;
  std::vector<double> samples(kSamples);
  for (int k = 0; k < kSamples; ++k) samples[std::size_t(k)] = g((k + 0.5) * h);
  for (int k = 0; k + 1 < kSamples; ++k) {
    double a = (k + 0.5) * h, b = (k + 1.5) * h;
    if (std::abs(a - theta2) < 2 * h || std::abs(b - theta2) < 2 * h) continue;
    double ga = samples[std::size_t(k)];
    if ((ga < 0) == (samples[std::size_t(k + 1)] < 0)) continue;
    while (b - a > 1e-15 * std::max(1.0, a)) {
      const double c = 0.5 * (a + b);
      if (c <= a || c >= b) break;
      const double gc = g(c);
      if ((gc < 0) == (ga < 0)) {
        a = c;
        ga = gc;
      } else {
        b = c;
      }
    }
    const double root = 0.5 * (a + b);
    if (std::abs(g(root)) < 1e-6) roots.push_back(root);
  }
  return roots;
}

Outcome one_plus_two_plus_one_counts() {
  Outcome o;
  for (double m1 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    std::size_t total = 0;
    for (CaseLabel c : {CaseLabel::equilateral_plus, CaseLabel::equilateral_minus, CaseLabel::collinear}) {
      const RootList r = solve_1p2p1(m1, c, 3.0);
      const std::size_t want = c == CaseLabel::collinear ? 2 : 4;
      const std::string where = std::string(to_string(c)) + " m1=" + fmt(m1);
      o.require(r.roots.size() == want, where + ": " + std::to_string(r.roots.size()) + " roots");
      o.require(std::all_of(r.per_interval_counts.begin(), r.per_interval_counts.end(), [](int n) { return n == 1; }),
                where + ": not one root per interval");
      const auto oracle = brute_force_roots(case_theta2(c), m1);
      o.require(oracle.size() == r.roots.size(), where + ": oracle found " + std::to_string(oracle.size()));
      if (oracle.size() == r.roots.size())
        for (std::size_t k = 0; k < oracle.size(); ++k)
          o.require(std::abs(oracle[k] - r.roots[k]) <= 1e-8, where + ": root differs from oracle");
      total += r.roots.size();
    }
    o.require(total == 10, "total " + std::to_string(total) + " at m1=" + fmt(m1));
  }
  return o;
}

Outcome inertia_property() {
  Outcome o;
  std::mt19937_64 rng(101);
  int mismatches = 0;
  double worst_row = 0.0;
  for (std::size_t n = 3; n <= 8; ++n)
    for (int k = 0; k < 500; ++k) {
      const auto th = test::random_angles(rng, n);
      const auto m = test::random_masses(rng, n);
      const Eigen::MatrixXd h = hessian(RingConfiguration(th, 3.0), MassVector(m));
      if (!(inertia(h, 1e-8) == inertia_of_mass_weighted(h, MassVector(m), 1e-8))) ++mismatches;
      worst_row = std::max(worst_row, (h * Eigen::VectorXd::Ones(Eigen::Index(n))).cwiseAbs().maxCoeff());
    }
  o.require(mismatches == 0, std::to_string(mismatches) + " inertia mismatches");
  o.require(worst_row < 1e-12, "row sum " + fmt(worst_row));
  return o;
}

Outcome derivative_oracles() {
  Outcome o;
  std::mt19937_64 rng(202);
  double worst_g = 0.0, worst_h = 0.0;
  for (double s : {2.0, 2.5, 3.0})
    for (int k = 0; k < 200; ++k) {
      const std::size_t n = 3 + std::size_t(k % 4);
      const auto th = test::random_angles(rng, n);
      const auto m = test::random_masses(rng, n);
      const RingConfiguration c(th, s);
      const Eigen::VectorXd g = potential_gradient(c, MassVector(m));
      const auto fg = test::fd_gradient(th, m, s, 1e-6);
      const double gs = std::max(1.0, g.cwiseAbs().maxCoeff());
      for (std::size_t i = 0; i < n; ++i) worst_g = std::max(worst_g, std::abs(g[Eigen::Index(i)] - fg[i]) / gs);
      const Eigen::MatrixXd h = hessian(c, MassVector(m));
      const Eigen::MatrixXd fh = test::fd_hessian(th, m, s, 1e-4);
      worst_h = std::max(worst_h, (h - fh).cwiseAbs().maxCoeff() / std::max(1.0, h.cwiseAbs().maxCoeff()));
    }
  o.require(worst_g < 1e-5, "gradient relative error " + fmt(worst_g));
  o.require(worst_h < 1e-4, "Hessian relative error " + fmt(worst_h));
  return o;
}

Outcome type_one_kernel_structure() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.15, kPi - 0.15);
  int done = 0;
  double worst_det = 0.0, worst_dir = 0.0;
  int bad_dim = 0;
  while (done < 200) {
    const double a = u(rng);
    if (std::abs(a - kPi / 2) < 0.02 || std::abs(a - kPi / 3) < 0.02 || std::abs(a - 2 * kPi / 3) < 0.02) continue;
    const CoorbitalMatrix f = build_F(expand_family({FamilyKind::Type1_1p4, {a}}, 3.0));
    const Eigen::MatrixXd& e = f.entries;
    const double det = std::abs(e.determinant());
    worst_det = std::max(worst_det, det / std::pow(e.norm(), 4));
    const KernelBasis kb = mass_kernel(f);
    if (kb.dimension() != 2) {
      ++bad_dim;
    } else {
      Eigen::VectorXd v1(4), v2(4);
      v1 << e(1, 2), 0, e(0, 1), 0;
      v2 << 0, e(1, 2), -e(1, 3), e(1, 2);
      for (Eigen::VectorXd v : {v1, v2}) {
        v.normalize();
        const Eigen::VectorXd p = kb.vectors[0].dot(v) * kb.vectors[0] + kb.vectors[1].dot(v) * kb.vectors[1];
        worst_dir = std::max(worst_dir, (p - v).norm());
      }
    }
    ++done;
  }
  o.require(worst_det <= 1e-10, "|det F| / ||F||^4 up to " + fmt(worst_det));
  o.require(bad_dim == 0, std::to_string(bad_dim) + " kernels not two-dimensional");
  o.require(worst_dir <= 1e-8, "basis direction distance " + fmt(worst_dir));
  return o;
}

std::vector<double> unwrap_descending(std::vector<double> t) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    while (t[i] > t[0]) t[i] -= kTwoPi;
    while (t[i] < t[0] - kTwoPi) t[i] += kTwoPi;
  }
  return t;
}

bool convex_descending(const std::vector<double>& t) {
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!(t[i] > t[i + 1])) return false;
  return t.front() - t.back() <= kPi;
}

std::vector<double> convex_seed(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double span = kPi / 3 + u(rng) * (0.9 * kPi - kPi / 3);
  std::vector<double> cuts(n - 2);
  for (double& c : cuts) c = u(rng) * span;
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> th(n);
  th[0] = span / 2;
  for (std::size_t i = 0; i + 2 < n; ++i) th[i + 1] = span / 2 - cuts[i];
  th[n - 1] = -span / 2;
  return th;
}

Outcome symmetric_mass_symmetry() {
  Outcome o;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> um(0.1, 1.0);
  constexpr int kSeedsPerMass = 4;

  int found4 = 0, asym4 = 0, outside_b = 0;
  double worst4 = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = um(rng), b = um(rng);
    const MassVector m{a, b, b, a};
    for (int k = 0; k < kSeedsPerMass; ++k) {
      const auto sol = solve_central_configuration(m, convex_seed(rng, 4), 3.0);
      if (!sol.newton.converged) continue;
      const auto t = unwrap_descending(sol.thetas);
      if (!convex_descending(t)) continue;
      ++found4;
      const double d = std::abs((t[0] - t[1]) - (t[2] - t[3]));
      worst4 = std::max(worst4, d);
      if (d >= 1e-8) ++asym4;
      if (!region_B_check(RingConfiguration(t, 3.0))) ++outside_b;
    }
  }

  int found5 = 0, asym5 = 0, outside_c = 0;
  double worst5 = 0.0, min_theta2 = kPi;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = um(rng), b = um(rng), c = um(rng);
    const MassVector m{a, b, c, b, a};
    for (int k = 0; k < kSeedsPerMass; ++k) {
      const auto sol = solve_central_configuration(m, convex_seed(rng, 5), 3.0);
      if (!sol.newton.converged) continue;
      const auto t = unwrap_descending(sol.thetas);
      if (!convex_descending(t)) continue;
      ++found5;
      const double d = std::abs((t[3] - t[4]) - (t[0] - t[1])) + std::abs((t[2] - t[3]) - (t[1] - t[2]));
      worst5 = std::max(worst5, d);
      if (d >= 1e-7) ++asym5;
      const double t1 = t[0] - t[2], t2 = t[1] - t[2];
      if (t1 < kPi / 2) {
        min_theta2 = std::min(min_theta2, t2);
        if (!region_C_check(t1, t2)) ++outside_c;
      }
    }
  }

  o.require(found4 >= 50, "only " + std::to_string(found4) + " convex 1+4 solutions");
  o.require(asym4 == 0, std::to_string(asym4) + " asymmetric 1+4 solutions (worst " + fmt(worst4) + ")");
  o.require(outside_b == 0, std::to_string(outside_b) + " convex 1+4 solutions outside the four-body gap region");
  o.require(found5 >= 50, "only " + std::to_string(found5) + " convex 1+5 solutions");
  o.require(asym5 == 0, std::to_string(asym5) + " asymmetric 1+5 solutions (worst " + fmt(worst5) + ")");
  o.require(outside_c == 0, std::to_string(outside_c) + " of " + std::to_string(found5) +
                                " convex 1+5 solutions outside pi/6 < theta2 < pi/3 (smallest theta2 " +
                                fmt(min_theta2) + ")");
  if (o.pass)
    o.detail = std::to_string(found4) + " + " + std::to_string(found5) + " convex solutions, worst defects " +
               fmt(worst4) + ", " + fmt(worst5);
  return o;
}

Outcome five_body_hessian_blocks() {
  Outcome o;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0), um(0.1, 1.0);
  int n = 0, bad_det = 0, bad_trace = 0;
  while (n < 1000) {
    const double t2 = kPi / 6 + u(rng) * kPi / 6;
    const double t1 = t2 + u(rng) * kPi / 3;
    if (!(t1 < kPi / 2) || t1 - t2 < 1e-9) continue;
    const double m1 = um(rng), m2 = um(rng), m3 = um(rng);
    if (!(sym5_det_h1(t1, t2, m1, m2, m3, PotentialExponent(3.0)) > 0.0)) ++bad_det;
    if (!(sym5_blocks(t1, t2, m1, m2, m3, 3.0).H1.trace() < 0.0)) ++bad_trace;
    ++n;
  }
  o.require(bad_det == 0, std::to_string(bad_det) + " samples with det(H1) <= 0");
  o.require(bad_trace == 0, std::to_string(bad_trace) + " samples with trace(H1) >= 0");

  const Run r = cli("certify thm5 --sampling equal --grid 32");
  o.require(r.code == 0, "certify thm5 exit code " + std::to_string(r.code));
  if (!r.out.empty()) {
    const json j = json::parse(r.out);
    const auto boxes = j["det_sign_change_boxes"].get<std::size_t>();
    const double cov = j["certified_fraction"].get<double>();
    o.require(boxes == 0, std::to_string(boxes) + " boxes with a det(H2) sign change");
    o.require(cov > 0.9, "certified coverage " + fmt(cov));
    if (o.pass) o.detail = "coverage " + fmt(cov);
  }
  return o;
}

struct Curves {
  std::map<int, std::vector<std::array<double, 2>>> by_id;
};

Curves read_csv(const std::string& text) {
  Curves c;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string tag, id, x, y;
    std::getline(row, tag, ',');
    std::getline(row, id, ',');
    std::getline(row, x, ',');
    std::getline(row, y, ',');
    c.by_id[std::stoi(id)].push_back({std::stod(x), std::stod(y)});
  }
  return c;
}

Outcome figure_traces() {
  Outcome o;
  const std::string header = "tag,curve_id,theta1,theta2\n";
  std::map<std::string, std::array<std::size_t, 2>> counts;
  for (const char* spec : {"pfaffian type2-1p4", "z1 sym-1p5", "z2 sym-1p5", "z3 sym-1p5"}) {
    std::istringstream is(spec);
    std::string tag, fam;
    is >> tag >> fam;
    for (int gi = 0; gi < 2; ++gi) {
      const int grid = gi == 0 ? 256 : 512;
      const Run r = cli("trace --tag " + tag + " --family " + fam + " --grid " + std::to_string(grid));
      o.require(r.code == 0 && r.out.rfind(header, 0) == 0, tag + " grid " + std::to_string(grid) + " failed");
      const Curves c = read_csv(r.out);
      counts[tag][std::size_t(gi)] = c.by_id.size();
      if (tag == "pfaffian" && grid == 512) {
        double best = 1e9;
        for (const auto& [id, pts] : c.by_id)
          for (const auto& p : pts) best = std::min(best, std::hypot(p[0] - 3 * kPi / 4, p[1] - kPi / 4));
        const double cell = (kPi - 0.04) / 512;
        o.require(best <= 2 * cell, "closest Pfaffian point to the square is " + fmt(best) + " away");
      }
    }
    o.require(counts[tag][0] > 0, tag + " produced no curves");
    o.require(counts[tag][0] == counts[tag][1], tag + " curve count changes under grid doubling (" +
                                                     std::to_string(counts[tag][0]) + " vs " +
                                                     std::to_string(counts[tag][1]) + ")");
  }
  if (o.pass) {
    std::string d;
    for (const auto& [tag, n] : counts) d += (d.empty() ? "" : ", ") + tag + " " + std::to_string(n[1]);
    o.detail = "curves: " + d;
  }
  return o;
}

Outcome distance_form_equivalence() {
  Outcome o;
  const MassVector m{1.0, 0.7, 0.4};
  const PotentialExponent s(3.0);
  constexpr int kGrid = 200;
  int nodes = 0, sign_mismatch = 0;
  double worst_identity = 0.0;
  std::vector<std::array<double, 2>> seeds;
  for (int i = 1; i < kGrid; ++i)
    for (int j = 1; j < kGrid; ++j) {
      const double a = kTwoPi * i / kGrid, b = a + (kTwoPi - a) * j / kGrid;
      if (b - a < 1e-3 || kTwoPi - b < 1e-3) continue;
      const RingConfiguration c({0.0, a, b}, s);
      const auto d = distances_from_config(c);
      const double b13 = detail::e_bracket(d(0, 2), d(0, 1), d(1, 2));
      if (std::abs(b13) < 1e-6) continue;
      const auto g = potential_gradient(c, m);
      const auto r = n3_eliminated_residuals(d(0, 1), d(1, 2), d(0, 2), m, s);
      const double ca = std::cos(a / 2), cb = std::cos((b - a) / 2);
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      worst_identity = std::max({worst_identity, std::abs(g[1] - (r[0] * ca - r[1] * cb)) / scale,
                                 std::abs(g[2] - r[1] * cb) / scale});
      // Zero loci: the last angular component and the last distance residual
      // share their sign up to the sign of the chart factor.
      if (std::abs(g[2]) > 1e-9 * scale && std::abs(cb) > 1e-9 && ((g[2] > 0) != ((r[1] * cb) > 0))) ++sign_mismatch;
      if (i % 20 == 0 && j % 20 == 0) seeds.push_back({a, b});
      ++nodes;
    }
  o.require(worst_identity < 1e-9, "chain-rule identity error " + fmt(worst_identity));
  o.require(sign_mismatch == 0, std::to_string(sign_mismatch) + " sign mismatches");

  // Angular solutions are zeros of the distance residuals.
  int solutions = 0;
  double worst_res = 0.0;
  for (const auto& sd : seeds) {
    const auto sol = solve_central_configuration(m, {0.0, sd[0], sd[1]}, s);
    if (!sol.newton.converged) continue;
    const RingConfiguration c(sol.thetas, s);
    const auto d = distances_from_config(c);
    if (std::abs(detail::e_bracket(d(0, 2), d(0, 1), d(1, 2))) < 1e-6) continue;
    const auto r = n3_eliminated_residuals(d(0, 1), d(1, 2), d(0, 2), m, s);
    worst_res = std::max({worst_res, std::abs(r[0]), std::abs(r[1])});
    ++solutions;
  }
  o.require(solutions > 0, "no angular solutions found");
  o.require(worst_res < 1e-9, "distance residual at angular solutions " + fmt(worst_res));

  std::mt19937_64 rng(606);
  double worst_e = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto th = test::random_angles(rng, 3 + std::size_t(k % 6), 0.05);
    worst_e = std::max(worst_e, concyclicity_residual(distances_from_config(RingConfiguration(th, 3.0))));
  }
  o.require(worst_e < 1e-10, "E residual " + fmt(worst_e));
  if (o.pass)
    o.detail = std::to_string(nodes) + " grid nodes, " + std::to_string(solutions) + " solutions, max E " + fmt(worst_e);
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "four-body symmetric configuration with asymmetric masses", 5.0, four_body_certificate},
      {2, "six- and eight-body Pfaffian zeros with asymmetric masses", 120.0, six_and_eight_body_certificates},
      {3, "restricted 1+2+1 root counts", 2.0, one_plus_two_plus_one_counts},
      {4, "inertia of mass-weighted Hessian", 30.0, inertia_property},
      {5, "gradient and Hessian finite-difference oracles", 10.0, derivative_oracles},
      {6, "type-1 four-body kernel structure", 10.0, type_one_kernel_structure},
      {7, "symmetric masses force symmetric convex configurations", 60.0, symmetric_mass_symmetry},
      {8, "five-body Hessian block signs and det(H2) coverage", 120.0, five_body_hessian_blocks},
      {9, "zero-curve traces", 60.0, figure_traces},
      {10, "distance-form equivalence for three bodies", 60.0, distance_form_equivalence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = seconds_since(t0);
    o.require(secs < c.limit_seconds, "runtime " + fmt(secs) + " s over the " + fmt(c.limit_seconds) + " s limit");
    if (!o.pass) ++failures;
    std::printf("%s %2d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
