// Command-line front end. Exit codes: 0 success, 1 certification failure,
// 2 usage or invalid input, 3 collision.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cli_support.hpp"

namespace {

using namespace coorbital;
using cli::Json;

constexpr int kExitOk = 0;
constexpr int kExitCertification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCollision = 3;

struct Globals {
  double s = 3.0;
  double tol = kDefaultKernelTolerance;
  int grid = 0;
  std::string out;
  std::string format;
  unsigned threads = 1;
};

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_output(const Globals& g, const std::string& text, cli::RunManifest manifest) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw DomainError("cannot open output file '" + g.out + "'");
  f << text;
  manifest.timestamp = utc_timestamp();
  std::ofstream side(g.out + ".manifest.json", std::ios::binary);
  side << cli::to_text(manifest.full());
}

void emit_json(const Globals& g, Json body, const cli::RunManifest& manifest) {
  if (!g.format.empty() && g.format != "json")
    throw DomainError("format '" + g.format + "' is not available for " + manifest.command);
  Json doc{{"manifest", manifest.embedded()}};
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  write_output(g, cli::to_text(doc), manifest);
}

Json bound(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json kernel_json(const KernelBasis& k) {
  Json vecs = Json::array();
  for (const auto& v : k.vectors) vecs.push_back(cli::to_json(v));
  return Json{{"tolerance", k.tolerance},
              {"dimension", k.dimension()},
              {"singular_values", k.singular_values},
              {"basis", vecs}};
}

Json region_json(const PositiveMassRegion& r) {
  Json ivs = Json::array();
  for (const auto& iv : r.intervals) ivs.push_back(Json{{"sign", iv.sign}, {"alpha_lo", bound(iv.lo)}, {"alpha_hi", bound(iv.hi)}});
  return Json{{"dimension", r.dimension},
              {"empty", r.empty},
              {"alpha_intervals", ivs},
              {"representative", r.representative ? cli::to_json(*r.representative) : Json(nullptr)}};
}

std::vector<double> reduced(const RingConfiguration& c) { return {c.thetas().begin(), c.thetas().end()}; }

std::vector<std::vector<double>> parse_seed_list(const std::string& text) {
  std::vector<std::vector<double>> seeds;
  for (const auto& part : cli::split(text, ';'))
    if (!part.empty()) seeds.push_back(cli::parse_angle_list(part));
  return seeds;
}

std::vector<std::vector<double>> random_seeds(FamilyKind kind, int count, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> u(0.05, kPi - 0.05);
  std::vector<std::vector<double>> seeds;
  const std::size_t k = family_free_count(kind);
  for (int i = 0; i < count; ++i) {
    std::vector<double> a(k);
    for (double& t : a) t = u(rng);
    if (kind == FamilyKind::Sym_1p5) {
      // Seeds inside the convex region: pi/6 < b < pi/3, b < a < min(b + pi/3, pi/2).
      std::uniform_real_distribution<double> v(0.0, 1.0);
      const double b = kPi / 6.0 + v(rng) * kPi / 6.0;
      a = {b + v(rng) * (std::min(b + kPi / 3.0, kPi / 2.0) - b), b};
    }
    seeds.push_back(a);
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coorbital central configurations: F matrices, stability, solvers and interval certificates"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--s", g.s, "Potential exponent (s = 2: vortex case)")->capture_default_str();
  app.add_option("--tol", g.tol, "Relative singular-value tolerance for kernels")->capture_default_str();
  app.add_option("--grid", g.grid, "Grid resolution (trace: cells per side, certify thm5: initial boxes per side)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "json or csv (csv: trace only)")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();

  std::string thetas, masses, family, angles, tag, window, case_label = "all", seeds, target, sampling = "equal";
  double m1 = 0.5, theta1 = 0, theta2 = 0, alpha = -2.5, min_coverage = 0.9;
  std::string theta1_text, theta2_text;
  int random_count = 100, depth = -1, simplex_res = 5;
  std::uint64_t rng_seed = 1;
  std::size_t max_boxes = 2'000'000;
  bool alpha_symmetric = false;

  auto* fmatrix = app.add_subcommand("fmatrix", "F matrix, singular values and kernel basis");
  fmatrix->add_option("--thetas", thetas, "Comma-separated angles (radians or k*pi/n)")->required();

  auto* masses_cmd = app.add_subcommand("masses", "Kernel of F and its positive-mass region");
  masses_cmd->add_option("--thetas", thetas)->required();

  auto* pf = app.add_subcommand("pfaffian", "Pfaffian of F");
  pf->add_option("--thetas", thetas);
  pf->add_option("--family", family);
  pf->add_option("--angles", angles, "Free angles of the family");

  auto* stab = app.add_subcommand("stability", "Hessian inertia and linearisation counts");
  stab->add_option("--thetas", thetas)->required();
  stab->add_option("--masses", masses)->required();

  auto* p121 = app.add_subcommand("solve-1p2p1", "Roots of the restricted 1+2+1 problem");
  p121->add_option("--m1", m1)->required();
  p121->add_option("--case", case_label)->check(CLI::IsMember({"all", "equilateral+", "equilateral-", "collinear"}));

  auto* trace = app.add_subcommand("trace", "Marching-squares zero curves (CSV)");
  trace->add_option("--tag", tag)->required()->check(CLI::IsMember({"pfaffian", "z1", "z2", "z3"}));
  trace->add_option("--family", family)->required();
  trace->add_option("--window", window, "x0,x1,y0,y1 (default 0.02,pi-0.02,0.02,pi-0.02)");

  auto* fam = app.add_subcommand("solve-family", "Damped Newton solves of a symmetric family");
  fam->add_option("--family", family)->required();
  fam->add_option("--masses", masses)->required();
  fam->add_option("--seeds", seeds, "Seeds as 'a,b;c,d'");
  fam->add_option("--random-seeds", random_count)->capture_default_str();
  fam->add_option("--rng-seed", rng_seed)->capture_default_str();

  auto* region = app.add_subcommand("region-check", "Convex-region membership tests");
  region->add_option("--thetas", thetas, "Four ordered 1+4 angles");
  region->add_option("--theta1", theta1_text);
  region->add_option("--theta2", theta2_text);

  auto* cert = app.add_subcommand("certify", "Interval-arithmetic certificates");
  cert->add_option("target", target)->required()->check(CLI::IsMember({"thm1", "thm4n6", "thm4n8", "thm5"}));
  cert->add_option("--alpha", alpha, "thm1: mass mixing parameter")->capture_default_str();
  cert->add_flag("--alpha-symmetric", alpha_symmetric, "thm1: use alpha = 2/f23");
  cert->add_option("--theta1", theta1_text, "thm1: theta1 (default pi/6)");
  cert->add_option("--depth", depth, "Bisection depth (thm1/thm4) or quadtree depth (thm5)");
  cert->add_option("--sampling", sampling, "thm5 mass sampling")->check(CLI::IsMember({"equal", "simplex", "kernel"}));
  cert->add_option("--simplex-resolution", simplex_res)->capture_default_str();
  cert->add_option("--max-boxes", max_boxes)->capture_default_str();
  cert->add_option("--min-coverage", min_coverage)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const PotentialExponent s(g.s);
    cli::RunManifest manifest;
    manifest.parameters["s"] = g.s;

    if (*fmatrix || *masses_cmd) {
      const RingConfiguration cfg(cli::parse_angle_list(thetas), s);
      const CoorbitalMatrix f = build_F(cfg);
      const KernelBasis k = mass_kernel(f, g.tol);
      manifest.parameters["thetas"] = thetas;
      manifest.parameters["tol"] = g.tol;
      if (*fmatrix) {
        manifest.command = "fmatrix";
        Json body{{"s", g.s}, {"thetas", reduced(cfg)}, {"F", cli::to_json(f.entries)}};
        body["pfaffian"] = cfg.size() % 2 == 0 ? Json(pfaffian(f)) : Json(nullptr);
        body["singular_values"] = k.singular_values;
        body["kernel"] = kernel_json(k);
        emit_json(g, body, manifest);
      } else {
        manifest.command = "masses";
        Json body{{"s", g.s}, {"thetas", reduced(cfg)}, {"kernel", kernel_json(k)}};
        if (k.dimension() <= 2)
          body["positive_region"] = region_json(positive_mass_region(k));
        else
          body["positive_region"] = Json(nullptr);
        emit_json(g, body, manifest);
      }
      return kExitOk;
    }

    if (*pf) {
      manifest.command = "pfaffian";
      Json body{{"s", g.s}};
      if (!family.empty()) {
        const SymmetricFamily sf{parse_family(family), cli::parse_angle_list(angles)};
        manifest.parameters["family"] = std::string(family_name(sf.kind));
        manifest.parameters["angles"] = angles;
        const RingConfiguration cfg = expand_family(sf, s);
        body["family"] = std::string(family_name(sf.kind));
        body["thetas"] = reduced(cfg);
        body["pfaffian"] = pfaffian_on_family(sf, s);
      } else {
        if (thetas.empty()) throw DomainError("pfaffian needs --thetas or --family with --angles");
        manifest.parameters["thetas"] = thetas;
        const RingConfiguration cfg(cli::parse_angle_list(thetas), s);
        body["thetas"] = reduced(cfg);
        body["pfaffian"] = pfaffian(build_F(cfg));
      }
      emit_json(g, body, manifest);
      return kExitOk;
    }

    if (*stab) {
      manifest.command = "stability";
      manifest.parameters["thetas"] = thetas;
      manifest.parameters["masses"] = masses;
      const RingConfiguration cfg(cli::parse_angle_list(thetas), s);
      const MassVector m(cli::parse_number_list(masses, "mass"));
      check_sizes(cfg, m);
      if (!m.positive()) throw DomainError("all masses must be positive");
      Json body{{"s", g.s}, {"thetas", reduced(cfg)}, {"masses", std::vector<double>(m.values().begin(), m.values().end())}};
      body["report"] = cli::to_json(stability_report(cfg, m));
      emit_json(g, body, manifest);
      return kExitOk;
    }

    if (*p121) {
      manifest.command = "solve-1p2p1";
      manifest.parameters["m1"] = m1;
      manifest.parameters["case"] = case_label;
      std::vector<CaseLabel> cases;
      if (case_label == "all")
        cases = {CaseLabel::equilateral_plus, CaseLabel::equilateral_minus, CaseLabel::collinear};
      else
        cases = {parse_case_label(case_label)};
      Json list = Json::array();
      std::size_t total = 0;
      bool outside = false;
      for (CaseLabel c : cases) {
        const RootList r = solve_1p2p1(m1, c, s);
        Json ivs = Json::array(), res = Json::array();
        for (const auto& [lo, hi] : r.intervals) ivs.push_back(Json{lo, hi});
        for (double x : r.roots) res.push_back(restricted_1p2p1(x, case_theta2(c), m1, s));
        list.push_back(Json{{"case", std::string(to_string(c))},
                            {"theta2", case_theta2(c)},
                            {"intervals", ivs},
                            {"per_interval_counts", r.per_interval_counts},
                            {"roots", r.roots},
                            {"residuals", res}});
        total += r.roots.size();
        outside = r.outside_hypothesis;
      }
      emit_json(g, Json{{"s", g.s}, {"m1", m1}, {"outside_hypothesis", outside}, {"total_roots", total}, {"cases", list}},
                manifest);
      return kExitOk;
    }

    if (*trace) {
      manifest.command = "trace";
      const FamilyKind kind = parse_family(family);
      Window w;
      if (!window.empty()) {
        const auto v = cli::parse_angle_list(window);
        if (v.size() != 4) throw DomainError("--window needs x0,x1,y0,y1");
        w = {v[0], v[1], v[2], v[3]};
      }
      const int grid = g.grid > 0 ? g.grid : 512;
      manifest.parameters["tag"] = tag;
      manifest.parameters["family"] = std::string(family_name(kind));
      manifest.parameters["window"] = Json{w.x0, w.x1, w.y0, w.y1};
      manifest.parameters["grid"] = grid;
      const TraceResult t = trace_zero_curve(parse_curve_tag(tag), kind, w, grid, s, g.threads);
      if (g.format.empty() || g.format == "csv") {
        write_output(g, cli::polylines_csv(t), manifest);
      } else {
        Json lines = Json::array();
        for (const auto& p : t.polylines) {
          Json pts = Json::array();
          for (const auto& q : p.points) pts.push_back(Json{q[0], q[1]});
          lines.push_back(Json{{"closed", p.closed}, {"points", pts}});
        }
        Json deg = Json::array();
        for (const auto& c : t.degenerate_cells) deg.push_back(Json{c[0], c[1]});
        emit_json(g, Json{{"tag", tag}, {"polylines", lines}, {"degenerate_cells", deg},
                          {"rejected_crossings", t.rejected_crossings}},
                  manifest);
      }
      return kExitOk;
    }

    if (*fam) {
      manifest.command = "solve-family";
      const FamilyKind kind = parse_family(family);
      const MassVector m(cli::parse_number_list(masses, "mass"));
      const auto seed_list = seeds.empty() ? random_seeds(kind, random_count, rng_seed) : parse_seed_list(seeds);
      manifest.parameters["family"] = std::string(family_name(kind));
      manifest.parameters["masses"] = masses;
      if (seeds.empty()) {
        manifest.parameters["random_seeds"] = random_count;
        manifest.parameters["rng_seed"] = rng_seed;
      } else {
        manifest.parameters["seeds"] = seeds;
      }
      const FamilySolveResult r = solve_symmetric_family(kind, m, seed_list, s, g.threads);
      Json sols = Json::array(), fails = Json::array();
      for (const auto& x : r.solutions) {
        Json j{{"seed_index", x.seed_index}, {"free_angles", x.free_angles}, {"thetas", x.thetas},
               {"residual", x.residual}, {"iterations", x.iterations}};
        Json region_b(nullptr), region_c(nullptr);
        if (kind == FamilyKind::Type2_1p4) {
          try {
            region_b = region_B_check(RingConfiguration(x.thetas, s));
          } catch (const DomainError&) {
          }
        }
        if (kind == FamilyKind::Sym_1p5 && x.free_angles[0] < 0.5 * kPi)
          region_c = region_C_check(x.free_angles[0], x.free_angles[1]);
        j["region_B"] = region_b;
        j["region_C"] = region_c;
        sols.push_back(j);
      }
      for (const auto& f : r.failures) fails.push_back(Json{{"seed_index", f.seed_index}, {"message", f.message}});
      emit_json(g, Json{{"family", std::string(family_name(kind))}, {"solutions", sols}, {"failures", fails}}, manifest);
      return kExitOk;
    }

    if (*region) {
      manifest.command = "region-check";
      if (!thetas.empty()) {
        manifest.parameters["thetas"] = thetas;
        const RingConfiguration cfg(cli::parse_angle_list(thetas), s);
        const RegionBResult r = region_B_details(cfg);
        emit_json(g, Json{{"region", "B"}, {"in_region", r.in_region}, {"gaps", r.gaps}, {"span", r.span},
                          {"half_circle_inconsistency", r.half_circle}},
                  manifest);
      } else {
        if (theta1_text.empty() || theta2_text.empty())
          throw DomainError("region-check needs --thetas (four angles) or --theta1 and --theta2");
        theta1 = cli::parse_angle(theta1_text);
        theta2 = cli::parse_angle(theta2_text);
        manifest.parameters["theta1"] = theta1;
        manifest.parameters["theta2"] = theta2;
        emit_json(g, Json{{"region", "C"}, {"in_region", region_C_check(theta1, theta2)}}, manifest);
      }
      return kExitOk;
    }

    if (*cert) {
      manifest.command = "certify " + target;
      bool ok = false;
      Json body;
      if (target == "thm1") {
        FourBodyCertificateOptions o;
        o.s = g.s;
        if (!theta1_text.empty()) o.theta1 = Interval(cli::parse_angle(theta1_text));
        o.alpha = Interval(alpha);
        o.alpha_symmetric = alpha_symmetric;
        if (depth > 0) o.max_depth = depth;
        manifest.parameters["alpha"] = alpha;
        manifest.parameters["alpha_symmetric"] = alpha_symmetric;
        manifest.parameters["theta1"] = theta1_text.empty() ? "pi/6" : theta1_text;
        manifest.parameters["max_depth"] = o.max_depth;
        const CertificateReport r = certify_four_body(o);
        ok = r.passed();
        body = cli::to_json(r);
      } else if (target == "thm4n6" || target == "thm4n8") {
        PfaffianZeroOptions o;
        o.s = g.s;
        if (depth > 0) o.max_depth = depth;
        manifest.parameters["max_depth"] = o.max_depth;
        const CertificateReport r = certify_pfaffian_zero(target == "thm4n6" ? 6 : 8, o);
        ok = r.passed();
        body = cli::to_json(r);
      } else {
        DetH2Options o;
        o.s = g.s;
        o.grid_n = g.grid > 0 ? g.grid : 32;
        if (depth >= 0) o.max_depth = depth;
        o.sampling = parse_mass_sampling(sampling);
        o.simplex_resolution = simplex_res;
        o.max_boxes = max_boxes;
        o.threads = g.threads;
        manifest.parameters["grid"] = o.grid_n;
        manifest.parameters["max_depth"] = o.max_depth;
        manifest.parameters["sampling"] = sampling;
        manifest.parameters["max_boxes"] = max_boxes;
        manifest.parameters["min_coverage"] = min_coverage;
        const CoverageReport r = certify_detH2_region(o);
        ok = r.det_sign_change_boxes() == 0 && !r.resource_limit_hit() && r.certified_fraction() > min_coverage;
        body = cli::to_json(r);
        body["passed"] = ok;
      }
      emit_json(g, body, manifest);
      if (!ok) std::cerr << "certification failed: see report\n";
      return ok ? kExitOk : kExitCertification;
    }
  } catch (const CollisionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCollision;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
