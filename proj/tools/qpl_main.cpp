#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpl/reduction.hpp"
#include "qpl/report.hpp"
#include "qpl/rmatrix.hpp"
#include "qpl/series.hpp"

namespace {

using namespace qpl;

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file " + path);
  out << text;
}

int run_verify(const SuiteConfig& cfg) {
  Report rep = run_suite(cfg);
  write_or_print(cfg.out, render_report(rep, cfg.format));
  if (!cfg.out.empty()) {
    int passed = 0;
    for (const auto& c : rep.checks) passed += c.pass ? 1 : 0;
    std::fprintf(stderr, "%s on %s: %d/%zu checks passed, report in %s\n",
                 cfg.suite.c_str(), cfg.group.c_str(), passed, rep.checks.size(),
                 cfg.out.c_str());
  }
  return rep.all_pass() ? 0 : 1;
}

int run_bracket(int genus, int boundary, const std::string& group, const std::string& w1,
                const std::string& w2, unsigned long long seed, const std::string& out_path) {
  ModelPtr G = resolve_group(group);
  SurfaceData surf;
  surf.genus = genus;
  surf.boundary = boundary;
  RepVarietySpace R = build_rep_variety(surf, G, RepVariant::Full);

  ScalarFunction F1 = parse_trace_word(R, w1);
  ScalarFunction F2 = parse_trace_word(R, w2);

  std::mt19937_64 rng(seed);
  Point m0 = R.X.sample(rng);
  const CMat e = CMat::Identity(G->n, G->n);
  LevelSetPoint lp = project_to_level_set(R.X, m0, e);

  const double bracket = reduced_bracket(R.X, F1, F2, lp.m);

  // certificates: invariance of both observables, and the closed-form
  // differentials against the flow oracle at the evaluation point
  std::mt19937_64 crng(seed + 1);
  const double inv1 = invariance_defect(R.X, F1, crng, 3);
  const double inv2 = invariance_defect(R.X, F2, crng, 3);
  ScalarFunction O1 = fd_oracle(R.X.S, F1.value);
  ScalarFunction O2 = fd_oracle(R.X.S, F2.value);
  const double fd_gap = std::abs(poisson_bracket(R.X, O1, O2, lp.m) - bracket);

  nlohmann::ordered_json j;
  j["surface"] = {{"genus", genus}, {"boundary", boundary}};
  j["group"] = group;
  j["words"] = {{"w1", w1}, {"w2", w2}};
  j["point"] = {{"seed", seed},
                {"projection_iterations", lp.iterations},
                {"level_distance", lp.distance},
                {"locally_free", lp.locally_free}};
  j["certificates"] = {{"invariance_w1", inv1},
                       {"invariance_w2", inv2},
                       {"flow_oracle_gap", fd_gap}};
  j["bracket"] = bracket;
  write_or_print(out_path, j.dump(2) + "\n");
  return 0;
}

int run_cotangent(double x, long nmax, const std::string& out_path) {
  std::vector<SeriesRow> rows = cotangent_table(x, nmax);
  std::ostringstream out;
  out << "N,value,error\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g\n", r.N, r.value, r.error);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "# limit = %.17g\n", cotangent_limit(x));
  out << buf;
  std::snprintf(buf, sizeof(buf), "# fitted_decay_rate = %.6f\n", fitted_decay_rate(rows));
  out << buf;
  write_or_print(out_path, out.str());
  return 0;
}

// Base point from comma-separated eigenphase angles: n-1 angles for the
// unitary kinds (the last phase balances the determinant), k angles on the
// torus, one rotation angle on so3.
CMat base_from_angles(const GroupModel& G, const std::string& spec) {
  std::vector<double> a;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) a.push_back(std::stod(item));

  if (G.name == "so3") {
    if (a.size() != 1) throw std::invalid_argument("so3 base takes one angle");
    CMat b = CMat::Identity(3, 3);
    b(0, 0) = std::cos(a[0]);
    b(0, 1) = -std::sin(a[0]);
    b(1, 0) = std::sin(a[0]);
    b(1, 1) = std::cos(a[0]);
    return b;
  }
  const bool det_one = G.det_one;
  const size_t want = det_one ? static_cast<size_t>(G.n - 1) : static_cast<size_t>(G.n);
  if (a.size() != want)
    throw std::invalid_argument(G.name + " base takes " + std::to_string(want) +
                                " angle(s), got " + std::to_string(a.size()));
  CMat b = CMat::Zero(G.n, G.n);
  double sum = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    b(i, i) = std::polar(1.0, a[i]);
    sum += a[i];
  }
  if (det_one) b(G.n - 1, G.n - 1) = std::polar(1.0, -sum);
  return b;
}

std::string default_angles(const GroupModel& G) {
  if (G.name == "so3") return "1.1";
  const int count = G.det_one ? G.n - 1 : G.n;
  std::string s;
  for (int i = 0; i < count; ++i) s += (i ? "," : "") + std::string("0.4");
  return s;
}

int run_crosssection(const std::string& group, std::string base_spec, int samples,
                     unsigned long long seed, const std::string& out_path) {
  ModelPtr G = resolve_group(group);
  if (base_spec.empty()) base_spec = default_angles(*G);
  const CMat base = base_from_angles(*G, base_spec);
  Slice S = make_slice(G, base);
  QuasiPoissonSpace can = canonical_group_space(G);

  std::ostringstream out;
  out << "sample,radius_fraction,ev2,orthogonality,perp_block\n";
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  char buf[160];
  for (int i = 0; i < samples; ++i) {
    RVec w(S.dim_h());
    for (int a = 0; a < S.dim_h(); ++a) w[a] = gauss(rng);
    const double frac = 0.15 + 0.7 * (double(i) / std::max(1, samples - 1));
    w *= frac * S.radius / std::max(w.norm(), 1e-12);
    const CMat h = S.point(w);
    Point m{{FactorPoint{h, RVec()}}};
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.17g,%.17g,%.17g\n", i, frac,
                  ev2_residual(S, h), splitting_orthogonality_residual(can, S, m),
                  perp_block_residual(can, S, m));
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "# group = %s, dim_h = %d, radius = %.6g, sigma_floor = %.6g\n",
                G->name.c_str(), S.dim_h(), S.radius, S.sigma_floor);
  out << buf;
  write_or_print(out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for quasi-Poisson structures on compact groups"};
  app.require_subcommand(1);

  // verify ------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string v_suite, v_group, v_out, v_format, v_config;
  unsigned long long v_seed = 0;
  int v_points = 0;
  std::vector<std::string> v_tol;
  verify->add_option("suite", v_suite, "suite name")->required();
  verify->add_option("--group", v_group, "group kind or JSON descriptor path");
  verify->add_option("--seed", v_seed, "RNG seed");
  verify->add_option("--points", v_points, "sample points per check");
  verify->add_option("--tol", v_tol, "tolerance override class=value")->expected(-1);
  verify->add_option("--out", v_out, "output path (default stdout)");
  verify->add_option("--format", v_format, "json | csv | md");
  verify->add_option("--config", v_config, "key=value config file; flags override");

  // bracket -----------------------------------------------------------
  auto* bracket = app.add_subcommand("bracket", "reduced bracket of two trace words");
  int b_genus = 1, b_boundary = 1;
  std::string b_group = "su2", b_w1, b_w2, b_out;
  unsigned long long b_seed = 1;
  bracket->add_option("--genus", b_genus, "surface genus");
  bracket->add_option("--boundary", b_boundary, "boundary circles");
  bracket->add_option("--group", b_group, "group kind or JSON descriptor path");
  bracket->add_option("--w1", b_w1, "first word, e.g. \"a1 b1\"")->required();
  bracket->add_option("--w2", b_w2, "second word")->required();
  bracket->add_option("--seed", b_seed, "start point seed");
  bracket->add_option("--out", b_out, "output path (default stdout)");

  // demo cotangent ------------------------------------------------------
  auto* demo = app.add_subcommand("demo", "self-contained demonstrations");
  demo->require_subcommand(1);
  auto* cot = demo->add_subcommand("cotangent", "symmetric partial sums of the cotangent series");
  double c_x = 0.25;
  long c_nmax = 4096;
  std::string c_out;
  cot->add_option("--x", c_x, "evaluation point (non-integer)")->required();
  cot->add_option("--nmax", c_nmax, "largest partial-sum cutoff");
  cot->add_option("--out", c_out, "output path (default stdout)");

  // crosssection --------------------------------------------------------
  auto* xs = app.add_subcommand("crosssection", "slice residual grid around a base point");
  std::string x_group = "su2", x_base, x_out;
  int x_samples = 8;
  unsigned long long x_seed = 1;
  xs->add_option("--group", x_group, "group kind or JSON descriptor path");
  xs->add_option("--base", x_base, "comma-separated eigenphase angles");
  xs->add_option("--samples", x_samples, "grid size");
  xs->add_option("--seed", x_seed, "direction seed");
  xs->add_option("--out", x_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      SuiteConfig cfg;
      if (!v_config.empty()) cfg = load_config_file(v_config);
      cfg.suite = v_suite;
      if (verify->count("--group")) cfg.group = v_group;
      if (verify->count("--seed")) cfg.seed = v_seed;
      if (verify->count("--points")) cfg.points = v_points;
      if (verify->count("--out")) cfg.out = v_out;
      if (verify->count("--format")) cfg.format = v_format;
      for (const auto& kv : v_tol) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--tol expects class=value, got '" + kv + "'");
        cfg.tol[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      }
      // reject unknown classes before running anything
      apply_tol_overrides(Tolerances{}, cfg.tol);
      return run_verify(cfg);
    }
    if (*bracket)
      return run_bracket(b_genus, b_boundary, b_group, b_w1, b_w2, b_seed, b_out);
    if (*cot) return run_cotangent(c_x, c_nmax, c_out);
    if (*xs) return run_crosssection(x_group, x_base, x_samples, x_seed, x_out);
  } catch (const WordParseError& e) {
    std::fprintf(stderr, "word parse error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return 1;
  }
  return 0;
}
