#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coneheat/bump.hpp"
#include "coneheat/checks.hpp"
#include "coneheat/counterexample.hpp"
#include "coneheat/geometry.hpp"
#include "coneheat/heatfd.hpp"
#include "coneheat/positivity.hpp"
#include "coneheat/report.hpp"
#include "coneheat/rng.hpp"
#include "coneheat/weights.hpp"

using nlohmann::json;
using namespace coneheat;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;  // a mathematical contract failed
constexpr int kExitFailure = 2;    // tool, config, or numerical failure

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_number_list(const std::string& s,
                                      const std::string& flag) {
  std::vector<double> out;
  for (const std::string& part : split(s, ',')) {
    const std::string p = trim(part);
    if (p.empty())
      throw std::invalid_argument(flag + ": empty element in list");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": not a number: " + p);
    }
    if (used != p.size())
      throw std::invalid_argument(flag + ": trailing junk in: " + p);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(flag + ": empty list");
  return out;
}

// One token per config entry, ready for injection into the flag stream.
// key = value lines (with # comments) or a single JSON object.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();

  std::vector<std::string> tokens;
  auto add = [&tokens](const std::string& key, const std::string& value,
                       bool is_flag) {
    if (is_flag)
      tokens.push_back("--" + key);
    else
      tokens.push_back("--" + key + "=" + value);
  };

  const std::string body = trim(text);
  if (!body.empty() && body[0] == '{') {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(std::string("config: JSON error: ") +
                                  e.what());
    }
    if (!j.is_object())
      throw std::invalid_argument("config: JSON root must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const json& v = it.value();
      if (v.is_boolean()) {
        if (v.get<bool>()) add(it.key(), "", true);
      } else if (v.is_string()) {
        add(it.key(), v.get<std::string>(), false);
      } else if (v.is_number()) {
        add(it.key(), v.dump(), false);
      } else if (v.is_array()) {
        std::string joined;
        for (const json& e : v) {
          if (!joined.empty()) joined += ',';
          joined += e.is_string() ? e.get<std::string>() : e.dump();
        }
        add(it.key(), joined, false);
      } else {
        throw std::invalid_argument("config: unsupported value for key " +
                                    it.key());
      }
    }
    return tokens;
  }

  int line_no = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": empty key");
    if (value == "true")
      add(key, "", true);
    else if (value == "false")
      ;  // flag left at its default
    else
      add(key, value, false);
  }
  return tokens;
}

struct CommonOpts {
  std::string out;
  std::string formats = "json,csv";
};

void add_common(CLI::App* sub, CommonOpts& c) {
  const char* env = std::getenv("CONEHEAT_OUT");
  c.out = env != nullptr ? env : ".";
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--formats", c.formats,
                  "comma-separated subset of {json,csv}")
      ->capture_default_str();
}

// Writes manifest (always), the JSON report, and any CSV tables, honoring the
// formats selection. File contents never include timestamps.
struct Sink {
  std::string command;
  CommonOpts common;
  json config;

  void finish(const json& report,
              const std::vector<std::pair<std::string, std::string>>& csvs =
                  {}) const {
    bool json_on = false, csv_on = false;
    for (const std::string& part : split(common.formats, ',')) {
      const std::string p = trim(part);
      if (p == "json")
        json_on = true;
      else if (p == "csv")
        csv_on = true;
      else if (!p.empty())
        throw std::invalid_argument("formats: unknown format " + p);
    }
    std::filesystem::create_directories(common.out);
    const std::string base = common.out + "/" + command;
    write_text_file(base + "-manifest.json",
                    make_manifest(command, config).dump(2) + "\n");
    if (json_on) write_text_file(base + "-report.json", report.dump(2) + "\n");
    if (csv_on)
      for (const auto& [name, content] : csvs)
        write_text_file(common.out + "/" + name, content);
  }
};

json point_json(const SpaceTimePoint& p) {
  json j;
  j["x"] = p.x;
  j["t"] = p.t;
  return j;
}

// ---------------------------------------------------------------------------
// alpha-curve
// ---------------------------------------------------------------------------

struct AlphaCurveOpts {
  double eps_min = 0.05, eps_max = 0.55;
  int steps = 50;
  double tol = 1e-12;
  CommonOpts common;
};

int run_alpha_curve(const AlphaCurveOpts& o) {
  if (o.steps < 2) throw std::invalid_argument("alpha-curve: steps must be >= 2");
  const double eps_cap = 1.0 / std::sqrt(3.0);
  if (!(o.eps_min > 0.0) || !(o.eps_max > o.eps_min) || !(o.eps_max < eps_cap))
    throw std::invalid_argument(
        "alpha-curve: need 0 < eps-min < eps-max < 1/sqrt(3)");

  CsvWriter csv({"eps", "alpha_star", "residual"});
  double max_resid = 0.0;
  bool monotone = true;
  std::vector<AlphaCurvePoint> pts;
  for (int i = 0; i < o.steps; ++i) {
    const double eps =
        o.eps_min + (o.eps_max - o.eps_min) * i / (o.steps - 1.0);
    const AlphaCurvePoint p = alpha_star(eps, o.tol);
    if (!pts.empty() && p.alpha_star < pts.back().alpha_star - 1e-12)
      monotone = false;
    max_resid = std::max(max_resid, std::fabs(p.residual));
    csv.row({p.eps, p.alpha_star, p.residual});
    pts.push_back(p);
  }
  const bool pass = monotone && max_resid <= 1e-10;

  json report;
  report["points"] = o.steps;
  report["max_abs_residual"] = max_resid;
  report["residual_tolerance"] = 1e-10;
  report["monotone_nondecreasing"] = monotone;
  report["alpha_star_first"] = pts.front().alpha_star;
  report["alpha_star_last"] = pts.back().alpha_star;
  report["pass"] = pass;

  Sink sink{"alpha-curve", o.common, {}};
  sink.config["eps-min"] = o.eps_min;
  sink.config["eps-max"] = o.eps_max;
  sink.config["steps"] = o.steps;
  sink.config["tol"] = o.tol;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"alpha-curve-points.csv", csv.str()}});
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// psd-scan
// ---------------------------------------------------------------------------

struct PsdScanOpts {
  double alpha = 1.85, eps = 0.5;
  int dim = 3;
  long count = 10000;
  int pairs = 0;
  std::uint64_t seed = 1;
  CommonOpts common;
};

int run_psd_scan(const PsdScanOpts& o) {
  std::vector<std::pair<double, double>> cases;  // (alpha, eps)
  if (o.pairs > 0) {
    Rng rng(o.seed);
    for (int i = 0; i < o.pairs; ++i) {
      const double eps = rng.uniform(0.05, 0.55);
      const double lo = alpha_star(eps).alpha_star;
      cases.emplace_back(lo + rng.uniform() * (2.0 - lo), eps);
    }
  } else {
    cases.emplace_back(o.alpha, o.eps);
  }

  CsvWriter csv({"alpha", "eps", "points_checked", "min_eigenvalue"});
  json runs = json::array();
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto [alpha, eps] = cases[i];
    const PsdScanResult r =
        hessian_psd_scan(alpha, eps, o.dim, o.count, o.seed + 1 + i);
    min_eig = std::min(min_eig, r.min_eigenvalue);
    csv.row({alpha, eps, static_cast<double>(r.points_checked),
             r.min_eigenvalue});
    json jr;
    jr["alpha"] = alpha;
    jr["eps"] = eps;
    jr["points_checked"] = r.points_checked;
    jr["min_eigenvalue"] = r.min_eigenvalue;
    jr["argmin"] = point_json(r.argmin);
    jr["pass"] = r.pass;
    runs.push_back(jr);
  }
  const bool pass = min_eig >= -1e-10;

  json report;
  report["runs"] = runs;
  report["min_eigenvalue"] = min_eig;
  report["tolerance"] = -1e-10;
  report["pass"] = pass;

  Sink sink{"psd-scan", o.common, {}};
  sink.config["alpha"] = o.alpha;
  sink.config["eps"] = o.eps;
  sink.config["dim"] = o.dim;
  sink.config["count"] = o.count;
  sink.config["pairs"] = o.pairs;
  sink.config["seed"] = o.seed;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"psd-scan-runs.csv", csv.str()}});
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// a3-scan
// ---------------------------------------------------------------------------

struct A3ScanOpts {
  double alpha = 1.85, eps = 0.5, a = 10.0;
  int dim = 3;
  long count = 10000;
  std::uint64_t seed = 1;
  bool near_ray = false;
  bool expect_violation = false;
  CommonOpts common;
};

int run_a3_scan(const A3ScanOpts& o) {
  WeightParams w;
  w.a = o.a;
  w.alpha = o.alpha;
  w.eps = o.eps;
  w.dim = o.dim;
  const A3ScanResult r = a3_scan(w, o.count, o.seed, o.near_ray);

  json report;
  report["alpha"] = o.alpha;
  report["eps"] = o.eps;
  report["a"] = o.a;
  report["convexity_margin"] = convexity_margin(o.alpha, o.eps);
  report["admissible"] = r.admissible;
  report["points_checked"] = r.points_checked;
  report["nonneg_violations"] = r.nonneg_violations;
  report["bound_violations"] = r.bound_violations;
  report["min_a3"] = r.min_a3;
  report["min_margin_over_bound"] = r.min_margin;
  report["argmin"] = point_json(r.argmin);
  report["near_ray"] = o.near_ray;
  report["expect_violation"] = o.expect_violation;
  report["pass"] = r.pass;

  CsvWriter csv({"alpha", "eps", "a", "points_checked", "nonneg_violations",
                 "bound_violations", "min_a3", "min_margin_over_bound"});
  csv.row({o.alpha, o.eps, o.a, static_cast<double>(r.points_checked),
           static_cast<double>(r.nonneg_violations),
           static_cast<double>(r.bound_violations), r.min_a3, r.min_margin});

  Sink sink{"a3-scan", o.common, {}};
  sink.config["alpha"] = o.alpha;
  sink.config["eps"] = o.eps;
  sink.config["a"] = o.a;
  sink.config["dim"] = o.dim;
  sink.config["count"] = o.count;
  sink.config["seed"] = o.seed;
  sink.config["near-ray"] = o.near_ray;
  sink.config["expect-violation"] = o.expect_violation;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"a3-scan-summary.csv", csv.str()}});

  if (o.expect_violation) return r.nonneg_violations > 0 ? kExitPass : kExitViolation;
  return r.pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// check-carleman
// ---------------------------------------------------------------------------

struct CarlemanOpts {
  int prop = 23;
  double eps = 0.5, alpha = 1.85;
  int dim = 2;
  int bumps = 20, modulated = 5;
  std::string a_sweep;  // per-prop default filled in the runner
  int levels = 3, order = 8;
  std::uint64_t seed = 1;
  CommonOpts common;
};

int run_check_carleman(const CarlemanOpts& o) {
  if (o.prop != 21 && o.prop != 23)
    throw std::invalid_argument("check-carleman: --prop must be 21 or 23");
  std::string sweep_str = o.a_sweep;
  if (sweep_str.empty()) sweep_str = o.prop == 21 ? "2,5,10" : "5,10,20,50,100";
  const std::vector<double> sweep = parse_number_list(sweep_str, "--a-sweep");
  for (double a : sweep)
    if (!(a > 0.0))
      throw std::invalid_argument("check-carleman: sweep values must be > 0");

  const ConeSpec cone(o.dim, 2.0 * std::acos(o.eps));
  const std::vector<BumpSpec> suite = default_bump_suite(
      cone, o.bumps, std::min(o.modulated, o.bumps), o.seed);

  CsvWriter csv({"a", "bump", "lhs", "rhs", "ratio", "lhs_error", "rhs_error",
                 "log_shift", "evals"});
  json per_a = json::array();
  const double threshold = 4.0 * (1.0 + 1e-4);
  double max_ratio_overall = 0.0;
  std::vector<double> sup_ratio(sweep.size(), 0.0);
  bool all_finite = true;

  for (std::size_t ai = 0; ai < sweep.size(); ++ai) {
    const double a = sweep[ai];
    for (int bi = 0; bi < o.bumps; ++bi) {
      const Bump bump(suite[bi]);
      CarlemanRatio r;
      if (o.prop == 21) {
        r = check_global_inequality(bump, a, o.levels, o.order);
      } else {
        WeightParams w;
        w.a = a;
        w.alpha = o.alpha;
        w.eps = o.eps;
        w.dim = o.dim;
        r = check_cone_inequality(bump, w, o.levels, o.order);
      }
      if (!std::isfinite(r.ratio)) all_finite = false;
      sup_ratio[ai] = std::max(sup_ratio[ai], r.ratio);
      max_ratio_overall = std::max(max_ratio_overall, r.ratio);
      csv.row({a, static_cast<double>(bi), r.lhs, r.rhs, r.ratio, r.lhs_error,
               r.rhs_error, r.log_shift, static_cast<double>(r.evals)});
    }
    json ja;
    ja["a"] = a;
    ja["sup_ratio"] = sup_ratio[ai];
    per_a.push_back(ja);
  }

  // smallest sweep value from which every larger a also stays below threshold
  double a_min = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ai = 0; ai < sweep.size(); ++ai) {
    bool ok = true;
    for (std::size_t aj = ai; aj < sweep.size(); ++aj)
      ok = ok && sup_ratio[aj] <= threshold;
    if (ok) {
      a_min = sweep[ai];
      break;
    }
  }

  const bool pass =
      o.prop == 21 ? all_finite : (all_finite && std::isfinite(a_min));

  json report;
  report["prop"] = o.prop;
  report["eps"] = o.eps;
  report["alpha"] = o.alpha;
  report["dim"] = o.dim;
  report["bumps"] = o.bumps;
  report["levels"] = o.levels;
  report["order"] = o.order;
  report["per_a"] = per_a;
  report["max_ratio"] = max_ratio_overall;
  report["all_ratios_finite"] = all_finite;
  if (o.prop == 23) {
    report["threshold"] = threshold;
    if (std::isfinite(a_min))
      report["a_min"] = a_min;
    else
      report["a_min"] = nullptr;
  }
  report["pass"] = pass;

  Sink sink{"check-carleman", o.common, {}};
  sink.config["prop"] = o.prop;
  sink.config["eps"] = o.eps;
  sink.config["alpha"] = o.alpha;
  sink.config["dim"] = o.dim;
  sink.config["bumps"] = o.bumps;
  sink.config["modulated"] = o.modulated;
  sink.config["a-sweep"] = sweep_str;
  sink.config["levels"] = o.levels;
  sink.config["order"] = o.order;
  sink.config["seed"] = o.seed;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"check-carleman-ratios.csv", csv.str()}});
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// check-identity
// ---------------------------------------------------------------------------

struct IdentityOpts {
  double eps = 0.5, alpha = 1.85, a = 10.0;
  int dim = 2;
  int bumps = 10, modulated = 3;
  int levels = 4, order = 8;
  std::uint64_t seed = 1;
  CommonOpts common;
};

int run_check_identity(const IdentityOpts& o) {
  const ConeSpec cone(o.dim, 2.0 * std::acos(o.eps));
  WeightParams w;
  w.a = o.a;
  w.alpha = o.alpha;
  w.eps = o.eps;
  w.dim = o.dim;
  const std::vector<BumpSpec> suite = default_bump_suite(
      cone, o.bumps, std::min(o.modulated, o.bumps), o.seed);

  CsvWriter csv({"bump", "l2", "s2", "a2", "commutator", "discrepancy",
                 "quad_error", "evals"});
  bool all_pass = true;
  double worst_ratio = 0.0;
  for (int bi = 0; bi < o.bumps; ++bi) {
    const IdentityCheck r =
        check_energy_identity(Bump(suite[bi]), w, o.levels, o.order);
    all_pass = all_pass && r.pass;
    if (r.quad_error > 0.0)
      worst_ratio =
          std::max(worst_ratio, std::fabs(r.discrepancy) / r.quad_error);
    csv.row({static_cast<double>(bi), r.l2, r.s2, r.a2, r.commutator,
             r.discrepancy, r.quad_error, static_cast<double>(r.evals)});
  }

  json report;
  report["eps"] = o.eps;
  report["alpha"] = o.alpha;
  report["a"] = o.a;
  report["bumps"] = o.bumps;
  report["levels"] = o.levels;
  report["order"] = o.order;
  report["max_discrepancy_over_error"] = worst_ratio;
  report["discrepancy_gate"] = 10.0;
  report["pass"] = all_pass;

  Sink sink{"check-identity", o.common, {}};
  sink.config["eps"] = o.eps;
  sink.config["alpha"] = o.alpha;
  sink.config["a"] = o.a;
  sink.config["dim"] = o.dim;
  sink.config["bumps"] = o.bumps;
  sink.config["modulated"] = o.modulated;
  sink.config["levels"] = o.levels;
  sink.config["order"] = o.order;
  sink.config["seed"] = o.seed;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"check-identity-bumps.csv", csv.str()}});
  return all_pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

struct CounterexampleOpts {
  double A = 1.0, alpha = 4.0, shift = 1.0;
  double margin = 0.1, r_min = 0.5, r_cap = 3.0;
  long count = 2000;
  int points = 20;
  std::uint64_t seed = 1;
  CommonOpts common;
};

int run_counterexample(const CounterexampleOpts& o) {
  CounterexampleParams p;
  p.A = o.A;
  p.alpha = o.alpha;
  p.shift = o.shift;

  const SectorScan scan =
      sector_bound_scan(p, o.margin, o.r_min, o.r_cap, o.count, o.seed);

  // |v| at s = 10^-k, k = 1..3, at fixed in-sector points
  const double half = std::numbers::pi / (2.0 * o.alpha);
  Rng rng(o.seed + 1);
  CsvWriter csv({"point", "y1", "y2", "abs_v_s1", "abs_v_s2", "abs_v_s3"});
  bool decay_ok = true;
  double max_final = 0.0;
  for (int i = 0; i < o.points; ++i) {
    const double wang = rng.uniform(-(half - o.margin), half - o.margin);
    const double r = rng.uniform(o.r_min, o.r_cap);
    const double y1 = r * std::cos(wang) - o.shift;
    const double y2 = r * std::sin(wang);
    double v[3];
    for (int k = 1; k <= 3; ++k)
      v[k - 1] = std::fabs(sector_counterexample_v(p, y1, y2, std::pow(10.0, -k)));
    decay_ok = decay_ok && v[0] >= v[1] && v[1] >= v[2] && v[2] < 1e-8;
    max_final = std::max(max_final, v[2]);
    csv.row({static_cast<double>(i), y1, y2, v[0], v[1], v[2]});
  }

  const bool pass = decay_ok && !scan.saturated_inside &&
                    std::isfinite(scan.sup_inside);

  json report;
  report["A"] = o.A;
  report["alpha"] = o.alpha;
  report["shift"] = o.shift;
  report["sector_half_angle"] = half;
  report["margin"] = o.margin;
  report["inside_count"] = scan.inside_count;
  report["outside_count"] = scan.outside_count;
  report["sup_inside"] = scan.sup_inside;
  report["sup_outside"] = scan.sup_outside;
  report["saturated_inside"] = scan.saturated_inside;
  report["saturated_outside"] = scan.saturated_outside;
  report["decay_monotone_to_1e-8"] = decay_ok;
  report["max_abs_v_at_s_1e-3"] = max_final;
  report["pass"] = pass;

  Sink sink{"counterexample", o.common, {}};
  sink.config["A"] = o.A;
  sink.config["alpha"] = o.alpha;
  sink.config["shift"] = o.shift;
  sink.config["margin"] = o.margin;
  sink.config["r-min"] = o.r_min;
  sink.config["r-cap"] = o.r_cap;
  sink.config["count"] = o.count;
  sink.config["points"] = o.points;
  sink.config["seed"] = o.seed;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"counterexample-decay.csv", csv.str()}});
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// crosscheck
// ---------------------------------------------------------------------------

// Defaults keep (rho/s)^alpha <= 1 on the grid; the closed form then has no
// subgrid boundary layer and all three doubling levels converge at the full
// second order of the scheme.
struct CrosscheckOpts {
  double A = 1.0, alpha = 4.0, shift = 1.0;
  double s0 = 0.8, s1 = 1.0;
  double r_in = 0.2, r_out = 0.8, half_angle = 0.35;
  int nr = 32, nw = 32, steps = 32;
  std::string scheme = "cn";
  CommonOpts common;
};

int run_crosscheck(const CrosscheckOpts& o) {
  CounterexampleParams p;
  p.A = o.A;
  p.alpha = o.alpha;
  p.shift = o.shift;
  SectorGrid grid;
  grid.r_in = o.r_in;
  grid.r_out = o.r_out;
  grid.half_angle = o.half_angle;
  grid.nr = o.nr;
  grid.nw = o.nw;
  Scheme scheme;
  if (o.scheme == "cn")
    scheme = Scheme::crank_nicolson;
  else if (o.scheme == "be")
    scheme = Scheme::backward_euler;
  else
    throw std::invalid_argument("crosscheck: --scheme must be cn or be");

  const CrosscheckResult r =
      counterexample_crosscheck(p, grid, o.s0, o.s1, o.steps, scheme);

  CsvWriter csv({"i", "j", "r", "w", "abs_error"});
  for (int i = 0; i <= grid.nr; ++i)
    for (int j = 0; j <= grid.nw; ++j)
      csv.row({static_cast<double>(i), static_cast<double>(j), grid.r(i),
               grid.w(j), r.error_field.at(i, j)});

  const bool pass = std::isfinite(r.max_rel_error);

  json report;
  report["A"] = o.A;
  report["alpha"] = o.alpha;
  report["shift"] = o.shift;
  report["s0"] = o.s0;
  report["s1"] = o.s1;
  report["nr"] = o.nr;
  report["nw"] = o.nw;
  report["steps"] = o.steps;
  report["scheme"] = o.scheme;
  report["max_rel_error"] = r.max_rel_error;
  report["sup_exact"] = r.sup_exact;
  report["pass"] = pass;

  Sink sink{"crosscheck", o.common, {}};
  sink.config["A"] = o.A;
  sink.config["alpha"] = o.alpha;
  sink.config["shift"] = o.shift;
  sink.config["s0"] = o.s0;
  sink.config["s1"] = o.s1;
  sink.config["r-in"] = o.r_in;
  sink.config["r-out"] = o.r_out;
  sink.config["half-angle"] = o.half_angle;
  sink.config["nr"] = o.nr;
  sink.config["nw"] = o.nw;
  sink.config["steps"] = o.steps;
  sink.config["scheme"] = o.scheme;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"crosscheck-error-field.csv", csv.str()}});
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// decay
// ---------------------------------------------------------------------------

struct DecayOpts {
  int dim = 1;
  std::string r_list = "4,8";
  int nr = 256;
  int steps = 2000;
  double t_lo_frac = 0.0078125;  // window [t_lo_frac, t_hi_frac] * R^2
  double t_hi_frac = 0.0625;
  CommonOpts common;
};

int run_decay(const DecayOpts& o) {
  const std::vector<double> rs = parse_number_list(o.r_list, "--r-list");
  if (!(o.t_lo_frac > 0.0) || !(o.t_hi_frac > o.t_lo_frac))
    throw std::invalid_argument("decay: bad window fractions");

  CsvWriter fits_csv(
      {"R", "beta_fit", "c_fit", "max_violation", "points_used"});
  std::vector<std::pair<std::string, std::string>> csvs;
  json runs = json::array();
  std::vector<double> betas;
  bool pass = true;
  for (double R : rs) {
    const double T = R * R * o.t_hi_frac;
    const double dt = T / o.steps;
    const RadialResult sol = radial_solve(
        o.dim, R, o.nr, dt, T, [](double) { return 1.0; });
    const DecayFit fit = decay_fit(sol.times, sol.center, R,
                                   R * R * o.t_lo_frac, R * R * o.t_hi_frac);
    betas.push_back(fit.beta_fit);
    pass = pass && fit.beta_fit > 0.05 && fit.max_violation <= 0.0 &&
           fit.points_used >= 8;
    fits_csv.row({R, fit.beta_fit, fit.c_fit, fit.max_violation,
                  static_cast<double>(fit.points_used)});

    CsvWriter series({"t", "u_center"});
    for (std::size_t k = 0; k < sol.times.size(); ++k)
      series.row({sol.times[k], sol.center[k]});
    char name[64];
    std::snprintf(name, sizeof name, "decay-series-R%g.csv", R);
    csvs.emplace_back(name, series.str());

    json jr;
    jr["R"] = R;
    jr["beta_fit"] = fit.beta_fit;
    jr["c_fit"] = fit.c_fit;
    jr["max_violation"] = fit.max_violation;
    jr["points_used"] = fit.points_used;
    runs.push_back(jr);
  }

  double max_rel_spread = 0.0;
  for (std::size_t i = 1; i < betas.size(); ++i)
    max_rel_spread = std::max(
        max_rel_spread, std::fabs(betas[i] - betas[0]) / std::fabs(betas[0]));
  if (betas.size() > 1) pass = pass && max_rel_spread <= 0.2;

  json report;
  report["dim"] = o.dim;
  report["nr"] = o.nr;
  report["steps"] = o.steps;
  report["window_fractions"] = {o.t_lo_frac, o.t_hi_frac};
  report["runs"] = runs;
  report["beta_rel_spread"] = max_rel_spread;
  report["beta_floor"] = 0.05;
  report["spread_gate"] = 0.2;
  report["pass"] = pass;

  csvs.insert(csvs.begin(), {"decay-fits.csv", fits_csv.str()});
  Sink sink{"decay", o.common, {}};
  sink.config["dim"] = o.dim;
  sink.config["r-list"] = o.r_list;
  sink.config["nr"] = o.nr;
  sink.config["steps"] = o.steps;
  sink.config["t-lo-frac"] = o.t_lo_frac;
  sink.config["t-hi-frac"] = o.t_hi_frac;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, csvs);
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// control
// ---------------------------------------------------------------------------

struct ControlOpts {
  std::string theta_sweep = "60,90,120,150";  // degrees
  double r_in = 0.4, r_out = 2.0;
  int nr = 24, nw = 24;
  double dt = 0.0025, T = 0.25;
  int n_controls = 9;
  double bound = 1.0;
  int max_iter = 20000;
  CommonOpts common;
};

int run_control(const ControlOpts& o) {
  const std::vector<double> thetas =
      parse_number_list(o.theta_sweep, "--theta-sweep");
  const int hats = static_cast<int>(std::lround(std::sqrt(
      static_cast<double>(o.n_controls))));
  if (hats * hats != o.n_controls || hats < 1)
    throw std::invalid_argument(
        "control: n-controls must be a positive perfect square (tensor hats)");

  CsvWriter csv({"theta_deg", "free_norm", "terminal_norm", "iterations",
                 "converged"});
  json runs = json::array();
  bool pass = true;
  for (double theta_deg : thetas) {
    const double theta = theta_deg * std::numbers::pi / 180.0;
    if (!(theta > 0.0) || !(theta < std::numbers::pi))
      throw std::invalid_argument("control: theta must be in (0, 180) degrees");
    SectorGrid grid;
    grid.r_in = o.r_in;
    grid.r_out = o.r_out;
    grid.half_angle = theta / 2.0;
    grid.nr = o.nr;
    grid.nw = o.nw;
    const ControlResult r =
        control_experiment(grid, o.dt, o.T, hats, hats, o.bound, o.max_iter);
    pass = pass && r.terminal_norm <= r.free_norm * (1.0 + 1e-9);
    csv.row({theta_deg, r.free_norm, r.terminal_norm,
             static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0});
    json jr;
    jr["theta_deg"] = theta_deg;
    jr["free_norm"] = r.free_norm;
    jr["terminal_norm"] = r.terminal_norm;
    jr["iterations"] = r.iterations;
    jr["converged"] = r.converged;
    jr["coefficients"] = r.coefficients;
    runs.push_back(jr);
  }

  json report;
  report["n_controls"] = o.n_controls;
  report["bound"] = o.bound;
  report["tikhonov"] = 1e-12;
  report["max_iter"] = o.max_iter;
  report["runs"] = runs;
  report["pass"] = pass;

  Sink sink{"control", o.common, {}};
  sink.config["theta-sweep"] = o.theta_sweep;
  sink.config["r-in"] = o.r_in;
  sink.config["r-out"] = o.r_out;
  sink.config["nr"] = o.nr;
  sink.config["nw"] = o.nw;
  sink.config["dt"] = o.dt;
  sink.config["T"] = o.T;
  sink.config["n-controls"] = o.n_controls;
  sink.config["bound"] = o.bound;
  sink.config["max-iter"] = o.max_iter;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"control-sweep.csv", csv.str()}});
  return pass ? kExitPass : kExitViolation;
}

// ---------------------------------------------------------------------------
// g-check
// ---------------------------------------------------------------------------

struct GCheckOpts {
  double beta = 0.003, rho = 10.0;
  int grid = 4000;
  bool expect_violation = false;
  CommonOpts common;
};

int run_g_check(const GCheckOpts& o) {
  const GCheck r = decay_g_check(o.beta, o.rho, o.grid);

  CsvWriter csv({"s", "g", "gprime"});
  for (int i = 1; i <= o.grid; ++i) {
    const double s = 2.0 * i / (o.grid + 1);
    const double lg = -2.0 * r.a * std::log(time_profile_h(s)) -
                      o.rho * o.rho / (32.0 * s);
    const double g = lg < -745.0 ? 0.0 : std::exp(lg);
    const double gp =
        g * (-2.0 * r.a * (1.0 / s - 1.0 / 3.0) +
             o.rho * o.rho / (32.0 * s * s));
    csv.row({s, g, gp});
  }

  json report;
  report["beta"] = o.beta;
  report["rho"] = o.rho;
  report["grid"] = o.grid;
  report["a"] = r.a;
  report["g_at_2"] = r.g_at_2;
  report["min_gprime"] = r.min_gprime;
  report["argmin_s"] = r.argmin_s;
  report["gprime_tolerance"] = -1e-12;
  report["expect_violation"] = o.expect_violation;
  report["pass"] = r.pass;

  Sink sink{"g-check", o.common, {}};
  sink.config["beta"] = o.beta;
  sink.config["rho"] = o.rho;
  sink.config["grid"] = o.grid;
  sink.config["expect-violation"] = o.expect_violation;
  sink.config["out"] = o.common.out;
  sink.config["formats"] = o.common.formats;
  sink.finish(report, {{"g-check-curve.csv", csv.str()}});

  if (o.expect_violation) return r.pass ? kExitViolation : kExitPass;
  return r.pass ? kExitPass : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for heat-equation backward uniqueness in "
               "cones: weight certificates, integral inequalities, an explicit "
               "bounded counterexample, and decay experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  int rc = kExitPass;
  auto guard = [&rc](auto&& fn) {
    return [&rc, fn]() { rc = fn(); };
  };

  AlphaCurveOpts ac;
  CLI::App* s_ac = app.add_subcommand(
      "alpha-curve", "smallest admissible power for each opening");
  s_ac->add_option("--eps-min", ac.eps_min)->capture_default_str();
  s_ac->add_option("--eps-max", ac.eps_max)->capture_default_str();
  s_ac->add_option("--steps", ac.steps)->capture_default_str();
  s_ac->add_option("--tol", ac.tol)->capture_default_str();
  add_common(s_ac, ac.common);
  s_ac->callback(guard([&ac] { return run_alpha_curve(ac); }));

  PsdScanOpts ps;
  CLI::App* s_ps = app.add_subcommand(
      "psd-scan", "positive semidefiniteness of the shifted weight Hessian");
  s_ps->add_option("--alpha", ps.alpha)->capture_default_str();
  s_ps->add_option("--eps", ps.eps)->capture_default_str();
  s_ps->add_option("--dim", ps.dim)->capture_default_str();
  s_ps->add_option("--count", ps.count)->capture_default_str();
  s_ps->add_option("--pairs", ps.pairs, "random admissible (alpha, eps) pairs")
      ->capture_default_str();
  s_ps->add_option("--seed", ps.seed)->capture_default_str();
  add_common(s_ps, ps.common);
  s_ps->callback(guard([&ps] { return run_psd_scan(ps); }));

  A3ScanOpts a3;
  CLI::App* s_a3 = app.add_subcommand(
      "a3-scan", "sign and lower bound of the cubic commutator coefficient");
  s_a3->add_option("--alpha", a3.alpha)->capture_default_str();
  s_a3->add_option("--eps", a3.eps)->capture_default_str();
  s_a3->add_option("--a", a3.a)->capture_default_str();
  s_a3->add_option("--dim", a3.dim)->capture_default_str();
  s_a3->add_option("--count", a3.count)->capture_default_str();
  s_a3->add_option("--seed", a3.seed)->capture_default_str();
  s_a3->add_flag("--near-ray", a3.near_ray,
                 "concentrate samples near the lateral boundary");
  s_a3->add_flag("--expect-violation", a3.expect_violation,
                 "exit 0 when negativity is found (demonstration mode)");
  add_common(s_a3, a3.common);
  s_a3->callback(guard([&a3] { return run_a3_scan(a3); }));

  CarlemanOpts cm;
  CLI::App* s_cm = app.add_subcommand(
      "check-carleman", "weighted integral inequalities on bump suites");
  s_cm->add_option("--prop", cm.prop, "21 = whole-space, 23 = cone weight")
      ->capture_default_str();
  s_cm->add_option("--eps", cm.eps)->capture_default_str();
  s_cm->add_option("--alpha", cm.alpha)->capture_default_str();
  s_cm->add_option("--dim", cm.dim)->capture_default_str();
  s_cm->add_option("--bumps", cm.bumps)->capture_default_str();
  s_cm->add_option("--modulated", cm.modulated)->capture_default_str();
  s_cm->add_option("--a-sweep", cm.a_sweep,
                   "comma-separated weight strengths (default per prop)");
  s_cm->add_option("--levels", cm.levels)->capture_default_str();
  s_cm->add_option("--order", cm.order)->capture_default_str();
  s_cm->add_option("--seed", cm.seed)->capture_default_str();
  add_common(s_cm, cm.common);
  s_cm->callback(guard([&cm] { return run_check_carleman(cm); }));

  IdentityOpts id;
  CLI::App* s_id = app.add_subcommand(
      "check-identity", "operator-split energy identity on bump suites");
  s_id->add_option("--eps", id.eps)->capture_default_str();
  s_id->add_option("--alpha", id.alpha)->capture_default_str();
  s_id->add_option("--a", id.a)->capture_default_str();
  s_id->add_option("--dim", id.dim)->capture_default_str();
  s_id->add_option("--bumps", id.bumps)->capture_default_str();
  s_id->add_option("--modulated", id.modulated)->capture_default_str();
  s_id->add_option("--levels", id.levels)->capture_default_str();
  s_id->add_option("--order", id.order)->capture_default_str();
  s_id->add_option("--seed", id.seed)->capture_default_str();
  add_common(s_id, id.common);
  s_id->callback(guard([&id] { return run_check_identity(id); }));

  CounterexampleOpts ce;
  CLI::App* s_ce = app.add_subcommand(
      "counterexample", "bounded sector solution: envelope scan and s->0 decay");
  s_ce->add_option("--A", ce.A)->capture_default_str();
  s_ce->add_option("--alpha", ce.alpha)->capture_default_str();
  s_ce->add_option("--shift", ce.shift)->capture_default_str();
  s_ce->add_option("--margin", ce.margin)->capture_default_str();
  s_ce->add_option("--r-min", ce.r_min)->capture_default_str();
  s_ce->add_option("--r-cap", ce.r_cap)->capture_default_str();
  s_ce->add_option("--count", ce.count)->capture_default_str();
  s_ce->add_option("--points", ce.points)->capture_default_str();
  s_ce->add_option("--seed", ce.seed)->capture_default_str();
  add_common(s_ce, ce.common);
  s_ce->callback(guard([&ce] { return run_counterexample(ce); }));

  CrosscheckOpts cc;
  CLI::App* s_cc = app.add_subcommand(
      "crosscheck", "grid solver vs the closed-form sector solution");
  s_cc->add_option("--A", cc.A)->capture_default_str();
  s_cc->add_option("--alpha", cc.alpha)->capture_default_str();
  s_cc->add_option("--shift", cc.shift)->capture_default_str();
  s_cc->add_option("--s0", cc.s0)->capture_default_str();
  s_cc->add_option("--s1", cc.s1)->capture_default_str();
  s_cc->add_option("--r-in", cc.r_in)->capture_default_str();
  s_cc->add_option("--r-out", cc.r_out)->capture_default_str();
  s_cc->add_option("--half-angle", cc.half_angle)->capture_default_str();
  s_cc->add_option("--nr", cc.nr)->capture_default_str();
  s_cc->add_option("--nw", cc.nw)->capture_default_str();
  s_cc->add_option("--steps", cc.steps)->capture_default_str();
  s_cc->add_option("--scheme", cc.scheme, "cn or be")->capture_default_str();
  add_common(s_cc, cc.common);
  s_cc->callback(guard([&cc] { return run_crosscheck(cc); }));

  DecayOpts dc;
  CLI::App* s_dc = app.add_subcommand(
      "decay", "radial solver decay law with envelope fit");
  s_dc->add_option("--dim", dc.dim)->capture_default_str();
  s_dc->add_option("--r-list", dc.r_list)->capture_default_str();
  s_dc->add_option("--nr", dc.nr)->capture_default_str();
  s_dc->add_option("--steps", dc.steps)->capture_default_str();
  s_dc->add_option("--t-lo-frac", dc.t_lo_frac)->capture_default_str();
  s_dc->add_option("--t-hi-frac", dc.t_hi_frac)->capture_default_str();
  add_common(s_dc, dc.common);
  s_dc->callback(guard([&dc] { return run_decay(dc); }));

  ControlOpts ct;
  CLI::App* s_ct = app.add_subcommand(
      "control", "bounded boundary control of the terminal state");
  s_ct->add_option("--theta-sweep", ct.theta_sweep, "opening angles, degrees")
      ->capture_default_str();
  s_ct->add_option("--r-in", ct.r_in)->capture_default_str();
  s_ct->add_option("--r-out", ct.r_out)->capture_default_str();
  s_ct->add_option("--nr", ct.nr)->capture_default_str();
  s_ct->add_option("--nw", ct.nw)->capture_default_str();
  s_ct->add_option("--dt", ct.dt)->capture_default_str();
  s_ct->add_option("--T", ct.T)->capture_default_str();
  s_ct->add_option("--n-controls", ct.n_controls, "perfect square")
      ->capture_default_str();
  s_ct->add_option("--bound", ct.bound)->capture_default_str();
  s_ct->add_option("--max-iter", ct.max_iter)->capture_default_str();
  add_common(s_ct, ct.common);
  s_ct->callback(guard([&ct] { return run_control(ct); }));

  GCheckOpts gc;
  CLI::App* s_gc = app.add_subcommand(
      "g-check", "monotonicity certificate for the decay transfer");
  s_gc->add_option("--beta", gc.beta)->capture_default_str();
  s_gc->add_option("--rho", gc.rho)->capture_default_str();
  s_gc->add_option("--grid", gc.grid)->capture_default_str();
  s_gc->add_flag("--expect-violation", gc.expect_violation,
                 "exit 0 when the certificate fails (demonstration mode)");
  add_common(s_gc, gc.common);
  s_gc->callback(guard([&gc] { return run_g_check(gc); }));

  // pre-pass: pull --config out of the raw arguments and splice the file's
  // tokens right after the subcommand, so explicit flags override the file
  std::vector<std::string> args;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config") {
      if (i + 1 >= argc) {
        std::cerr << "--config needs a file path\n";
        return kExitFailure;
      }
      config_path = argv[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      args.push_back(arg);
    }
  }
  if (!config_path.empty()) {
    if (args.empty() || args[0].empty() || args[0][0] == '-') {
      std::cerr << "--config requires a subcommand\n";
      return kExitFailure;
    }
    std::vector<std::string> tokens;
    try {
      tokens = config_tokens(config_path);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitFailure;
    }
    args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  }

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return rc;
}
