// Command-line driver. Exit codes: 0 success, 1 usage or failed check,
// 2 solver did not converge, 3 invalid configuration.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kc/constants.hpp"
#include "kc/core.hpp"
#include "kc/error.hpp"
#include "kc/fiber.hpp"
#include "kc/io.hpp"
#include "kc/minimizer.hpp"
#include "kc/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kFailed = 1, kNotConverged = 2, kInvalid = 3;

struct Options {
  std::string config;
  std::string mu, nu;
  std::optional<int> n;
  std::optional<double> L;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::string out_dir = "out";
  int jobs = 1;
  // fiber-scan
  double t_min = 1e-2, t_max = 1e2;
  std::size_t count = 2001;
  // verify
  std::string fields;
  // constants
  std::optional<double> alpha;
};

std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw kc::ConfigError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (out.empty())
    throw kc::ConfigError(std::string(flag) + ": empty list");
  return out;
}

double parse_single(const std::string& s, const char* flag) {
  const auto v = parse_list(s, flag);
  if (v.size() != 1)
    throw kc::ConfigError(std::string(flag) + " takes one value here");
  return v.front();
}

// Config file plus flag overrides.
struct Setup {
  kc::ModelParams params;
  kc::Grid grid;
  kc::SolverConfig solver;
  json raw;
};

Setup load(const Options& o, bool need_config) {
  Setup s;
  if (!o.config.empty())
    s.raw = kc::read_json_file(o.config);
  else if (need_config)
    throw kc::ConfigError("--config is required");
  else
    s.raw = json::object();
  if (!s.raw.is_object())
    throw kc::ConfigError("config must be a JSON object");

  s.params = kc::params_from_json(s.raw.value("params", json::object()));
  if (!o.mu.empty() && o.mu.find(',') == std::string::npos)
    s.params.mu = parse_single(o.mu, "--mu");
  if (!o.nu.empty() && o.nu.find(',') == std::string::npos)
    s.params.nu = parse_single(o.nu, "--nu");
  if (o.alpha)
    s.params.alpha = *o.alpha;

  const json g = s.raw.value("grid", json::object());
  int n = 64;
  double L = 8.0;
  try {
    n = g.value("n", n);
    L = g.value("L", L);
  } catch (const json::exception& e) {
    throw kc::ConfigError(std::string("grid: ") + e.what());
  }
  s.grid = kc::make_grid(o.n.value_or(n), o.L.value_or(L));

  s.solver = kc::config_from_json(s.raw.value("solver", json::object()));
  if (o.seed)
    s.solver.seed = *o.seed;
  if (o.max_iters)
    s.solver.max_iters = *o.max_iters;
  if (o.tol)
    s.solver.grad_tol = *o.tol;
  s.solver.validate();
  return s;
}

json grid_json(const kc::Grid& g) { return {{"n", g.n}, {"L", g.L}}; }

json result_json(const Setup& s, const kc::GroundStateResult& r, const kc::VerificationReport& rep) {
  return {{"params", kc::params_to_json(s.params)},
          {"regime", std::string(kc::to_string(kc::validate_params(s.params)))},
          {"grid", grid_json(s.grid)},
          {"solver", kc::config_to_json(s.solver)},
          {"converged", r.converged},
          {"stationary", r.stationary},
          {"stop_reason", r.stop_reason},
          {"iterations", r.iterations},
          {"m", r.m},
          {"t_star", r.t_star},
          {"residuals", kc::residuals_to_json(r.residuals)},
          {"functionals", kc::diagnostics_json(s.params, r.breakdown,
                                               kc::nehari(s.params, r.breakdown))},
          {"verification", kc::report_to_json(rep)}};
}

int cmd_validate(const Options& o) {
  const Setup s = load(o, true);
  const kc::ExponentRegime r = kc::validate_params(s.params);
  std::cout << "ok: regime " << kc::to_string(r) << ", p = " << s.params.p()
            << ", q = " << s.params.q() << ", delta = " << s.params.delta() << '\n';
  return kOk;
}

int cmd_solve(const Options& o) {
  const Setup s = load(o, true);
  kc::validate_params(s.params);
  const kc::RieszOperator op = kc::build_riesz(s.grid, s.params.alpha);
  const kc::GroundStateResult r = kc::minimize_ground_state(s.params, op, s.solver);
  const kc::VerificationReport rep = kc::verify_solution(s.params, op, r, s.solver);

  const fs::path out = o.out_dir;
  kc::write_json_file(out / "summary.json", result_json(s, r, rep));
  kc::write_iterations_csv(out / "iterations.csv", r.history);
  kc::write_field(out / "fields" / "u.bin", r.pair.u, s.params.alpha);
  kc::write_field(out / "fields" / "v.bin", r.pair.v, s.params.alpha);
  std::cout << (r.converged ? "converged" : "not converged") << " after " << r.iterations
            << " iterations (" << r.stop_reason << "): m = " << r.m << '\n';
  return r.converged ? kOk : kNotConverged;
}

int cmd_sweep(const Options& o) {
  Setup s = load(o, true);
  const bool over_mu = o.mu.find(',') != std::string::npos ||
                       (o.nu.find(',') == std::string::npos && s.raw.contains("sweep") &&
                        s.raw["sweep"].contains("mu"));
  std::vector<double> values;
  if (over_mu)
    values = o.mu.find(',') != std::string::npos ? parse_list(o.mu, "--mu")
                                                  : s.raw["sweep"]["mu"].get<std::vector<double>>();
  else if (o.nu.find(',') != std::string::npos)
    values = parse_list(o.nu, "--nu");
  else if (s.raw.contains("sweep") && s.raw["sweep"].contains("nu"))
    values = s.raw["sweep"]["nu"].get<std::vector<double>>();
  else
    throw kc::ConfigError("sweep needs a list: --mu a,b,c or --nu a,b,c");

  const auto points = over_mu ? kc::sweep_mu(s.params, s.grid, s.solver, values, o.jobs)
                              : kc::sweep_nu(s.params, s.grid, s.solver, values, o.jobs);
  const fs::path out = o.out_dir;
  kc::write_sweep_csv(out / "sweep.csv", points);
  json rows = json::array();
  bool all = true;
  for (const kc::SweepPoint& p : points) {
    rows.push_back({{"mu", p.mu},
                    {"nu", p.nu},
                    {"m", p.m},
                    {"converged", p.converged},
                    {"stationary", p.stationary},
                    {"iterations", p.iterations},
                    {"stop_reason", p.result.stop_reason}});
    all = all && p.converged;
    std::cout << "mu = " << p.mu << ", nu = " << p.nu << ": m = " << p.m
              << (p.converged ? "" : " (not converged)") << '\n';
  }
  kc::write_json_file(out / "summary.json", {{"params", kc::params_to_json(s.params)},
                                             {"grid", grid_json(s.grid)},
                                             {"solver", kc::config_to_json(s.solver)},
                                             {"sweep", over_mu ? "mu" : "nu"},
                                             {"points", rows}});
  return all ? kOk : kNotConverged;
}

int cmd_constants(const Options& o) {
  Options oo = o;
  if (!oo.n)
    oo.n = 64;
  if (!oo.L)
    oo.L = 12.0;
  const Setup s = load(oo, false);
  const double alpha = s.params.alpha;
  const auto sob = kc::estimate_sobolev(s.grid);
  const auto up = kc::estimate_S_star(s.grid, alpha);
  const auto low = kc::estimate_S_lower(s.grid, alpha);

  json thresholds = json::object();
  if (!o.config.empty()) {
    const kc::ExponentRegime r = kc::validate_params(s.params);
    if (r == kc::ExponentRegime::UpperHalfCritical)
      thresholds["upper"] = kc::threshold_upper(s.params, up.value);
    if (r == kc::ExponentRegime::LowerHalfCritical) {
      const auto t = kc::threshold_lower(s.params, low.value);
      thresholds["lower_exponent_3"] = t.with_exponent_3;
      thresholds["lower_exponent_alpha"] = t.with_exponent_alpha;
    }
  }
  json trend = {{"S3", kc::estimate_to_json(sob)["refinement_trend"]},
                {"S_star", kc::estimate_to_json(up)["refinement_trend"]},
                {"S_lower", kc::estimate_to_json(low)["refinement_trend"]}};
  const json out = {{"grid", grid_json(s.grid)},
                    {"alpha", alpha},
                    {"S3", kc::estimate_to_json(sob)},
                    {"S3_closed_form", kc::talenti_constant()},
                    {"S_star", kc::estimate_to_json(up)},
                    {"S_lower", kc::estimate_to_json(low)},
                    {"thresholds", thresholds},
                    {"refinement_trend", trend}};
  kc::write_json_file(fs::path(o.out_dir) / "constants.json", out);
  std::cout << "S3 ~ " << sob.value << " (closed form " << kc::talenti_constant() << "), S* ~ "
            << up.value << ", S_* ~ " << low.value << '\n';
  return kOk;
}

int cmd_verify(const Options& o) {
  const Setup s = load(o, true);
  kc::validate_params(s.params);
  const fs::path dir = o.fields.empty() ? fs::path(o.out_dir) / "fields" : fs::path(o.fields);
  kc::GroundStateResult r;
  r.pair = {kc::read_field(dir / "u.bin"), kc::read_field(dir / "v.bin")};
  kc::require_same_grid(r.pair.u, r.pair.v);
  const kc::RieszOperator op = kc::build_riesz(r.pair.u.grid(), s.params.alpha);
  const kc::VerificationReport rep = kc::verify_solution(s.params, op, r, s.solver);
  kc::write_json_file(fs::path(o.out_dir) / "verify.json", kc::report_to_json(rep));
  for (const kc::Check& c : rep.checks)
    std::cout << (c.passed ? "pass " : "FAIL ") << c.name << ": " << c.value << " (bound "
              << c.bound << ")\n";
  return rep.all_passed() ? kOk : kFailed;
}

int cmd_fiber_scan(const Options& o) {
  const Setup s = load(o, true);
  kc::validate_params(s.params);
  const kc::RieszOperator op = kc::build_riesz(s.grid, s.params.alpha);
  kc::FieldPair pair;
  if (!o.fields.empty())
    pair = {kc::read_field(fs::path(o.fields) / "u.bin"), kc::read_field(fs::path(o.fields) / "v.bin")};
  else
    pair = kc::initial_pair(s.params, op, s.solver);
  const kc::Breakdown bd = kc::breakdown(s.params, op, pair);
  const kc::FiberPolynomial poly = kc::fiber_polynomial(s.params, bd);
  const kc::FiberScan scan = kc::fiber_scan(poly, o.t_min, o.t_max, o.count);
  const double t_star = kc::solve_fiber_max(poly);

  const fs::path out = o.out_dir;
  fs::create_directories(out);
  {
    std::FILE* f = std::fopen((out / "fiber_scan.csv").c_str(), "w");
    if (!f)
      throw kc::ConfigError("cannot write fiber_scan.csv");
    std::fprintf(f, "t,zeta,dzeta\n");
    for (const auto& row : scan.table)
      std::fprintf(f, "%.17g,%.17g,%.17g\n", row.t, row.zeta, row.dzeta);
    std::fclose(f);
  }
  kc::write_json_file(out / "fiber_scan.json", {{"c4", poly.c4},
                                                {"c8", poly.c8},
                                                {"cp", poly.cp},
                                                {"cq", poly.cq},
                                                {"ep", poly.ep},
                                                {"eq", poly.eq},
                                                {"scan_argmax", scan.argmax},
                                                {"sign_changes", scan.sign_changes},
                                                {"t_star", t_star}});
  std::cout << "t* = " << t_star << ", scan argmax = " << scan.argmax << ", sign changes "
            << scan.sign_changes << '\n';
  return kOk;
}

int cmd_oracle_test(const Options& o) {
  const auto checks = kc::run_oracle_certification(o.seed.value_or(1));
  bool all = true;
  for (const kc::Check& c : checks) {
    std::cout << (c.passed ? "pass " : "FAIL ") << c.name << ": " << c.value << " (bound "
              << c.bound << ")\n";
    all = all && c.passed;
  }
  kc::write_json_file(fs::path(o.out_dir) / "oracle.json",
                      {{"all_passed", all}, {"checks", kc::checks_to_json(checks)}});
  return all ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kirchhoff-Choquard ground states on a periodic box"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool solver_flags) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--n", o.n, "grid points per axis");
    sub->add_option("--L", o.L, "box half-length");
    sub->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
    if (solver_flags) {
      sub->add_option("--mu", o.mu, "mu (comma list for sweep)");
      sub->add_option("--nu", o.nu, "nu (comma list for sweep)");
      sub->add_option("--seed", o.seed, "initial-guess seed");
      sub->add_option("--max-iters", o.max_iters, "iteration limit");
      sub->add_option("--tol", o.tol, "strong residual tolerance (relative)");
      sub->add_option("--jobs", o.jobs, "concurrent solves in a sweep")->check(CLI::PositiveNumber);
    }
  };

  auto* validate = app.add_subcommand("validate", "check a config and print its regime");
  common(validate, true);
  auto* solve = app.add_subcommand("solve", "compute a ground state");
  common(solve, true);
  auto* sweep = app.add_subcommand("sweep", "ground-state level over a list of mu or nu");
  common(sweep, true);
  auto* constants = app.add_subcommand("constants", "estimate S3, S* and S_*");
  common(constants, false);
  constants->add_option("--alpha", o.alpha, "Riesz order (overrides the config)");
  auto* verify = app.add_subcommand("verify", "residual certificate for stored fields");
  common(verify, true);
  verify->add_option("--fields", o.fields, "directory holding u.bin and v.bin");
  auto* fiber = app.add_subcommand("fiber-scan", "dense scan of the fiber map");
  common(fiber, true);
  fiber->add_option("--fields", o.fields, "directory holding u.bin and v.bin");
  fiber->add_option("--t-min", o.t_min)->capture_default_str();
  fiber->add_option("--t-max", o.t_max)->capture_default_str();
  fiber->add_option("--count", o.count)->capture_default_str();
  auto* oracle = app.add_subcommand("oracle-test", "certify fast paths against oracles");
  oracle->add_option("--seed", o.seed, "random seed");
  oracle->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    std::cerr << "usage error: " << e.what() << '\n';
    return kFailed;
  }

  try {
    if (*validate)
      return cmd_validate(o);
    if (*solve)
      return cmd_solve(o);
    if (*sweep)
      return cmd_sweep(o);
    if (*constants)
      return cmd_constants(o);
    if (*verify)
      return cmd_verify(o);
    if (*fiber)
      return cmd_fiber_scan(o);
    if (*oracle)
      return cmd_oracle_test(o);
  } catch (const kc::RangeError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const kc::CouplingError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const kc::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const kc::RegimeError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kFailed;
}
