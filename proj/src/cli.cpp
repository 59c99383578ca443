// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "so4atom/ansatz_solver.hpp"
#include "so4atom/numeric_oracle.hpp"

#ifndef SO4ATOM_VERSION
#define SO4ATOM_VERSION "0.0.0"
#endif

namespace so4atom {

namespace {

using Clock = std::chrono::steady_clock;
using ordered_json = nlohmann::ordered_json;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const std::vector<std::string> kCommands = {"verify", "oracle", "inverse", "spin-potential", "spectrum", "all"};

MuPolicy parse_mu(const std::string& s) {
  if (s == "symbolic") return MuPolicy::Symbolic;
  if (s == "0") return MuPolicy::Zero;
  if (s == "1") return MuPolicy::One;
  if (s == "all") return MuPolicy::All;
  throw UsageError("--mu must be symbolic, 0, 1 or all, got '" + s + "'");
}

SpinMode parse_spin(const std::string& s) {
  if (s == "abstract") return SpinMode::Abstract;
  if (s == "half") return SpinMode::SpinHalf;
  throw UsageError("--spin must be abstract or half, got '" + s + "'");
}

std::vector<int> parse_window(const std::string& flag, const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(flag + " must look like lo:hi, got '" + text + "'");
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    int lo = std::stoi(text.substr(0, colon), &used_lo);
    int hi = std::stoi(text.substr(colon + 1), &used_hi);
    if (used_lo != colon || used_hi != text.size() - colon - 1) throw std::invalid_argument("trailing");
    return exponent_window(lo, hi);
  } catch (const std::logic_error&) {
    throw UsageError(flag + " must look like lo:hi, got '" + text + "'");
  }
}

std::vector<std::string> selected_suites(const RunConfig& c) {
  if (c.suites.empty()) return suite_names();
  std::vector<std::string> out;
  for (const auto& name : suite_names())
    if (std::find(c.suites.begin(), c.suites.end(), name) != c.suites.end()) out.push_back(name);
  for (const auto& s : c.suites)
    if (std::find(out.begin(), out.end(), s) == out.end()) throw UsageError("unknown suite '" + s + "'");
  return out;
}

RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  if (c.spin) o.mode = parse_spin(*c.spin);
  if (c.mu) o.mu = parse_mu(*c.mu);
  return o;
}

void add_check(Report& r, SuiteSummary& s, ReportCheck c) {
  (c.ok ? s.pass : s.fail) += 1;
  r.checks.push_back(std::move(c));
}

void run_verify(const RunConfig& c, Report& r) {
  RunOptions opts = run_options(c);
  for (const auto& name : selected_suites(c)) {
    auto t0 = Clock::now();
    SuiteSummary summary{"verify " + name};
    SuiteRunner runner(load_suite(name));
    for (const CheckResult& res : runner.run_all(opts)) {
      ReportCheck rc{name + "/" + res.id, to_string(res.status), to_string(res.expect), std::nullopt,
                     std::nullopt, res.elapsed_ms, res.ok};
      if (res.status == CheckStatus::Fail || !res.ok) rc.witness = res.witness;
      add_check(r, summary, std::move(rc));
    }
    summary.elapsed_ms = ms_since(t0);
    r.suites.push_back(summary);
  }
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void run_oracle(const RunConfig& c, Report& r) {
  OracleOptions opts;
  opts.seed = c.seed;
  opts.points_per_state = c.points;
  opts.states = c.states;
  const double tol_pass = c.tol.value_or(1e-8);
  const double tol_fail = 1e-3;
  std::optional<MuPolicy> mu;
  if (c.mu) mu = parse_mu(*c.mu);
  for (const auto& name : selected_suites(c)) {
    auto t0 = Clock::now();
    SuiteSummary summary{"oracle " + name};
    SuiteRunner runner(load_suite(name));
    const IdentityFile& file = runner.suite().file;
    std::vector<CheckSpec> checks = file.checks;
    std::sort(checks.begin(), checks.end(), [](const CheckSpec& a, const CheckSpec& b) { return a.id < b.id; });
    for (CheckSpec spec : checks) {
      if (mu) spec.mu = *mu;
      auto t1 = Clock::now();
      OracleOutcome o = oracle_check(file, spec, opts, tol_pass, tol_fail);
      add_check(r, summary,
                {name + "/" + spec.id, o.ok ? "pass" : "fail", to_string(spec.expect), o.max_rel_residual(),
                 std::nullopt, ms_since(t1), o.ok});
    }
    // One seeded coefficient mutation per suite must be caught numerically.
    auto t1 = Clock::now();
    Mutation m = seeded_mutation(runner, c.seed, run_options(c));
    CheckSpec spec = m.spec;
    spec.expect = Expectation::Fails;
    OracleOutcome o = oracle_check(file, spec, opts, tol_pass, tol_fail);
    add_check(r, summary,
              {name + "/mutation/" + m.check_id, o.ok ? "pass" : "fail", "fails", o.max_rel_residual(),
               m.description, ms_since(t1), o.ok});
    summary.elapsed_ms = ms_since(t0);
    r.suites.push_back(summary);
  }
}

void run_inverse(const RunConfig& c, Report& r) {
  auto t0 = Clock::now();
  SuiteSummary summary{"inverse-problem"};
  LaurentAnsatz ansatz{parse_window("--f-window", c.f_window), {}};
  ConstraintSystem sys = build_inverse_constraints(ansatz);
  SolutionSpace space = solve(sys);
  bool ok = space.verified && spans_exactly(space, sys, {"c_m1"});
  add_check(r, summary,
            {"inverse/solution_span", ok ? "pass" : "fail", std::nullopt, std::nullopt,
             "expected span{c_m1}, found " + describe(space, sys) + " (" + std::to_string(sys.rows.size()) + " constraints, " + space.method + ")",
             ms_since(t0), ok});

  auto t1 = Clock::now();
  SubConditionReport sub = inverse_subconditions(ansatz);
  std::string text;
  for (const auto& cond : sub.conditions) text += cond.name + ": " + cond.solution + "; ";
  text += "combined: " + sub.combined + "; residual: " + sub.residual;
  add_check(r, summary,
            {"inverse/subconditions_agree", sub.agrees ? "pass" : "fail", std::nullopt, std::nullopt, text,
             ms_since(t1), sub.agrees});
  summary.elapsed_ms = ms_since(t0);
  r.suites.push_back(summary);
}

void run_spin_potential(const RunConfig& c, Report& r) {
  auto t0 = Clock::now();
  SuiteSummary summary{"spin-potential"};
  LaurentAnsatz ansatz{parse_window("--xi1-window", c.xi1_window), parse_window("--xi2-window", c.xi2_window)};
  ConstraintSystem sys = build_spin_constraints(ansatz);
  SolutionSpace space = solve(sys);
  bool ok = space.verified && spans_exactly(space, sys, {"a_m1", "b_m2"});
  add_check(r, summary,
            {"spin-potential/solution_span", ok ? "pass" : "fail", std::nullopt, std::nullopt,
             "expected span{a_m1, b_m2}, found " + describe(space, sys) + " (" + std::to_string(sys.rows.size()) + " constraints, " + space.method + ")",
             ms_since(t0), ok});
  summary.elapsed_ms = ms_since(t0);
  r.suites.push_back(summary);
}

std::string fmt_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void run_spectrum(const RunConfig& c, Report& r) {
  std::vector<int> two_js;
  for (const auto& j : c.j.empty() ? std::vector<std::string>{"1/2", "3/2"} : c.j) two_js.push_back(parse_half_integer(j));
  std::vector<double> k2s = c.k2.empty() ? std::vector<double>{0, 0.2, 0.4} : c.k2;
  if (c.levels < 1) throw UsageError("--levels must be positive");
  if (c.rmax <= 0 || c.rmin < 0) throw UsageError("--rmax must be positive and --rmin non-negative");
  const double tol = c.tol.value_or(1e-3);
  for (int two_j : two_js) {
    int mu = two_j % 2 == 0 ? 0 : 1;
    if (c.mu) {
      if (*c.mu != "0" && *c.mu != "1") throw UsageError("spectrum runs need --mu 0 or 1");
      mu = std::stoi(*c.mu);
    }
    // k2 drops out at mu = 0, so one run covers the whole k2 list.
    std::vector<double> k2_list = mu == 0 ? std::vector<double>{0} : k2s;
    for (double k2 : k2_list) {
      auto t0 = Clock::now();
      CouplingParams params;
      params.k1 = c.k1;
      params.k2 = k2;
      params.mu = mu;
      RadialSector sector;
      sector.two_j = two_j;
      sector.mu = mu;
      sector.grid = Grid{c.rmin, c.rmax, c.grid_n};
      SpectrumResult res = study_sector(sector, params, c.levels, tol);
      double worst = 0;
      for (const auto& m : res.matches) worst = std::max(worst, m.rel_error);
      std::string label = "spectrum " + res.sector + " mu=" + std::to_string(mu) + " k1=" + fmt_number(c.k1) +
                          " k2=" + fmt_number(k2);
      std::ostringstream witness;
      witness << res.matches.size() << " matched";
      if (!res.unmatched_computed.empty()) witness << ", " << res.unmatched_computed.size() << " unmatched computed";
      if (!res.unmatched_predicted.empty())
        witness << ", " << res.unmatched_predicted.size() << " unclaimed predicted";
      if (!res.note.empty()) witness << "; " << res.note;
      SuiteSummary summary{label};
      add_check(r, summary,
                {"spectrum/" + res.sector + ",mu=" + std::to_string(mu) + ",k1=" + fmt_number(c.k1) +
                     ",k2=" + fmt_number(k2),
                 res.pass ? "pass" : "fail", std::nullopt, worst, witness.str(), ms_since(t0), res.pass});
      summary.elapsed_ms = ms_since(t0);
      r.suites.push_back(summary);
      r.spectra.push_back(std::move(res));
    }
  }
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["suites"] = c.suites;
  j["mu"] = c.mu ? ordered_json(*c.mu) : ordered_json(nullptr);
  j["spin"] = c.spin ? ordered_json(*c.spin) : ordered_json(nullptr);
  j["seed"] = c.seed;
  j["points"] = c.points;
  j["states"] = c.states;
  j["tol"] = c.tol ? ordered_json(*c.tol) : ordered_json(nullptr);
  j["j"] = c.j;
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["grid_n"] = c.grid_n;
  j["rmin"] = c.rmin;
  j["rmax"] = c.rmax;
  j["levels"] = c.levels;
  j["format"] = report_format(c);
  j["f_window"] = c.f_window;
  j["xi1_window"] = c.xi1_window;
  j["xi2_window"] = c.xi2_window;
  return j;
}

std::string md_cell(std::string s) {
  std::string out;
  for (char ch : s) {
    if (ch == '|') out += "\\|";
    else if (ch == '\n') out += ' ';
    else out += ch;
  }
  return out;
}

}  // namespace

int parse_half_integer(const std::string& text) {
  try {
    std::size_t used = 0;
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      int v = std::stoi(text, &used);
      if (used != text.size() || v < 0) throw std::invalid_argument("bad");
      return 2 * v;
    }
    if (text.substr(slash + 1) != "2") throw std::invalid_argument("bad");
    int num = std::stoi(text.substr(0, slash), &used);
    if (used != slash || num < 0 || num % 2 == 0) throw std::invalid_argument("bad");
    return num;
  } catch (const std::logic_error&) {
    throw UsageError("expected a non-negative half-integer such as 1/2 or 2, got '" + text + "'");
  }
}

int Report::pass_count() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const ReportCheck& c) { return c.ok; }));
}

int Report::fail_count() const { return static_cast<int>(checks.size()) - pass_count(); }

std::string report_format(const RunConfig& config) {
  if (!config.format.empty()) return config.format;
  return config.command == "spectrum" ? "csv" : "json";
}

Report execute(const RunConfig& config) {
  if (std::find(kCommands.begin(), kCommands.end(), config.command) == kCommands.end())
    throw UsageError("unknown command '" + config.command + "'");
  const std::string format = report_format(config);
  if (format != "json" && format != "md" && format != "csv")
    throw UsageError("--format must be json, md or csv");
  if (format == "csv" && config.command != "spectrum")
    throw UsageError("CSV reports are only available for the spectrum command");
  if (config.mu) parse_mu(*config.mu);
  if (config.spin) parse_spin(*config.spin);
  if (config.points < 1 || config.states < 1) throw UsageError("--points and --states must be positive");
  selected_suites(config);

  Report r;
  r.command = config.command;
  r.config = config;
  const std::string& cmd = config.command;
  const bool all = cmd == "all";
  if (all || cmd == "verify") run_verify(config, r);
  if (all || cmd == "oracle") run_oracle(config, r);
  if (all || cmd == "inverse") run_inverse(config, r);
  if (all || cmd == "spin-potential") run_spin_potential(config, r);
  if (all || cmd == "spectrum") run_spectrum(config, r);
  return r;
}

std::string render_report(const Report& r, const std::string& format) {
  if (format == "csv") return spectrum_csv(r.spectra);
  if (format == "json") {
    ordered_json j;
    j["tool_version"] = SO4ATOM_VERSION;
    j["command"] = r.command;
    j["config"] = config_json(r.config);
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
      ordered_json e;
      e["id"] = c.id;
      e["status"] = c.status;
      if (c.expect) e["expect"] = *c.expect;
      e["ok"] = c.ok;
      if (c.residual) e["residual"] = *c.residual;
      if (c.witness) e["witness_text"] = *c.witness;
      e["elapsed_ms"] = c.elapsed_ms;
      checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["summary"] = {{"pass", r.pass_count()}, {"fail", r.fail_count()}};
    return j.dump(2) + "\n";
  }
  if (format == "md") {
    std::ostringstream os;
    os << "# so4atom report\n\n";
    os << "- tool_version: " << SO4ATOM_VERSION << "\n- command: " << r.command << "\n\n## Config\n\n";
    os << "| key | value |\n|---|---|\n";
    const ordered_json config = config_json(r.config);
    for (const auto& [k, v] : config.items()) os << "| " << k << " | " << md_cell(v.dump()) << " |\n";
    os << "\n## Checks\n\n| id | status | expect | ok | residual | elapsed_ms | witness |\n|---|---|---|---|---|---|---|\n";
    for (const auto& c : r.checks) {
      os << "| " << md_cell(c.id) << " | " << c.status << " | " << c.expect.value_or("") << " | "
         << (c.ok ? "yes" : "no") << " | " << (c.residual ? sci(*c.residual) : "") << " | "
         << sci(c.elapsed_ms) << " | " << md_cell(c.witness.value_or("")) << " |\n";
    }
    os << "\n## Summary\n\n- pass: " << r.pass_count() << "\n- fail: " << r.fail_count() << "\n";
    return os.str();
  }
  throw UsageError("unknown report format '" + format + "'");
}

void emit_report(const Report& report, const std::string& format, const std::string& path, std::ostream& fallback) {
  std::string text = render_report(report, format);
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write report to '" + path + "'");
  f << text;
  if (!f) throw UsageError("cannot write report to '" + path + "'");
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string mu;
  std::string spin;
  double tol = 0;
  CLI::App app{"Exact and numerical checks of the spin-dependent hydrogen atom algebra.", "so4atom"};
  app.add_option("command", cfg.command, "verify | oracle | inverse | spin-potential | spectrum | all")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--suite", cfg.suites, "Suites to run, comma separated (default: all)")->delimiter(',');
  app.add_option("--mu", mu, "mu policy override: symbolic, 0, 1 or all");
  app.add_option("--spin", spin, "Spin mode override: abstract or half");
  app.add_option("--seed", cfg.seed, "Oracle seed")->capture_default_str();
  app.add_option("--points", cfg.points, "Oracle points per state")->capture_default_str();
  app.add_option("--states", cfg.states, "Oracle test states")->capture_default_str();
  auto* tol_opt = app.add_option("--tol", tol, "Oracle pass tolerance (1e-8) or spectrum match tolerance (1e-3)");
  app.add_option("--j", cfg.j, "Spectrum sectors, e.g. 1/2,3/2 (integers select mu = 0)")->delimiter(',');
  app.add_option("--k1", cfg.k1, "Coulomb strength k1")->capture_default_str();
  app.add_option("--k2", cfg.k2, "Spin potential strengths k2, comma separated (default 0,0.2,0.4)")
      ->delimiter(',');
  app.add_option("--grid-n", cfg.grid_n, "Radial grid points")->capture_default_str();
  app.add_option("--rmin", cfg.rmin, "First grid point (0 selects rmax/N)")->capture_default_str();
  app.add_option("--rmax", cfg.rmax, "Radial box size")->capture_default_str();
  app.add_option("--levels", cfg.levels, "Eigenvalues per sector")->capture_default_str();
  app.add_option("--format", cfg.format, "Report format: json, md or csv (default: csv for spectrum, json otherwise)");
  app.add_option("--out", cfg.out, "Report path (default: standard output)");
  app.add_option("--f-window", cfg.f_window, "Inverse-problem exponent window lo:hi")->capture_default_str();
  app.add_option("--xi1-window", cfg.xi1_window, "Spin-potential scalar window lo:hi")->capture_default_str();
  app.add_option("--xi2-window", cfg.xi2_window, "Spin-potential (r.S) window lo:hi")->capture_default_str();
  app.set_config("--config", "", "key=value file; flags take precedence");
  app.allow_config_extras(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::Error& e) {
    err << "so4atom: " << e.what() << "\n";
    return 2;
  }
  if (!mu.empty()) cfg.mu = mu;
  if (!spin.empty()) cfg.spin = spin;
  if (tol_opt->count() > 0) cfg.tol = tol;

  try {
    if (!cfg.out.empty() && !std::ofstream(cfg.out, std::ios::app))
      throw UsageError("cannot write report to '" + cfg.out + "'");
    Report report = execute(cfg);
    // Summaries share stdout with the report only when the report goes to a file.
    std::ostream& summary_stream = cfg.out.empty() ? err : out;
    for (const auto& s : report.suites)
      summary_stream << s.label << ": " << s.pass << " pass, " << s.fail << " fail (" << sci(s.elapsed_ms)
                     << " ms)\n";
    emit_report(report, report_format(cfg), cfg.out, out);
    return report.fail_count() == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "so4atom: " << e.what() << "\n";
    return 2;
  } catch (const SourceError& e) {
    err << "so4atom: catalog error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "so4atom: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace so4atom
