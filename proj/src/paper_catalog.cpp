// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/paper_catalog.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace so4atom {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::PassAtMu0: return "pass_at_mu_0";
    case CheckStatus::PassAtMu1: return "pass_at_mu_1";
    case CheckStatus::PassAtMu0And1: return "pass_at_mu_0_and_1";
  }
  return "?";
}

bool holds(CheckStatus status, MuPolicy policy) {
  return status == CheckStatus::Pass || (policy == MuPolicy::All && status == CheckStatus::PassAtMu0And1);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"so3", "so4", "inverse", "theorem", "spectrum-algebra"};
  return names;
}

namespace {

std::string file_stem(std::string_view suite) {
  std::string s(suite);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::string canonical_name(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  for (const auto& n : suite_names())
    if (n == s) return n;
  std::string known;
  for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw UsageError("unknown suite '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace

std::string catalog_directory() {
  if (const char* dir = std::getenv("SO4ATOM_DATA_DIR"); dir && *dir) return dir;
#ifdef SO4ATOM_SOURCE_CATALOG_DIR
  return SO4ATOM_SOURCE_CATALOG_DIR;
#else
  return "data/catalog";
#endif
}

Suite load_suite(std::string_view name, CatalogSource source) {
  std::string canon = canonical_name(name);
  std::string stem = file_stem(canon);
  if (source == CatalogSource::Default) {
    const char* dir = std::getenv("SO4ATOM_DATA_DIR");
    source = dir && *dir ? CatalogSource::DataDirectory : CatalogSource::Embedded;
  }
  std::string text;
  std::string origin;
  if (source == CatalogSource::Embedded) {
    const auto& files = detail::embedded_catalog();
    auto it = files.find(stem);
    if (it == files.end()) throw UsageError("suite '" + canon + "' missing from the built-in catalog");
    text = it->second;
    origin = "<built-in>/" + stem + ".ids";
  } else {
    origin = catalog_directory() + "/" + stem + ".ids";
    std::ifstream in(origin);
    if (!in) throw UsageError("cannot read " + origin);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return {canon, parse_identity_file(text, canon)};
  } catch (const SourceError& e) {
    throw UsageError(origin + ":" + describe_error(e, text));
  }
}

std::vector<Suite> builtin_suites(CatalogSource source) {
  std::vector<Suite> out;
  for (const auto& n : suite_names()) out.push_back(load_suite(n, source));
  return out;
}

// --- running -------------------------------------------------------------

SuiteRunner::SuiteRunner(Suite suite) : suite_(std::move(suite)), env_(Environment::from_file(suite_.file)) {}

const CheckSpec& SuiteRunner::check(std::string_view id) const {
  for (const auto& c : suite_.file.checks)
    if (c.id == id) return c;
  throw UsageError("suite '" + suite_.name + "' has no check '" + std::string(id) + "'");
}

namespace {

std::string truncate(std::string s) {
  constexpr std::size_t kMax = 4000;
  if (s.size() > kMax) s = s.substr(0, kMax) + " ...";
  return s;
}

}  // namespace

CheckResult SuiteRunner::run(const CheckSpec& spec, const RunOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  CheckResult res;
  res.suite = suite_.name;
  res.id = spec.id;
  res.expect = spec.expect;
  res.mode = opts.mode.value_or(spec.mode);
  res.mu = opts.mu.value_or(spec.mu);

  Value diff;
  try {
    diff = elaborate_difference(*spec.lhs, *spec.rhs, env_, res.mode);
  } catch (const SourceError& e) {
    throw ElabError("check '" + spec.id + "': " + e.what(), e.span());
  }
  auto at = [&](long mu) { return substitute(diff, SymbolRegistry::kMu, GaussRational(mu)); };
  auto fail_with = [&](const Value& w) {
    res.status = CheckStatus::Fail;
    res.witness = truncate(value_str(w));
  };

  switch (res.mu) {
    case MuPolicy::Symbolic:
      if (is_zero(diff)) {
        res.status = CheckStatus::Pass;
      } else {
        fail_with(diff);
      }
      break;
    case MuPolicy::Zero:
    case MuPolicy::One: {
      Value d = at(res.mu == MuPolicy::Zero ? 0 : 1);
      if (is_zero(d)) {
        res.status = CheckStatus::Pass;
      } else {
        fail_with(d);
      }
      break;
    }
    case MuPolicy::All: {
      if (is_zero(diff)) {
        res.status = CheckStatus::Pass;
        break;
      }
      Value d0 = at(0);
      Value d1 = at(1);
      bool z0 = is_zero(d0);
      bool z1 = is_zero(d1);
      if (z0 && z1) {
        res.status = CheckStatus::PassAtMu0And1;
      } else if (z0) {
        res.status = CheckStatus::PassAtMu0;
      } else if (z1) {
        res.status = CheckStatus::PassAtMu1;
      } else {
        res.status = CheckStatus::Fail;
      }
      res.witness = truncate(value_str(z0 ? (z1 ? diff : d1) : d0));
      break;
    }
  }
  res.ok = holds(res.status, res.mu) == (spec.expect == Expectation::Holds);
  res.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

CheckResult SuiteRunner::run(std::string_view id, const RunOptions& opts) { return run(check(id), opts); }

std::vector<CheckResult> SuiteRunner::run_all(const RunOptions& opts) {
  std::vector<const CheckSpec*> order;
  for (const auto& c : suite_.file.checks) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const CheckSpec* a, const CheckSpec* b) { return a->id < b->id; });
  std::vector<CheckResult> out;
  out.reserve(order.size());
  for (const CheckSpec* c : order) out.push_back(run(*c, opts));
  return out;
}

CheckResult run_check(const Suite& suite, const CheckSpec& spec, const RunOptions& opts) {
  SuiteRunner runner(suite);
  return runner.run(spec, opts);
}

std::vector<CheckResult> run_suite(std::string_view name, const RunOptions& opts) {
  SuiteRunner runner(load_suite(name));
  return runner.run_all(opts);
}

// --- mutations -----------------------------------------------------------

namespace {

bool skip_children(const Ast& a, std::size_t child) {
  if (a.kind == Ast::Kind::BinOp && a.op == '^' && child == 1) return true;
  if (a.kind == Ast::Kind::Apply && a.name == "rpow") return true;
  return false;
}

void collect(const Ast& a, std::vector<LiteralSite>& out) {
  if (a.kind == Ast::Kind::Num) {
    if (sgn(a.num) != 0) out.push_back({out.size(), a.num});
    return;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!skip_children(a, k)) collect(*a.args[k], out);
}

AstPtr rebuild(const Ast& a, std::size_t target, const Rational& value, std::size_t& counter) {
  if (a.kind == Ast::Kind::Num) {
    if (sgn(a.num) != 0 && counter++ == target) return make_num(value, a.span);
    return std::make_shared<const Ast>(a);
  }
  Ast copy = a;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!skip_children(a, k)) copy.args[k] = rebuild(*a.args[k], target, value, counter);
  return std::make_shared<const Ast>(std::move(copy));
}

}  // namespace

std::vector<LiteralSite> mutable_literals(const Ast& ast) {
  std::vector<LiteralSite> out;
  collect(ast, out);
  return out;
}

AstPtr replace_literal(const Ast& ast, std::size_t index, const Rational& value) {
  std::size_t counter = 0;
  AstPtr out = rebuild(ast, index, value, counter);
  if (index >= counter) throw UsageError("literal index out of range");
  return out;
}

Mutation seeded_mutation(SuiteRunner& runner, std::uint64_t seed, const RunOptions& opts) {
  std::vector<const CheckSpec*> candidates;
  for (const auto& c : runner.suite().file.checks)
    if (c.expect == Expectation::Holds) candidates.push_back(&c);
  std::sort(candidates.begin(), candidates.end(), [](const CheckSpec* a, const CheckSpec* b) { return a->id < b->id; });
  if (candidates.empty()) throw UsageError("suite '" + runner.suite().name + "' has no holding checks to mutate");
  std::mt19937_64 rng(seed);
  std::size_t start = rng() % candidates.size();
  for (std::size_t step = 0; step < candidates.size(); ++step) {
    const CheckSpec& base = *candidates[(start + step) % candidates.size()];
    MuPolicy policy = opts.mu.value_or(base.mu);
    auto sites = mutable_literals(*base.rhs);
    std::size_t offset = sites.empty() ? 0 : rng() % sites.size();
    auto rejected = [&](CheckSpec& m) { return !holds(runner.run(m, opts).status, policy); };
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const LiteralSite& s = sites[(offset + k) % sites.size()];
      Rational v = s.value == 1 ? Rational(2) : Rational(s.value - 1);
      CheckSpec m = base;
      m.id = base.id + "~mut";
      m.rhs = replace_literal(*base.rhs, s.index, v);
      if (rejected(m))
        return {base.id, m, "rhs literal " + s.value.get_str() + " -> " + v.get_str() + " in " + base.id};
    }
    // No literal edit changes the identity: add a small extra term instead.
    Value lhs = elaborate(*base.lhs, runner.environment(), opts.mode.value_or(base.mode));
    AstPtr extra;
    switch (shape_of(lhs)) {
      case Shape::Scalar: extra = make_index(make_vec("r"), Axis::X); break;
      case Shape::Vector: extra = make_vec("r"); break;
      case Shape::Matrix: extra = make_apply("delta", {make_num(1)}); break;
    }
    CheckSpec m = base;
    m.id = base.id + "~mut";
    m.rhs = make_binop('+', base.rhs, make_binop('*', make_num(make_rational(1, 3)), extra));
    if (rejected(m)) return {base.id, m, "added (1/3)*" + pretty(*extra) + " to rhs of " + base.id};
  }
  throw Error("no effective mutation found in suite '" + runner.suite().name + "'");
}

}  // namespace so4atom
