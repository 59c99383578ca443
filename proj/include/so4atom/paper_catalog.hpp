// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Identity suites: loading, exact verification under a mu policy, and seeded
// coefficient mutations.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "so4atom/expr_language.hpp"

namespace so4atom {

enum class CheckStatus { Pass, Fail, PassAtMu0, PassAtMu1, PassAtMu0And1 };

const char* to_string(CheckStatus s);

struct CheckResult {
  std::string suite;
  std::string id;
  CheckStatus status = CheckStatus::Fail;
  Expectation expect = Expectation::Holds;
  SpinMode mode = SpinMode::Abstract;
  MuPolicy mu = MuPolicy::Symbolic;
  /// Status agrees with the expectation.
  bool ok = false;
  /// Canonical nonzero difference lhs - rhs in the first failing regime.
  std::string witness;
  double elapsed_ms = 0;
};

/// True when `status` counts as the identity holding under `policy`.
bool holds(CheckStatus status, MuPolicy policy);

struct Suite {
  std::string name;
  IdentityFile file;
};

enum class CatalogSource { Default, Embedded, DataDirectory };

/// Suite names in canonical order.
const std::vector<std::string>& suite_names();

/// Directory searched for `<suite>.ids` when reading from disk: the
/// SO4ATOM_DATA_DIR environment variable, else the source tree's catalog.
std::string catalog_directory();

/// Loads one suite. Default reads SO4ATOM_DATA_DIR when set and the
/// compiled-in copy otherwise. Unknown names raise UsageError.
Suite load_suite(std::string_view name, CatalogSource source = CatalogSource::Default);

/// Every suite with its checks.
std::vector<Suite> builtin_suites(CatalogSource source = CatalogSource::Default);

struct RunOptions {
  /// Replaces every check's spin mode when set.
  std::optional<SpinMode> mode;
  /// Replaces every check's mu policy when set.
  std::optional<MuPolicy> mu;
};

/// Evaluates checks of one suite, sharing elaborated bindings between them.
class SuiteRunner {
 public:
  explicit SuiteRunner(Suite suite);

  const Suite& suite() const { return suite_; }
  Environment& environment() { return env_; }

  CheckResult run(const CheckSpec& spec, const RunOptions& opts = {});
  CheckResult run(std::string_view id, const RunOptions& opts = {});
  /// All checks, ordered by id.
  std::vector<CheckResult> run_all(const RunOptions& opts = {});

  const CheckSpec& check(std::string_view id) const;

 private:
  Suite suite_;
  Environment env_;
};

CheckResult run_check(const Suite& suite, const CheckSpec& spec, const RunOptions& opts = {});
std::vector<CheckResult> run_suite(std::string_view name, const RunOptions& opts = {});

/// A numeric literal of a check's right-hand side.
struct LiteralSite {
  std::size_t index;  // preorder position among mutable literals
  Rational value;
};

/// Literals of `ast` that scale terms (exponents and function arguments excluded).
std::vector<LiteralSite> mutable_literals(const Ast& ast);

/// Copy of `ast` with the literal at `index` replaced by `value`.
AstPtr replace_literal(const Ast& ast, std::size_t index, const Rational& value);

struct Mutation {
  std::string check_id;
  CheckSpec spec;
  std::string description;
};

/// A deterministic coefficient mutation of a holding check in `suite` that the
/// engine rejects. The check is picked by `seed`; literal edits are tried first
/// and an added (1/3) term is the fallback.
Mutation seeded_mutation(SuiteRunner& runner, std::uint64_t seed, const RunOptions& opts = {});

/// A catalog binding rebuilt directly from the operator algebra, independent
/// of the identity-file parser. Used to cross-check the shipped definitions.
struct Definition {
  std::string name;
  std::string suite;
  std::string summary;
  Value value;
};

/// C++ constructions of the main catalog bindings (H, R, A, Pi, J, h, V, Hs,
/// calR, Sr), in the suites that define them.
std::vector<Definition> reference_definitions(const SymbolRegistry& reg, SpinMode mode);

namespace detail {
const std::map<std::string, std::string>& embedded_catalog();
}  // namespace detail

}  // namespace so4atom
