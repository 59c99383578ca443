// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Laurent-ansatz potentials: builds the operator constraints for an unknown
// radial function, solves them exactly, and re-verifies every solution.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "so4atom/operator_algebra.hpp"

namespace so4atom {

/// Unknown radial function sum_n c_n r^n (+ sum_m b_m r^m (r.S) in spin mode).
struct LaurentAnsatz {
  std::vector<int> scalar_part;
  std::vector<int> spin_part;
};

/// Inclusive exponent range lo..hi.
std::vector<int> exponent_window(int lo, int hi);

struct Unknown {
  std::string name;  // e.g. c_m1, a_0, b_m2
  SymbolId id;
  int exponent;
  bool spin;  // multiplies (r.S)
};

/// Linear form sum_j coeffs[j] * unknown_j collected from one canonical
/// monomial of the residual. `nonlinear` keeps the terms of other degree in the
/// unknowns; it is zero for a linear system.
struct ConstraintRow {
  std::string label;
  std::vector<ScalarCoeff> coeffs;
  ScalarCoeff nonlinear;
};

/// Operator residual as a function of the unknown coefficients.
using ResidualBuilder = std::function<VecExpr(const std::vector<ScalarCoeff>&)>;

struct ConstraintSystem {
  std::string name;
  std::shared_ptr<SymbolRegistry> registry;
  std::vector<Unknown> unknowns;
  std::vector<ConstraintRow> rows;
  ResidualBuilder residual;

  bool is_linear() const;
  /// Unknowns as symbols: the generic coefficient vector.
  std::vector<ScalarCoeff> symbolic_coefficients() const;
};

struct SolutionSpace {
  /// Basis vectors over the unknowns, coefficients exact over the remaining symbols.
  std::vector<std::vector<ScalarCoeff>> basis;
  /// Every basis vector substituted into the operator residual gives exact zero.
  bool verified = false;
  /// "nullspace" for linear systems, "exponent-scan" otherwise.
  std::string method;

  std::size_t dimension() const { return basis.size(); }
};

/// [R, H] with R = (p x l - l x p)/2M + f r and H = p^2/2M + (r f' + 3 f)/2.
/// The ansatz must have no spin part.
ConstraintSystem build_inverse_constraints(const LaurentAnsatz& ansatz);

/// [Pi, h] - i hbar (r/r^2) h at mu = 1 in abstract spin mode, with
/// Pi = p - (r x S)/r^2 and h = sum a_n r^n + sum b_m r^m (r.S).
ConstraintSystem build_spin_constraints(const LaurentAnsatz& ansatz);

/// Exact solution space. Linear systems use fraction-free Gauss-Jordan
/// elimination; a system with nonlinear rows falls back to a single-exponent
/// scan with a pairwise check.
SolutionSpace solve(const ConstraintSystem& system);

/// Substitutes `coefficients` into the operator residual and tests for zero.
bool verify_solution(const ConstraintSystem& system, const std::vector<ScalarCoeff>& coefficients);

/// True when the space has exactly one basis vector per name in `names` and
/// every basis vector is supported on those unknowns.
bool spans_exactly(const SolutionSpace& space, const ConstraintSystem& system, const std::vector<std::string>& names);

/// True when the two spaces (over the same unknowns) span the same subspace.
bool same_span(const SolutionSpace& a, const SolutionSpace& b);

/// Human-readable basis, e.g. "span{c_m1}" or "span{a_m1, b_m2}".
std::string describe(const SolutionSpace& space, const ConstraintSystem& system);

/// Builds the system for one ansatz; used by the scans below.
using SystemFactory = std::function<ConstraintSystem(const LaurentAnsatz&)>;

struct ExponentScan {
  struct Single {
    Unknown unknown;
    bool admissible;  // the one-term system has a nonzero solution
  };
  struct Pair {
    std::string a, b;
    std::size_t dimension;
    bool consistent;  // dimension equals the number of admissible singles in the pair
  };
  std::vector<Single> singles;
  std::vector<Pair> pairs;

  /// Names of admissible single terms.
  std::vector<std::string> admissible() const;
  bool pairs_consistent() const;
};

/// Solves every one-term and two-term sub-ansatz of `ansatz`.
ExponentScan scan_exponents(const LaurentAnsatz& ansatz, const SystemFactory& factory);

/// The three separate conditions on f whose conjunction conserves R:
/// grad(V - f) = 0, (grad V).r + f = 0 and laplacian f = 0.
struct SubConditionReport {
  struct Condition {
    std::string name;
    std::string solution;
    std::size_t dimension;
  };
  std::vector<Condition> conditions;
  /// Solution of all three conditions together.
  std::string combined;
  /// Solution of the full [R, H] residual.
  std::string residual;
  /// The combined conditions and the residual have the same solution span.
  bool agrees = false;
};

SubConditionReport inverse_subconditions(const LaurentAnsatz& ansatz);

}  // namespace so4atom
