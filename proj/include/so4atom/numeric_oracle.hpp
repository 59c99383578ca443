// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Numerical cross-check of operator identities: operators act on smooth
// spinor test functions through truncated Taylor jets, with p = -i hbar grad,
// r_u and r^m by multiplication and S = (hbar/2) sigma.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "so4atom/expr_language.hpp"
#include "so4atom/operator_algebra.hpp"

namespace so4atom {

using Complex = std::complex<double>;
using Point = std::array<double, 3>;
using Spinor = std::array<Complex, 2>;

/// Truncated multivariate Taylor expansion about a point in three variables.
/// Coefficients are stored in graded order, so a jet of order k is a prefix of
/// any jet of higher order.
class Jet {
 public:
  /// Highest supported truncation order.
  static constexpr int kMaxOrder = 10;

  explicit Jet(int order = 0);
  static Jet constant(int order, Complex c);
  /// The coordinate x_axis expanded about x0.
  static Jet variable(int order, int axis, double x0);

  int order() const { return order_; }
  Complex value() const { return c_[0]; }
  /// Taylor coefficient of d^a_x d^b_y d^c_z (the partial divided by a!b!c!).
  Complex coefficient(int a, int b, int c) const;
  /// Mixed partial derivative d^a_x d^b_y d^c_z at the expansion point.
  Complex partial(int a, int b, int c) const;
  /// Partial derivative in `axis`; the result has order one less.
  Jet derivative(int axis) const;
  /// Copy truncated to `order` (<= order()).
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(Complex s);
  Jet operator-() const;
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator*(Complex s, Jet a) { return a *= s; }
  /// Cauchy product; the order is the smaller of the two.
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  int order_;
  std::vector<Complex> c_;
};

Jet exp(const Jet& g);
/// g^a for a jet with nonzero value.
Jet pow(const Jet& g, double a);

struct SpinorJet {
  std::array<Jet, 2> c;
  int order() const { return std::min(c[0].order(), c[1].order()); }
  Spinor value() const { return {c[0].value(), c[1].value()}; }
};

/// psi_k(x) = exp(-|x - center|^2 / (2 width^2)) * P_k(x) * spinor_k with P_k
/// a complex quadratic. Coefficient order: 1, x, y, z, xx, yy, zz, xy, xz, yz.
struct TestState {
  double width = 1;
  Point center{};
  std::array<std::array<Complex, 10>, 2> poly{};
  Spinor spinor{1, 0};

  /// A Gaussian times a constant spinor.
  static TestState gaussian(double width, Spinor spinor);
  SpinorJet jet(const Point& x, int order) const;
};

struct OracleOptions {
  std::uint64_t seed = 42;
  int states = 5;
  int points_per_state = 20;
  /// Numeric value of mu; identities are evaluated at one regime at a time.
  double mu = 1;
  double shell_min = 0.5;
  double shell_max = 3.0;
  /// Points closer to the origin than guard_factor * width are rejected.
  double guard_factor = 0.3;
  double hbar = 1;
  double mass = 1;
  double kappa = 1;
  double k1 = -1;
  double k2 = 0.2;
  /// Range for the values of other declared symbols.
  double symbol_min = 0.5;
  double symbol_max = 1.5;
};

/// Numeric value of every named symbol: builtins from the options, other
/// names drawn deterministically from (seed, name).
Complex symbol_value(const std::string& name, const OracleOptions& opts);

/// Values indexed by SymbolId, for ScalarCoeff::evaluate.
std::vector<Complex> registry_values(const SymbolRegistry& reg, const OracleOptions& opts);

/// Seeded random test states.
std::vector<TestState> random_states(const OracleOptions& opts);

/// Seeded evaluation points for one state, in the shell and outside the guard.
std::vector<Point> sample_points(const TestState& state, std::uint64_t stream, const OracleOptions& opts);

/// (expr psi)(x) for a normal-ordered expression. `order` must be at least
/// the momentum degree of `expr` and x must respect the state's guard radius.
Spinor apply(const OperatorExpr& expr, const TestState& state, const Point& x, const std::vector<Complex>& values,
             int order, double guard_factor = 0.3);

/// Momentum depth of an expression: the jet order needed to evaluate it.
int momentum_depth(const Ast& ast, const IdentityFile& file);

struct ResidualReport {
  std::string check_id;
  double mu = 1;
  int num_points = 0;
  double max_abs_residual = 0;
  /// Residual divided by the largest additive piece of the left-hand side.
  double max_rel_residual = 0;
  std::uint64_t seed = 42;
};

/// Evaluates lhs - rhs compositionally on the AST, independent of the normal
/// form, over states x points.
ResidualReport residual(const IdentityFile& file, const CheckSpec& check, const OracleOptions& opts = {});

/// Numeric mu values exercised for a policy: {0, 1} except for fixed regimes.
std::vector<double> oracle_regimes(MuPolicy policy);

struct OracleOutcome {
  std::string id;
  Expectation expect = Expectation::Holds;
  std::vector<ResidualReport> regimes;
  /// Holding checks stay below tol_pass in every regime; failing checks
  /// exceed tol_fail in at least one.
  bool ok = false;
  double max_rel_residual() const;
};

OracleOutcome oracle_check(const IdentityFile& file, const CheckSpec& check, const OracleOptions& opts = {},
                           double tol_pass = 1e-8, double tol_fail = 1e-3);

}  // namespace so4atom
