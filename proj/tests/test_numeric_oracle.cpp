#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "so4atom/numeric_oracle.hpp"
#include "so4atom/paper_catalog.hpp"

using namespace so4atom;

namespace {

constexpr double kStep = 1e-4;

Jet radius_jet(const Point& x, int order) {
  Jet r2(order);
  for (int a = 0; a < 3; ++a) {
    Jet v = Jet::variable(order, a, x[a]);
    r2 += v * v;
  }
  return r2;
}

template <typename F>
double central_difference(F f, Point x, int axis) {
  Point lo = x;
  Point hi = x;
  lo[axis] -= kStep;
  hi[axis] += kStep;
  return (f(hi) - f(lo)) / (2 * kStep);
}

std::vector<Point> random_points(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<Point> pts;
  while (pts.size() < 10) {
    Point p{u(rng), u(rng), u(rng)};
    if (std::hypot(p[0], p[1], p[2]) > 0.5) pts.push_back(p);
  }
  return pts;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("jets match central finite differences") {
  const double w = 1.3;
  for (const Point& x : random_points(7)) {
    CAPTURE(x[0]);
    for (int axis = 0; axis < 3; ++axis) {
      Jet xj = Jet::variable(2, axis, x[axis]);
      CHECK(close_rel(xj.partial(axis == 0, axis == 1, axis == 2).real(), 1.0, 1e-12));

      for (double m : {-1.0, -2.0, 1.0, 3.0}) {
        Jet rm = pow(radius_jet(x, 2), m / 2);
        auto f = [m](const Point& p) { return std::pow(std::hypot(p[0], p[1], p[2]), m); };
        int d[3] = {0, 0, 0};
        d[axis] = 1;
        CHECK(close_rel(rm.partial(d[0], d[1], d[2]).real(), central_difference(f, x, axis), 1e-6));
      }

      Jet g = exp(radius_jet(x, 2) * Complex(-1 / (2 * w * w)));
      auto gf = [w](const Point& p) { return std::exp(-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2 * w * w)); };
      int d[3] = {0, 0, 0};
      d[axis] = 1;
      CHECK(close_rel(g.partial(d[0], d[1], d[2]).real(), central_difference(gf, x, axis), 1e-6));
      // Second derivative from the first-derivative jet.
      auto dgf = [&](const Point& p) {
        Jet gp = exp(radius_jet(p, 2) * Complex(-1 / (2 * w * w)));
        return gp.partial(d[0], d[1], d[2]).real();
      };
      int dd[3] = {d[0] * 2, d[1] * 2, d[2] * 2};
      CHECK(close_rel(g.partial(dd[0], dd[1], dd[2]).real(), central_difference(dgf, x, axis), 1e-6));
    }
  }
}

TEST_CASE("jet products follow the Leibniz rule") {
  Jet x = Jet::variable(4, 0, 0.7);
  Jet y = Jet::variable(4, 1, -0.4);
  Jet f = x * x * y;
  CHECK(f.partial(2, 1, 0).real() == doctest::Approx(2.0));
  CHECK(f.partial(1, 1, 0).real() == doctest::Approx(2 * 0.7));
  CHECK(f.partial(0, 0, 0).real() == doctest::Approx(0.49 * -0.4));
  CHECK(f.derivative(0).order() == 3);
}

TEST_CASE("apply: momentum on a Gaussian") {
  SymbolRegistry reg;
  OracleOptions opts;
  auto values = registry_values(reg, opts);
  TestState g = TestState::gaussian(1, {1, 0});
  Spinor out = apply(OperatorExpr::momentum(reg, Axis::X), g, {1, 0, 0}, values, 1);
  Complex expected = Complex(0, 1) * std::exp(-0.5);
  CHECK(std::abs(out[0] - expected) < 1e-14);
  CHECK(std::abs(out[1]) < 1e-14);
}

TEST_CASE("apply: Pauli action of S_z") {
  SymbolRegistry reg;
  auto values = registry_values(reg, {});
  TestState g = TestState::gaussian(1, {1, 0});
  Point x{0.3, -0.9, 0.6};
  Spinor psi = g.jet(x, 0).value();
  Spinor out = apply(OperatorExpr::spin(reg, Axis::Z), g, x, values, 0);
  CHECK(std::abs(out[0] - 0.5 * psi[0]) < 1e-15);
  CHECK(std::abs(out[1]) < 1e-15);
}

TEST_CASE("apply: canonical commutation relation") {
  SymbolRegistry reg;
  OracleOptions opts;
  auto values = registry_values(reg, opts);
  OperatorExpr x = OperatorExpr::position(reg, Axis::X);
  OperatorExpr px = OperatorExpr::momentum(reg, Axis::X);
  OperatorExpr ih = OperatorExpr(ScalarCoeff(GaussRational::i()) * ScalarCoeff::symbol(reg, SymbolRegistry::kHbar));
  OperatorExpr ccr = commutator(x, px, SpinMode::SpinHalf) - ih;
  for (const TestState& s : random_states(opts)) {
    for (const Point& p : sample_points(s, 0, opts)) {
      Spinor out = apply(ccr, s, p, values, 1);
      CHECK(std::abs(out[0]) < 1e-14);
      CHECK(std::abs(out[1]) < 1e-14);
    }
  }
}

TEST_CASE("apply: usage errors") {
  SymbolRegistry reg;
  auto values = registry_values(reg, {});
  TestState g = TestState::gaussian(1, {1, 0});
  OperatorExpr p2 = mul(OperatorExpr::momentum(reg, Axis::X), OperatorExpr::momentum(reg, Axis::X),
                        SpinMode::SpinHalf);
  CHECK_THROWS_AS(apply(p2, g, {1, 0, 0}, values, 1), UsageError);
  CHECK_THROWS_AS(apply(p2, g, {0.1, 0, 0}, values, 2), UsageError);
}

TEST_CASE("sample points respect the shell and guard") {
  OracleOptions opts;
  for (const TestState& s : random_states(opts)) {
    auto pts = sample_points(s, 3, opts);
    CHECK(pts.size() == static_cast<std::size_t>(opts.points_per_state));
    for (const Point& p : pts) {
      double r = std::hypot(p[0], p[1], p[2]);
      CHECK(r >= opts.guard_factor * s.width);
    }
  }
}

TEST_CASE("oracle residuals are deterministic for a seed") {
  Suite s = load_suite("so4");
  const CheckSpec& c = s.file.checks.front();
  auto a = residual(s.file, c);
  auto b = residual(s.file, c);
  CHECK(a.max_abs_residual == b.max_abs_residual);
  CHECK(a.max_rel_residual == b.max_rel_residual);
  CHECK(a.num_points == 100);
  CHECK(a.seed == 42);
}

TEST_CASE("so4 suite: small residuals, mutation caught") {
  Suite s = load_suite("so4");
  for (const auto& c : s.file.checks) {
    CAPTURE(c.id);
    auto o = oracle_check(s.file, c);
    CHECK(o.ok);
    CHECK(o.max_rel_residual() < 1e-9);
  }
  SuiteRunner runner(s);
  Mutation m = seeded_mutation(runner, 42);
  CheckSpec spec = m.spec;
  spec.expect = Expectation::Fails;
  auto o = oracle_check(s.file, spec);
  CHECK(o.ok);
  CHECK(o.max_rel_residual() > 1e-2);
}

TEST_CASE("at mu=0 the spin Runge-Lenz vector evaluates like the Coulomb one") {
  Suite so4 = load_suite("so4");
  Suite theorem = load_suite("theorem");
  OracleOptions opts;
  opts.mu = 0;
  opts.kappa = 1;
  opts.k1 = -1;
  auto with = [](std::string text, const std::string& name) {
    for (auto at = text.find('X'); at != std::string::npos; at = text.find('X')) text.replace(at, 1, name);
    return text;
  };
  for (const char* pair : {"cross(X, X)", "dot(X, X)", "[X, l_z]"}) {
    CheckSpec a{"mu0_so4", parse(with(pair, "R")), parse("0"), SpinMode::SpinHalf, MuPolicy::Zero};
    CheckSpec b{"mu0_theorem", parse(with(pair, "calR")), parse("0"), SpinMode::SpinHalf, MuPolicy::Zero};
    auto ra = residual(so4.file, a, opts);
    auto rb = residual(theorem.file, b, opts);
    CAPTURE(pair);
    CHECK(ra.max_abs_residual > 0);
    CHECK(rb.max_abs_residual == doctest::Approx(ra.max_abs_residual).epsilon(1e-10));
  }
}

TEST_CASE("mu regimes follow the policy") {
  CHECK(oracle_regimes(MuPolicy::Zero) == std::vector<double>{0});
  CHECK(oracle_regimes(MuPolicy::One) == std::vector<double>{1});
  CHECK(oracle_regimes(MuPolicy::All) == std::vector<double>{0, 1});
  CHECK(oracle_regimes(MuPolicy::Symbolic) == std::vector<double>{0, 1});
}
