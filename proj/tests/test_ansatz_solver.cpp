#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "so4atom/ansatz_solver.hpp"

using namespace so4atom;

namespace {

bool residual_vanishes(const ConstraintSystem& sys) { return sys.residual(sys.symbolic_coefficients()).is_zero(); }

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("exponent windows") {
  CHECK(exponent_window(-2, 1) == std::vector<int>{-2, -1, 0, 1});
  CHECK_THROWS_AS(exponent_window(1, 0), UsageError);
  CHECK_THROWS_AS(build_inverse_constraints({{}, {}}), UsageError);
  CHECK_THROWS_AS(build_inverse_constraints({{-1, -1}, {}}), UsageError);
  CHECK_THROWS_AS(build_inverse_constraints({{-1}, {-2}}), UsageError);
}

TEST_CASE("inverse problem: single-term ansatz examples") {
  auto coulomb = build_inverse_constraints({{-1}, {}});
  CHECK(residual_vanishes(coulomb));
  auto linear = build_inverse_constraints({{1}, {}});
  CHECK_FALSE(residual_vanishes(linear));
  CHECK(std::any_of(linear.rows.begin(), linear.rows.end(), [](const ConstraintRow& r) {
    return std::any_of(r.coeffs.begin(), r.coeffs.end(), [](const ScalarCoeff& c) { return !c.is_zero(); });
  }));
  CHECK(solve(build_inverse_constraints({{2}, {}})).dimension() == 0);
}

TEST_CASE("inverse problem over the default window yields only 1/r") {
  auto sys = build_inverse_constraints({exponent_window(-4, 2), {}});
  CHECK(sys.is_linear());
  auto space = solve(sys);
  CHECK(space.verified);
  CHECK(space.dimension() == 1);
  CHECK(spans_exactly(space, sys, {"c_m1"}));
  CHECK(describe(space, sys) == "span{c_m1}");
  for (const auto& v : space.basis) CHECK(verify_solution(sys, v));
}

TEST_CASE("inverse problem: per-exponent scan agrees with the joint solve") {
  LaurentAnsatz ansatz{exponent_window(-4, 2), {}};
  auto scan = scan_exponents(ansatz, build_inverse_constraints);
  CHECK(scan.admissible() == std::vector<std::string>{"c_m1"});
  CHECK(scan.pairs_consistent());
  CHECK(scan.pairs.size() == 21);
}

TEST_CASE("inverse sub-conditions agree with the full residual") {
  auto rep = inverse_subconditions({exponent_window(-3, 1), {}});
  CHECK(rep.conditions.size() == 3);
  CHECK(rep.agrees);
  CHECK(rep.residual == "span{c_m1}");
  CHECK(rep.combined == "span{c_m1}");
}

TEST_CASE("window monotonicity for the inverse problem") {
  std::size_t prev = 0;
  for (auto [lo, hi] : std::vector<std::pair<int, int>>{{-1, -1}, {-2, 0}, {-3, 1}, {-4, 2}}) {
    auto sys = build_inverse_constraints({exponent_window(lo, hi), {}});
    auto space = solve(sys);
    CHECK(space.dimension() >= prev);
    CHECK(spans_exactly(space, sys, {"c_m1"}));
    prev = space.dimension();
  }
}

TEST_CASE("spin potential examples") {
  CHECK(residual_vanishes(build_spin_constraints({{-1}, {}})));
  CHECK_FALSE(residual_vanishes(build_spin_constraints({{}, {-3}})));
  CHECK(residual_vanishes(build_spin_constraints({{}, {-2}})));

  auto small = build_spin_constraints({exponent_window(-2, 0), exponent_window(-3, -1)});
  CHECK(small.is_linear());
  auto space = solve(small);
  CHECK(space.verified);
  CHECK(spans_exactly(space, small, {"a_m1", "b_m2"}));
}

TEST_CASE("spin potential over the default windows") {
  LaurentAnsatz ansatz{exponent_window(-3, 1), exponent_window(-4, 0)};
  auto sys = build_spin_constraints(ansatz);
  auto space = solve(sys);
  CHECK(space.dimension() == 2);
  CHECK(space.verified);
  CHECK(spans_exactly(space, sys, {"a_m1", "b_m2"}));

  // Completeness: a single term is admissible iff it lies in the joint span.
  auto scan = scan_exponents(ansatz, build_spin_constraints);
  auto adm = scan.admissible();
  CHECK(adm.size() == 2);
  CHECK(contains(adm, "a_m1"));
  CHECK(contains(adm, "b_m2"));
  CHECK(scan.pairs_consistent());
}

TEST_CASE("same_span compares subspaces") {
  auto a = build_spin_constraints({exponent_window(-3, 1), exponent_window(-4, 0)});
  auto sa = solve(a);
  CHECK(same_span(sa, sa));
  auto b = build_spin_constraints({exponent_window(-3, 1), exponent_window(-4, 0)});
  CHECK(same_span(sa, solve(b)));
}
