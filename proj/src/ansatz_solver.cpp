// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/ansatz_solver.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace so4atom {

std::vector<int> exponent_window(int lo, int hi) {
  if (lo > hi) throw UsageError("empty exponent window " + std::to_string(lo) + ".." + std::to_string(hi));
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

namespace {

constexpr SpinMode kMode = SpinMode::Abstract;

std::string tag(int n) { return n < 0 ? "m" + std::to_string(-n) : std::to_string(n); }

ScalarCoeff number(long num, long den = 1) { return ScalarCoeff(GaussRational(make_rational(num, den))); }

ScalarCoeff sym_power(const SymbolRegistry& reg, SymbolId id, int power, GaussRational c = 1) {
  return ScalarCoeff::monomial(&reg, {{id, power}}, std::move(c));
}

void check_exponents(const std::vector<int>& exps, const char* what) {
  std::set<int> seen;
  for (int n : exps) {
    if (n < -60 || n > 60) throw UsageError(std::string(what) + " exponent " + std::to_string(n) + " out of range");
    if (!seen.insert(n).second) throw UsageError(std::string("duplicate ") + what + " exponent " + std::to_string(n));
  }
}

std::vector<Unknown> make_unknowns(SymbolRegistry& reg, const LaurentAnsatz& ansatz, const char* scalar_prefix) {
  std::vector<Unknown> out;
  for (int n : ansatz.scalar_part) {
    std::string name = std::string(scalar_prefix) + "_" + tag(n);
    out.push_back({name, reg.intern(name), n, false});
  }
  for (int m : ansatz.spin_part) {
    std::string name = "b_" + tag(m);
    out.push_back({name, reg.intern(name), m, true});
  }
  return out;
}

// f = sum x_j r^n_j over the scalar unknowns, and V = (r f' + 3 f)/2.
OperatorExpr radial_function(const SymbolRegistry& reg, const std::vector<Unknown>& u,
                             const std::vector<ScalarCoeff>& x) {
  OperatorExpr f;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (!u[j].spin) f += scale(x[j], OperatorExpr::radial(reg, u[j].exponent));
  return f;
}

OperatorExpr extracted_potential(const SymbolRegistry& reg, const std::vector<Unknown>& u,
                                 const std::vector<ScalarCoeff>& x) {
  OperatorExpr v;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (!u[j].spin) v += scale(x[j] * number(u[j].exponent + 3, 2), OperatorExpr::radial(reg, u[j].exponent));
  return v;
}

VecExpr inverse_residual(const SymbolRegistry& reg, const std::vector<Unknown>& u, const std::vector<ScalarCoeff>& x) {
  VecExpr r = position_vector(reg);
  VecExpr p = momentum_vector(reg);
  VecExpr l = orbital_angular_momentum(reg);
  ScalarCoeff inv_2m = sym_power(reg, SymbolRegistry::kMass, -1, make_rational(1, 2));
  OperatorExpr f = radial_function(reg, u, x);
  VecExpr big_r = scale(inv_2m, cross(p, l, kMode) - cross(l, p, kMode)) + mul(f, r, kMode);
  OperatorExpr h = scale(inv_2m, dot(p, p, kMode)) + extracted_potential(reg, u, x);
  VecExpr out;
  for (int k = 0; k < 3; ++k) out[k] = commutator(big_r[k], h, kMode);
  return out;
}

VecExpr spin_residual(const SymbolRegistry& reg, const std::vector<Unknown>& u, const std::vector<ScalarCoeff>& x) {
  VecExpr r = position_vector(reg);
  VecExpr p = momentum_vector(reg);
  VecExpr s = spin_vector(reg);
  OperatorExpr inv_r2 = OperatorExpr::radial(reg, -2);
  OperatorExpr r_dot_s = dot(r, s, kMode);
  OperatorExpr h;
  for (std::size_t j = 0; j < u.size(); ++j) {
    OperatorExpr term = scale(x[j], OperatorExpr::radial(reg, u[j].exponent));
    h += u[j].spin ? mul(term, r_dot_s, kMode) : term;
  }
  VecExpr pi = p - mul(cross(r, s, kMode), inv_r2, kMode);
  ScalarCoeff i_hbar = sym_power(reg, SymbolRegistry::kHbar, 1, GaussRational::i());
  VecExpr out;
  for (int k = 0; k < 3; ++k)
    out[k] = commutator(pi[k], h, kMode) - scale(i_hbar, mul(mul(r[k], inv_r2, kMode), h, kMode));
  return out;
}

// Splits every residual coefficient into its linear form in the unknowns.
std::vector<ConstraintRow> collect_rows(const VecExpr& residual, const std::vector<Unknown>& unknowns,
                                        const SymbolRegistry& reg) {
  std::map<SymbolId, std::size_t> index;
  for (std::size_t j = 0; j < unknowns.size(); ++j) index[unknowns[j].id] = j;
  std::vector<ConstraintRow> rows;
  for (int k = 0; k < 3; ++k) {
    for (const auto& [key, coeff] : residual[k].terms()) {
      ConstraintRow row;
      row.label = std::string(1, axis_name(static_cast<Axis>(k))) + ": " + key.str();
      row.coeffs.assign(unknowns.size(), ScalarCoeff());
      for (const auto& [mono, c] : coeff.terms()) {
        int degree = 0;
        std::size_t which = 0;
        ScalarMonomial rest;
        for (const auto& [id, e] : mono) {
          auto it = index.find(id);
          if (it == index.end()) {
            rest.emplace_back(id, e);
          } else {
            degree += e;
            which = it->second;
            if (e != 1) degree = -1000;
          }
        }
        bool single = degree == 1 && rest.size() + 1 == mono.size();
        if (single) {
          row.coeffs[which] += ScalarCoeff::monomial(&reg, rest, c);
        } else {
          row.nonlinear += ScalarCoeff::monomial(&reg, mono, c);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ConstraintSystem make_system(std::string name, std::shared_ptr<SymbolRegistry> reg, std::vector<Unknown> unknowns,
                             ResidualBuilder residual) {
  ConstraintSystem sys;
  sys.name = std::move(name);
  sys.registry = std::move(reg);
  sys.unknowns = std::move(unknowns);
  sys.residual = std::move(residual);
  sys.rows = collect_rows(sys.residual(sys.symbolic_coefficients()), sys.unknowns, *sys.registry);
  return sys;
}

void validate_inverse(const LaurentAnsatz& ansatz) {
  if (ansatz.scalar_part.empty()) throw UsageError("inverse ansatz needs at least one exponent");
  if (!ansatz.spin_part.empty()) throw UsageError("inverse ansatz has no spin part");
  check_exponents(ansatz.scalar_part, "f");
}

ConstraintSystem inverse_system(const LaurentAnsatz& ansatz, std::shared_ptr<SymbolRegistry> reg, std::string name,
                                std::function<VecExpr(const SymbolRegistry&, const std::vector<Unknown>&,
                                                      const std::vector<ScalarCoeff>&)> builder) {
  validate_inverse(ansatz);
  auto unknowns = make_unknowns(*reg, ansatz, "c");
  const SymbolRegistry* r = reg.get();
  return make_system(std::move(name), reg, unknowns,
                     [r, unknowns, builder](const std::vector<ScalarCoeff>& x) { return builder(*r, unknowns, x); });
}

// --- exact linear algebra over ScalarCoeff ---------------------------------

using Matrix = std::vector<std::vector<ScalarCoeff>>;

bool row_is_zero(const std::vector<ScalarCoeff>& row) {
  return std::all_of(row.begin(), row.end(), [](const ScalarCoeff& c) { return c.is_zero(); });
}

// Divides by the leading term of the first nonzero entry. Monomials are units
// of the Laurent ring, so this keeps rows exact while bounding growth.
void normalize(std::vector<ScalarCoeff>& row) {
  for (const auto& e : row) {
    if (e.is_zero()) continue;
    const auto& [mono, c] = e.terms().front();
    ScalarCoeff unit = ScalarCoeff::monomial(e.registry(), mono, c).inverse();
    for (auto& x : row) x = x * unit;
    return;
  }
}

struct Echelon {
  Matrix rows;
  std::vector<std::size_t> pivots;
};

// Fraction-free Gauss-Jordan: R_k <- p R_k - a R_pivot.
Echelon gauss_jordan(Matrix m, std::size_t ncols) {
  Echelon out;
  std::size_t r = 0;
  for (std::size_t col = 0; col < ncols && r < m.size(); ++col) {
    std::size_t pick = r;
    while (pick < m.size() && m[pick][col].is_zero()) ++pick;
    if (pick == m.size()) continue;
    std::swap(m[r], m[pick]);
    normalize(m[r]);
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k == r || m[k][col].is_zero()) continue;
      ScalarCoeff a = m[k][col];
      const ScalarCoeff& p = m[r][col];
      for (std::size_t j = 0; j < ncols; ++j) m[k][j] = p * m[k][j] - a * m[r][j];
      normalize(m[k]);
    }
    out.pivots.push_back(col);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

std::vector<std::vector<ScalarCoeff>> nullspace(const Matrix& m, std::size_t ncols) {
  Echelon e = gauss_jordan(m, ncols);
  std::set<std::size_t> pivot_set(e.pivots.begin(), e.pivots.end());
  std::vector<std::vector<ScalarCoeff>> basis;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (pivot_set.count(f)) continue;
    std::vector<std::size_t> involved;
    for (std::size_t i = 0; i < e.rows.size(); ++i)
      if (!e.rows[i][f].is_zero()) involved.push_back(i);
    std::vector<ScalarCoeff> x(ncols);
    ScalarCoeff all = 1;
    for (std::size_t i : involved) all = all * e.rows[i][e.pivots[i]];
    x[f] = all;
    for (std::size_t i : involved) {
      ScalarCoeff others = 1;
      for (std::size_t k : involved)
        if (k != i) others = others * e.rows[k][e.pivots[k]];
      x[e.pivots[i]] = -(e.rows[i][f] * others);
    }
    normalize(x);
    basis.push_back(std::move(x));
  }
  return basis;
}

std::vector<ScalarCoeff> unit_vector(std::size_t n, std::size_t j) {
  std::vector<ScalarCoeff> x(n);
  x[j] = 1;
  return x;
}

// Solution of a one-term system whose rows may be nonlinear: admissible when
// the residual vanishes identically in the coefficient.
bool single_term_admissible(const ConstraintSystem& sys) {
  return std::all_of(sys.rows.begin(), sys.rows.end(), [](const ConstraintRow& r) {
    return r.nonlinear.is_zero() && row_is_zero(r.coeffs);
  });
}

}  // namespace

bool ConstraintSystem::is_linear() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConstraintRow& r) { return r.nonlinear.is_zero(); });
}

std::vector<ScalarCoeff> ConstraintSystem::symbolic_coefficients() const {
  std::vector<ScalarCoeff> x;
  for (const auto& u : unknowns) x.push_back(ScalarCoeff::symbol(*registry, u.id));
  return x;
}

ConstraintSystem build_inverse_constraints(const LaurentAnsatz& ansatz) {
  return inverse_system(ansatz, SymbolRegistry::create(), "inverse", inverse_residual);
}

ConstraintSystem build_spin_constraints(const LaurentAnsatz& ansatz) {
  if (ansatz.scalar_part.empty() && ansatz.spin_part.empty())
    throw UsageError("spin ansatz needs at least one exponent");
  check_exponents(ansatz.scalar_part, "xi1");
  check_exponents(ansatz.spin_part, "xi2");
  auto reg = SymbolRegistry::create();
  auto unknowns = make_unknowns(*reg, ansatz, "a");
  const SymbolRegistry* r = reg.get();
  return make_system("spin-potential", reg, unknowns,
                     [r, unknowns](const std::vector<ScalarCoeff>& x) { return spin_residual(*r, unknowns, x); });
}

bool verify_solution(const ConstraintSystem& system, const std::vector<ScalarCoeff>& coefficients) {
  if (coefficients.size() != system.unknowns.size()) throw UsageError("coefficient count does not match the ansatz");
  return system.residual(coefficients).is_zero();
}

SolutionSpace solve(const ConstraintSystem& system) {
  SolutionSpace space;
  const std::size_t n = system.unknowns.size();
  if (system.is_linear()) {
    space.method = "nullspace";
    Matrix m;
    for (const auto& row : system.rows)
      if (!row_is_zero(row.coeffs)) m.push_back(row.coeffs);
    space.basis = nullspace(m, n);
  } else {
    space.method = "exponent-scan";
    for (std::size_t j = 0; j < n; ++j) {
      auto x = unit_vector(n, j);
      if (verify_solution(system, x)) space.basis.push_back(std::move(x));
    }
  }
  space.verified = std::all_of(space.basis.begin(), space.basis.end(),
                               [&](const std::vector<ScalarCoeff>& x) { return verify_solution(system, x); });
  return space;
}

bool spans_exactly(const SolutionSpace& space, const ConstraintSystem& system, const std::vector<std::string>& names) {
  if (space.dimension() != names.size()) return false;
  std::set<std::string> allowed(names.begin(), names.end());
  for (const auto& v : space.basis)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!v[j].is_zero() && !allowed.count(system.unknowns[j].name)) return false;
  // Basis vectors are independent by construction, so the supports must cover
  // every allowed unknown.
  Matrix m(space.basis.begin(), space.basis.end());
  return gauss_jordan(m, system.unknowns.size()).pivots.size() == names.size();
}

bool same_span(const SolutionSpace& a, const SolutionSpace& b) {
  if (a.dimension() != b.dimension()) return false;
  if (a.dimension() == 0) return true;
  std::size_t ncols = a.basis.front().size();
  Matrix m(a.basis.begin(), a.basis.end());
  m.insert(m.end(), b.basis.begin(), b.basis.end());
  return gauss_jordan(m, ncols).pivots.size() == a.dimension();
}

std::string describe(const SolutionSpace& space, const ConstraintSystem& system) {
  std::string out = "span{";
  for (std::size_t b = 0; b < space.basis.size(); ++b) {
    if (b) out += ", ";
    std::string vec;
    for (std::size_t j = 0; j < space.basis[b].size(); ++j) {
      const ScalarCoeff& c = space.basis[b][j];
      if (c.is_zero()) continue;
      if (!vec.empty()) vec += " + ";
      const std::string& name = system.unknowns[j].name;
      vec += c == ScalarCoeff(1) ? name : "(" + c.str() + ")*" + name;
    }
    out += vec;
  }
  return out + "}";
}

// --- scans -----------------------------------------------------------------

std::vector<std::string> ExponentScan::admissible() const {
  std::vector<std::string> out;
  for (const auto& s : singles)
    if (s.admissible) out.push_back(s.unknown.name);
  return out;
}

bool ExponentScan::pairs_consistent() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const Pair& p) { return p.consistent; });
}

ExponentScan scan_exponents(const LaurentAnsatz& ansatz, const SystemFactory& factory) {
  struct Item {
    int exponent;
    bool spin;
  };
  std::vector<Item> items;
  for (int n : ansatz.scalar_part) items.push_back({n, false});
  for (int m : ansatz.spin_part) items.push_back({m, true});
  auto sub = [&](std::initializer_list<Item> pick) {
    LaurentAnsatz a;
    for (const Item& it : pick) (it.spin ? a.spin_part : a.scalar_part).push_back(it.exponent);
    return a;
  };

  ExponentScan scan;
  std::vector<bool> ok;
  for (const Item& it : items) {
    ConstraintSystem sys = factory(sub({it}));
    bool admissible = sys.is_linear() ? solve(sys).dimension() > 0 : single_term_admissible(sys);
    scan.singles.push_back({sys.unknowns.front(), admissible});
    ok.push_back(admissible);
  }
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      ConstraintSystem sys = factory(sub({items[a], items[b]}));
      std::size_t dim = solve(sys).dimension();
      std::size_t expected = static_cast<std::size_t>(ok[a]) + static_cast<std::size_t>(ok[b]);
      scan.pairs.push_back({sys.unknowns[0].name, sys.unknowns[1].name, dim, dim == expected});
    }
  }
  return scan;
}

SubConditionReport inverse_subconditions(const LaurentAnsatz& ansatz) {
  validate_inverse(ansatz);
  auto reg = SymbolRegistry::create();
  auto grad_v_minus_f = [](const SymbolRegistry& r, const std::vector<Unknown>& u, const std::vector<ScalarCoeff>& x) {
    OperatorExpr g = extracted_potential(r, u, x) - radial_function(r, u, x);
    VecExpr p = momentum_vector(r);
    VecExpr out;
    for (int k = 0; k < 3; ++k) out[k] = commutator(p[k], g, kMode);
    return out;
  };
  auto radial_balance = [](const SymbolRegistry& r, const std::vector<Unknown>& u, const std::vector<ScalarCoeff>& x) {
    // (grad V).r + f with grad_u V = (i/hbar)[p_u, V].
    OperatorExpr v = extracted_potential(r, u, x);
    VecExpr p = momentum_vector(r);
    VecExpr pos = position_vector(r);
    ScalarCoeff i_over_hbar = sym_power(r, SymbolRegistry::kHbar, -1, GaussRational::i());
    VecExpr out;
    out[0] = radial_function(r, u, x);
    for (int k = 0; k < 3; ++k) out[0] += scale(i_over_hbar, mul(commutator(p[k], v, kMode), pos[k], kMode));
    return out;
  };
  auto laplacian = [](const SymbolRegistry& r, const std::vector<Unknown>& u, const std::vector<ScalarCoeff>& x) {
    // sum_u [p_u, [p_u, f]] = -hbar^2 laplacian f.
    OperatorExpr f = radial_function(r, u, x);
    VecExpr p = momentum_vector(r);
    VecExpr out;
    for (int k = 0; k < 3; ++k) out[0] += commutator(p[k], commutator(p[k], f, kMode), kMode);
    return out;
  };

  SubConditionReport report;
  ConstraintSystem full = inverse_system(ansatz, reg, "inverse", inverse_residual);
  SolutionSpace full_space = solve(full);
  report.residual = describe(full_space, full);

  const std::vector<std::pair<std::string, decltype(+grad_v_minus_f)>> conditions = {
      {"grad(V - f) = 0", +grad_v_minus_f},
      {"(grad V).r + f = 0", +radial_balance},
      {"laplacian f = 0", +laplacian},
  };
  Matrix combined;
  for (const auto& [name, builder] : conditions) {
    ConstraintSystem sys = inverse_system(ansatz, reg, name, builder);
    SolutionSpace space = solve(sys);
    report.conditions.push_back({name, describe(space, sys), space.dimension()});
    for (const auto& row : sys.rows) combined.push_back(row.coeffs);
  }
  SolutionSpace joint;
  joint.method = "nullspace";
  joint.basis = nullspace(combined, full.unknowns.size());
  joint.verified = std::all_of(joint.basis.begin(), joint.basis.end(),
                               [&](const std::vector<ScalarCoeff>& x) { return verify_solution(full, x); });
  report.combined = describe(joint, full);
  report.agrees = same_span(joint, full_space) && joint.verified;
  return report;
}

}  // namespace so4atom
