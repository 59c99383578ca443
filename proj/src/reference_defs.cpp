// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/paper_catalog.hpp"

namespace so4atom {

namespace {

struct Builder {
  const SymbolRegistry& reg;
  SpinMode mode;

  ScalarCoeff sym(SymbolId id, int power = 1) const { return ScalarCoeff::symbol(reg, id, power); }
  OperatorExpr rad(int m) const { return OperatorExpr::radial(reg, m); }
  ScalarCoeff half_inverse_mass() const { return ScalarCoeff(GaussRational(Rational(1, 2))) * sym(SymbolRegistry::kMass, -1); }

  VecExpr cross(const VecExpr& a, const VecExpr& b) const { return so4atom::cross(a, b, mode); }
  OperatorExpr dot(const VecExpr& a, const VecExpr& b) const { return so4atom::dot(a, b, mode); }
  OperatorExpr mul(const OperatorExpr& a, const OperatorExpr& b) const { return so4atom::mul(a, b, mode); }
  VecExpr mul(const OperatorExpr& a, const VecExpr& v) const { return so4atom::mul(a, v, mode); }
  VecExpr mul(const VecExpr& v, const OperatorExpr& a) const { return so4atom::mul(v, a, mode); }

  /// (1/2M)(a x b - b x a) + f r, the Runge-Lenz form shared by both settings.
  VecExpr runge_lenz(const VecExpr& a, const VecExpr& b, const OperatorExpr& f, const VecExpr& r) const {
    return scale(half_inverse_mass(), cross(a, b) - cross(b, a)) + mul(f, r);
  }
};

}  // namespace

std::vector<Definition> reference_definitions(const SymbolRegistry& reg, SpinMode mode) {
  Builder b{reg, mode};
  const VecExpr r = position_vector(reg);
  const VecExpr p = momentum_vector(reg);
  const VecExpr S = spin_vector(reg);
  const VecExpr l = orbital_angular_momentum(reg);
  const ScalarCoeff mu = b.sym(SymbolRegistry::kMu);
  const ScalarCoeff kappa = b.sym(SymbolRegistry::kKappa);

  std::vector<Definition> out;
  auto add = [&](std::string name, std::string suite, std::string summary, Value v) {
    if (mode == SpinMode::SpinHalf) v = reduce_spin_half(v);
    out.push_back({std::move(name), std::move(suite), std::move(summary), std::move(v)});
  };

  const OperatorExpr H = scale(b.half_inverse_mass(), b.dot(p, p)) - scale(kappa, b.rad(-1));
  const VecExpr R = b.runge_lenz(p, l, scale(-kappa, b.rad(-1)), r);
  add("H", "so3", "Coulomb Hamiltonian", H);
  add("H", "so4", "Coulomb Hamiltonian", H);
  add("R", "so4", "Runge-Lenz vector", R);

  const OperatorExpr rS = b.dot(r, S);
  const VecExpr A = scale(mu, b.mul(b.cross(r, S), b.rad(-2)));
  const VecExpr Pi = p - A;
  const VecExpr J = l + scale(mu, S);
  const OperatorExpr h = scale(b.sym(SymbolRegistry::kK1), b.rad(-1)) +
                         scale(b.sym(SymbolRegistry::kK2) * mu, b.mul(rS, b.rad(-2)));
  const OperatorExpr V = h + scale(mu * b.half_inverse_mass(), b.mul(b.mul(rS, rS), b.rad(-4)));
  const OperatorExpr Hs = scale(b.half_inverse_mass(), b.dot(Pi, Pi)) + V;
  const VecExpr calR = b.runge_lenz(Pi, J, h, r);
  for (const char* suite : {"theorem", "spectrum-algebra"}) {
    add("A", suite, "spin vector potential", A);
    add("Pi", suite, "kinetic momentum", Pi);
    add("J", suite, "total angular momentum", J);
    add("h", suite, "spin potential", h);
    add("V", suite, "full potential", V);
    add("Hs", suite, "spin Hamiltonian", Hs);
    add("calR", suite, "spin Runge-Lenz vector", calR);
  }
  add("Sr", "spectrum-algebra", "radial spin projection", b.mul(rS, b.rad(-1)));
  return out;
}

}  // namespace so4atom
