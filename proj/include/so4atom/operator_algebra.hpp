// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Normal-ordered operator algebra over r_u, p_u, S_u and radial powers r^m.
//
// Every monomial is stored as
//
//     c * r_x^a r_y^b r_z^e * r^m * p_x^i p_y^j p_z^k * S_x^s S_y^t S_z^u
//
// with e in {0, 1}: the relation r_x^2 + r_y^2 + r_z^2 = r^2 is applied by
// rewriting r_z^2 -> r^2 - r_x^2 - r_y^2, which makes the position/radial part
// a basis of the commutative Laurent ring and the normal form unique. Momenta
// are moved right of positions with the Leibniz rule for p = -i hbar grad.
// Spin words are PBW ordered (x < y < z) in abstract mode; in spin-1/2 mode
// they are reduced to degree <= 1 with S_u S_v = hbar^2/4 d_uv + i hbar/2 e_uvw S_w.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "so4atom/scalar_ring.hpp"

namespace so4atom {

enum class SpinMode { Abstract, SpinHalf };

const char* to_string(SpinMode mode);

/// Cartesian axis; values index three-component arrays.
enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Axis, 3> kAxes = {Axis::X, Axis::Y, Axis::Z};

char axis_name(Axis a);
/// Levi-Civita symbol on axis indices.
int levi_civita(int u, int v, int w);

/// Monomial signature. Ordering is lexicographic on (pos, rad, mom, spin).
struct OpKey {
  std::array<std::int8_t, 3> pos{};
  std::int8_t rad = 0;
  std::array<std::int8_t, 3> mom{};
  std::array<std::int8_t, 3> spin{};

  auto operator<=>(const OpKey&) const = default;

  bool is_identity() const { return *this == OpKey{}; }
  int momentum_degree() const { return mom[0] + mom[1] + mom[2]; }
  int spin_degree() const { return spin[0] + spin[1] + spin[2]; }
  int position_degree() const { return pos[0] + pos[1] + pos[2]; }
  std::string str() const;
};

/// Finite sum of normal-ordered monomials with exact scalar coefficients.
/// Terms are sorted by key, keys are unique and coefficients nonzero.
class OperatorExpr {
 public:
  using Term = std::pair<OpKey, ScalarCoeff>;

  OperatorExpr() = default;
  OperatorExpr(ScalarCoeff c);  // NOLINT: scalars are operators
  OperatorExpr(long n) : OperatorExpr(ScalarCoeff(n)) {}

  static OperatorExpr position(const SymbolRegistry& reg, Axis a);
  static OperatorExpr momentum(const SymbolRegistry& reg, Axis a);
  static OperatorExpr spin(const SymbolRegistry& reg, Axis a);
  /// r^m with r = |r_vec|. r^0 is the identity.
  static OperatorExpr radial(const SymbolRegistry& reg, int m);
  static OperatorExpr from_terms(const SymbolRegistry* reg, std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  const SymbolRegistry* registry() const { return registry_; }

  bool is_zero() const { return terms_.empty(); }
  /// True when the expression is a multiple of the identity.
  bool is_scalar() const;
  ScalarCoeff scalar_value() const;

  int momentum_degree() const;
  int spin_degree() const;

  OperatorExpr operator-() const;
  OperatorExpr& operator+=(const OperatorExpr& o);
  OperatorExpr& operator-=(const OperatorExpr& o);
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
  friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a -= b; }
  friend bool operator==(const OperatorExpr& a, const OperatorExpr& b) { return a.terms_ == b.terms_; }

  /// Text in the identity-file syntax; re-parses to the same expression.
  std::string str() const;

 private:
  const SymbolRegistry* registry_ = nullptr;
  std::vector<Term> terms_;
};

struct VecExpr {
  std::array<OperatorExpr, 3> c;

  OperatorExpr& operator[](Axis a) { return c[static_cast<int>(a)]; }
  const OperatorExpr& operator[](Axis a) const { return c[static_cast<int>(a)]; }
  OperatorExpr& operator[](int i) { return c[i]; }
  const OperatorExpr& operator[](int i) const { return c[i]; }

  bool is_zero() const { return c[0].is_zero() && c[1].is_zero() && c[2].is_zero(); }
  friend bool operator==(const VecExpr& a, const VecExpr& b) { return a.c == b.c; }
  VecExpr operator-() const { return {{-c[0], -c[1], -c[2]}}; }
  friend VecExpr operator+(const VecExpr& a, const VecExpr& b) {
    return {{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]}};
  }
  friend VecExpr operator-(const VecExpr& a, const VecExpr& b) {
    return {{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]}};
  }
};

/// 3x3 array of operators, e.g. the table [a_u, b_v].
struct MatExpr {
  std::array<OperatorExpr, 9> c;

  OperatorExpr& at(int u, int v) { return c[3 * u + v]; }
  const OperatorExpr& at(int u, int v) const { return c[3 * u + v]; }
  bool is_zero() const;
  friend bool operator==(const MatExpr& a, const MatExpr& b) { return a.c == b.c; }
};

VecExpr position_vector(const SymbolRegistry& reg);
VecExpr momentum_vector(const SymbolRegistry& reg);
VecExpr spin_vector(const SymbolRegistry& reg);
/// l = r x p.
VecExpr orbital_angular_momentum(const SymbolRegistry& reg);

OperatorExpr mul(const OperatorExpr& a, const OperatorExpr& b, SpinMode mode);
OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b, SpinMode mode);
OperatorExpr scale(const ScalarCoeff& c, const OperatorExpr& a);
bool is_zero(const OperatorExpr& a);

/// (a x b)_w = sum e_wuv a_u b_v, a factors kept left of b factors.
VecExpr cross(const VecExpr& a, const VecExpr& b, SpinMode mode);
OperatorExpr dot(const VecExpr& a, const VecExpr& b, SpinMode mode);
VecExpr scale(const ScalarCoeff& c, const VecExpr& a);
/// a * v_u for each component (a on the left).
VecExpr mul(const OperatorExpr& a, const VecExpr& v, SpinMode mode);
/// v_u * a for each component (a on the right).
VecExpr mul(const VecExpr& v, const OperatorExpr& a, SpinMode mode);

/// Rewrites every spin word with the spin-1/2 relations.
OperatorExpr reduce_spin_half(const OperatorExpr& a);

OperatorExpr substitute(const OperatorExpr& a, SymbolId sym, const GaussRational& value);
OperatorExpr map_coefficients(const OperatorExpr& a, const std::function<ScalarCoeff(const ScalarCoeff&)>& f);

}  // namespace so4atom
