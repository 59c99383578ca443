// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Exact scalar coefficients: Gaussian rationals times Laurent monomials in
// named commuting symbols.

#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace so4atom {

using Rational = mpq_class;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (mismatched registries, bad arguments).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Mathematically undefined request, e.g. 0 substituted into 1/x.
class DomainError : public Error {
 public:
  using Error::Error;
};

Rational make_rational(long num, long den = 1);
std::string rational_str(const Rational& q);

/// a + b i with exact rational parts.
class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}
  GaussRational(long n) : re_(n), im_(0) {}

  static GaussRational i() { return {0, 1}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  GaussRational conj() const { return {re_, -im_}; }
  Rational norm() const { return re_ * re_ + im_ * im_; }
  GaussRational inverse() const;

  GaussRational operator-() const { return {-re_, -im_}; }
  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  GaussRational& operator*=(const GaussRational& o);
  GaussRational& operator/=(const GaussRational& o);

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// Text in the identity-file expression syntax, e.g. "3/2", "-i", "(1+2*i)".
  std::string str() const;

 private:
  Rational re_ = 0;
  Rational im_ = 0;
};

using SymbolId = std::uint16_t;

/// Ordered set of scalar symbol names. Built-ins occupy the first ids; order is
/// registration order and never changes.
class SymbolRegistry {
 public:
  static constexpr SymbolId kHbar = 0;
  static constexpr SymbolId kMass = 1;
  static constexpr SymbolId kKappa = 2;
  static constexpr SymbolId kK1 = 3;
  static constexpr SymbolId kK2 = 4;
  static constexpr SymbolId kMu = 5;

  SymbolRegistry();

  static std::shared_ptr<SymbolRegistry> create() { return std::make_shared<SymbolRegistry>(); }

  /// Returns the id of `name`, registering it if new.
  SymbolId intern(std::string_view name);
  std::optional<SymbolId> find(std::string_view name) const;
  const std::string& name(SymbolId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, SymbolId, std::less<>> index_;
};

/// Sparse exponent vector, sorted by symbol id, no zero exponents.
using ScalarMonomial = std::vector<std::pair<SymbolId, int>>;

class ScalarCoeff {
 public:
  using Term = std::pair<ScalarMonomial, GaussRational>;

  ScalarCoeff() = default;
  ScalarCoeff(GaussRational c);  // NOLINT: numbers promote implicitly
  ScalarCoeff(long n) : ScalarCoeff(GaussRational(n)) {}

  static ScalarCoeff symbol(const SymbolRegistry& reg, SymbolId id, int power = 1);
  static ScalarCoeff monomial(const SymbolRegistry* reg, ScalarMonomial mono, GaussRational c);

  /// Registry the symbols belong to; null for pure numbers.
  const SymbolRegistry* registry() const { return registry_; }
  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Numeric value when is_constant().
  GaussRational constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  /// Multiplicative inverse; only single-term coefficients are invertible.
  ScalarCoeff inverse() const;
  /// Highest total power of `sym` over all terms (0 when absent).
  int degree_in(SymbolId sym) const;

  ScalarCoeff operator-() const;
  ScalarCoeff& operator+=(const ScalarCoeff& o);
  ScalarCoeff& operator-=(const ScalarCoeff& o);
  ScalarCoeff& operator*=(const ScalarCoeff& o);

  friend ScalarCoeff operator+(ScalarCoeff a, const ScalarCoeff& b) { return a += b; }
  friend ScalarCoeff operator-(ScalarCoeff a, const ScalarCoeff& b) { return a -= b; }
  friend ScalarCoeff operator*(const ScalarCoeff& a, const ScalarCoeff& b);
  friend bool operator==(const ScalarCoeff& a, const ScalarCoeff& b) { return a.terms_ == b.terms_; }

  /// Multiplies by c * hbar^hbar_power; the hot path of operator products.
  ScalarCoeff scaled(const GaussRational& c, int hbar_power, const SymbolRegistry* reg) const;

  /// Replaces `sym` by an exact value.
  ScalarCoeff substitute(SymbolId sym, const GaussRational& value) const;

  /// Numeric evaluation; `values[id]` is the value of symbol id.
  std::complex<double> evaluate(const std::vector<std::complex<double>>& values) const;

  std::string str() const;

 private:
  void adopt_registry(const ScalarCoeff& o);
  void normalize();

  const SymbolRegistry* registry_ = nullptr;
  std::vector<Term> terms_;
};

ScalarCoeff sc_add(const ScalarCoeff& a, const ScalarCoeff& b);
ScalarCoeff sc_mul(const ScalarCoeff& a, const ScalarCoeff& b);
ScalarCoeff sc_substitute(const ScalarCoeff& a, SymbolId sym, const Rational& value);

std::string monomial_str(const ScalarMonomial& mono, const SymbolRegistry* reg);

}  // namespace so4atom
