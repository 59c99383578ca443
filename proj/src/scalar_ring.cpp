// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/scalar_ring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace so4atom {

Rational make_rational(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string rational_str(const Rational& q) { return q.get_str(); }

// --- GaussRational -------------------------------------------------------

GaussRational GaussRational::inverse() const {
  if (is_zero()) throw DomainError("division by zero");
  Rational n = norm();
  return {re_ / n, -im_ / n};
}

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussRational& GaussRational::operator*=(const GaussRational& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussRational& GaussRational::operator/=(const GaussRational& o) { return *this *= o.inverse(); }

std::string GaussRational::str() const {
  if (sgn(im_) == 0) return rational_str(re_);
  auto imag = [](const Rational& q) {
    if (q == 1) return std::string("i");
    if (q == -1) return std::string("-i");
    return rational_str(q) + "*i";
  };
  if (sgn(re_) == 0) return imag(im_);
  std::string s = "(" + rational_str(re_);
  std::string ip = imag(im_);
  s += ip.front() == '-' ? " - " + ip.substr(1) : " + " + ip;
  return s + ")";
}

// --- SymbolRegistry ------------------------------------------------------

SymbolRegistry::SymbolRegistry() {
  for (const char* n : {"hbar", "M", "kappa", "k1", "k2", "mu"}) intern(n);
}

SymbolId SymbolRegistry::intern(std::string_view name) {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  if (names_.size() >= 0xffff) throw UsageError("symbol registry full");
  auto id = static_cast<SymbolId>(names_.size());
  names_.emplace_back(name);
  index_.emplace(std::string(name), id);
  return id;
}

std::optional<SymbolId> SymbolRegistry::find(std::string_view name) const {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  return std::nullopt;
}

// --- ScalarCoeff ---------------------------------------------------------

namespace {

ScalarMonomial mono_mul(const ScalarMonomial& a, const ScalarMonomial& b) {
  ScalarMonomial out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      int e = i->second + j->second;
      if (e != 0) out.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

const SymbolRegistry* merge_registry(const SymbolRegistry* a, const SymbolRegistry* b) {
  if (a && b && a != b) throw UsageError("scalar coefficients from different symbol registries");
  return a ? a : b;
}

}  // namespace

ScalarCoeff::ScalarCoeff(GaussRational c) {
  if (!c.is_zero()) terms_.emplace_back(ScalarMonomial{}, std::move(c));
}

ScalarCoeff ScalarCoeff::symbol(const SymbolRegistry& reg, SymbolId id, int power) {
  if (id >= reg.size()) throw UsageError("symbol id not in registry");
  ScalarMonomial m;
  if (power != 0) m.emplace_back(id, power);
  return monomial(&reg, std::move(m), 1);
}

ScalarCoeff ScalarCoeff::monomial(const SymbolRegistry* reg, ScalarMonomial mono, GaussRational c) {
  ScalarCoeff s;
  s.registry_ = reg;
  if (!c.is_zero()) s.terms_.emplace_back(std::move(mono), std::move(c));
  return s;
}

bool ScalarCoeff::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first.empty());
}

GaussRational ScalarCoeff::constant() const {
  if (!is_constant()) throw UsageError("scalar coefficient is not a number: " + str());
  return terms_.empty() ? GaussRational() : terms_.front().second;
}

ScalarCoeff ScalarCoeff::inverse() const {
  if (terms_.empty()) throw DomainError("division by zero scalar");
  if (terms_.size() != 1) throw UsageError("only single-term scalars are invertible: " + str());
  ScalarMonomial m = terms_.front().first;
  for (auto& [id, e] : m) e = -e;
  return monomial(registry_, std::move(m), terms_.front().second.inverse());
}

int ScalarCoeff::degree_in(SymbolId sym) const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& [id, e] : m)
      if (id == sym) d = std::max(d, e);
  return d;
}

void ScalarCoeff::adopt_registry(const ScalarCoeff& o) { registry_ = merge_registry(registry_, o.registry_); }

void ScalarCoeff::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().first == t.first) {
      out.back().second += t.second;
    } else {
      if (!out.empty() && out.back().second.is_zero()) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().second.is_zero()) out.pop_back();
  terms_ = std::move(out);
}

ScalarCoeff ScalarCoeff::operator-() const {
  ScalarCoeff r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

ScalarCoeff& ScalarCoeff::operator+=(const ScalarCoeff& o) {
  adopt_registry(o);
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() || j != o.terms_.end()) {
    if (j == o.terms_.end() || (i != terms_.end() && i->first < j->first)) {
      out.push_back(std::move(*i++));
    } else if (i == terms_.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      GaussRational c = i->second + j->second;
      if (!c.is_zero()) out.emplace_back(std::move(i->first), std::move(c));
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

ScalarCoeff& ScalarCoeff::operator-=(const ScalarCoeff& o) { return *this += -o; }

ScalarCoeff operator*(const ScalarCoeff& a, const ScalarCoeff& b) {
  ScalarCoeff r;
  r.registry_ = merge_registry(a.registry_, b.registry_);
  if (a.terms_.empty() || b.terms_.empty()) return r;
  r.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.terms_.emplace_back(mono_mul(ma, mb), ca * cb);
  r.normalize();
  return r;
}

ScalarCoeff& ScalarCoeff::operator*=(const ScalarCoeff& o) { return *this = *this * o; }

ScalarCoeff ScalarCoeff::scaled(const GaussRational& c, int hbar_power, const SymbolRegistry* reg) const {
  ScalarCoeff r;
  r.registry_ = merge_registry(registry_, hbar_power != 0 ? reg : nullptr);
  if (c.is_zero()) return r;
  r.terms_.reserve(terms_.size());
  for (const auto& [m, v] : terms_) {
    ScalarMonomial nm = m;
    if (hbar_power != 0) {
      if (!nm.empty() && nm.front().first == SymbolRegistry::kHbar) {
        nm.front().second += hbar_power;
        if (nm.front().second == 0) nm.erase(nm.begin());
      } else {
        nm.insert(nm.begin(), {SymbolRegistry::kHbar, hbar_power});
      }
    }
    r.terms_.emplace_back(std::move(nm), v * c);
  }
  // Shifting one exponent by a constant keeps the ordering of distinct monomials
  // except where terms differ only in the hbar slot; normalize handles both.
  if (hbar_power != 0) r.normalize();
  return r;
}

ScalarCoeff ScalarCoeff::substitute(SymbolId sym, const GaussRational& value) const {
  ScalarCoeff r;
  r.registry_ = registry_;
  for (const auto& [m, c] : terms_) {
    ScalarMonomial nm;
    GaussRational f = c;
    for (const auto& [id, e] : m) {
      if (id != sym) {
        nm.emplace_back(id, e);
        continue;
      }
      if (e < 0 && value.is_zero()) throw DomainError("substituting 0 into a negative power");
      GaussRational base = e < 0 ? value.inverse() : value;
      for (int k = 0; k < std::abs(e); ++k) f *= base;
    }
    if (!f.is_zero()) r.terms_.emplace_back(std::move(nm), std::move(f));
  }
  r.normalize();
  return r;
}

std::complex<double> ScalarCoeff::evaluate(const std::vector<std::complex<double>>& values) const {
  std::complex<double> total = 0.0;
  for (const auto& [m, c] : terms_) {
    std::complex<double> t = c.to_complex();
    for (const auto& [id, e] : m) {
      if (id >= values.size()) throw UsageError("no numeric value bound for symbol id");
      t *= std::pow(values[id], e);
    }
    total += t;
  }
  return total;
}

std::string monomial_str(const ScalarMonomial& mono, const SymbolRegistry* reg) {
  std::string s;
  for (const auto& [id, e] : mono) {
    if (!s.empty()) s += "*";
    s += reg ? reg->name(id) : "s" + std::to_string(id);
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

std::string ScalarCoeff::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : terms_) {
    std::string t;
    if (m.empty()) {
      t = c.str();
    } else if (c.is_one()) {
      t = monomial_str(m, registry_);
    } else if (c == GaussRational(-1)) {
      t = "-" + monomial_str(m, registry_);
    } else {
      t = c.str() + "*" + monomial_str(m, registry_);
    }
    if (s.empty()) {
      s = t;
    } else if (t.front() == '-') {
      s += " - " + t.substr(1);
    } else {
      s += " + " + t;
    }
  }
  return s;
}

ScalarCoeff sc_add(const ScalarCoeff& a, const ScalarCoeff& b) { return a + b; }
ScalarCoeff sc_mul(const ScalarCoeff& a, const ScalarCoeff& b) { return a * b; }
ScalarCoeff sc_substitute(const ScalarCoeff& a, SymbolId sym, const Rational& value) {
  return a.substitute(sym, GaussRational(value));
}

}  // namespace so4atom
