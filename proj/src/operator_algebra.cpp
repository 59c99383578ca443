// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/operator_algebra.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <string_view>
#include <unordered_map>

namespace so4atom {

const char* to_string(SpinMode mode) { return mode == SpinMode::Abstract ? "abstract" : "half"; }

char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }

int levi_civita(int u, int v, int w) {
  if (u == v || v == w || u == w) return 0;
  return ((v - u + 3) % 3 == 1) ? 1 : -1;
}

namespace {

constexpr int kMaxExponent = 120;

std::int8_t narrow_exp(int e) {
  if (e > kMaxExponent || e < -kMaxExponent) throw UsageError("operator exponent out of range");
  return static_cast<std::int8_t>(e);
}

int third_axis(int u, int v) { return 3 - u - v; }

// ---------------------------------------------------------------------------
// Commutative position/radial part: r_x^a r_y^b r_z^c r^m.

struct PosKey {
  std::array<std::int8_t, 3> pos{};
  std::int8_t rad = 0;
  auto operator<=>(const PosKey&) const = default;
};

using PosPoly = std::vector<std::pair<long long, PosKey>>;

std::uint64_t pack(const PosKey& k) {
  std::uint64_t v = 0;
  for (int i = 0; i < 3; ++i) v = (v << 8) | static_cast<std::uint8_t>(k.pos[i]);
  return (v << 8) | static_cast<std::uint8_t>(k.rad);
}

void add_term(std::map<PosKey, long long>& acc, const PosKey& k, long long c) {
  if (c == 0) return;
  auto [it, inserted] = acc.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) acc.erase(it);
  }
}

// r_z^2 -> r^2 - r_x^2 - r_y^2 until the r_z power is 0 or 1.
const PosPoly& reduce(const PosKey& k) {
  thread_local std::unordered_map<std::uint64_t, PosPoly> cache;
  auto key = pack(k);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  PosPoly out;
  if (k.pos[2] < 2) {
    out.emplace_back(1, k);
  } else {
    std::map<PosKey, long long> acc;
    PosKey a = k;
    a.pos[2] = narrow_exp(k.pos[2] - 2);
    PosKey r2 = a;
    r2.rad = narrow_exp(a.rad + 2);
    PosKey x2 = a;
    x2.pos[0] = narrow_exp(a.pos[0] + 2);
    PosKey y2 = a;
    y2.pos[1] = narrow_exp(a.pos[1] + 2);
    for (auto [kk, sign] : {std::pair{r2, 1LL}, {x2, -1LL}, {y2, -1LL}})
      for (const auto& [c, t] : reduce(kk)) add_term(acc, t, sign * c);
    for (const auto& [t, c] : acc) out.emplace_back(c, t);
  }
  return cache.emplace(key, std::move(out)).first->second;
}

PosPoly multiply(const PosKey& a, const PosPoly& b) {
  std::map<PosKey, long long> acc;
  for (const auto& [c, k] : b) {
    PosKey m;
    for (int i = 0; i < 3; ++i) m.pos[i] = narrow_exp(a.pos[i] + k.pos[i]);
    m.rad = narrow_exp(a.rad + k.rad);
    for (const auto& [cr, t] : reduce(m)) add_term(acc, t, c * cr);
  }
  PosPoly out;
  out.reserve(acc.size());
  for (const auto& [t, c] : acc) out.emplace_back(c, t);
  return out;
}

// d/dr_u of r_x^a r_y^b r_z^c r^m = a_u (...)/r_u + m r_u r^{m-2} (...).
PosPoly derivative(const PosPoly& f, int u) {
  std::map<PosKey, long long> acc;
  for (const auto& [c, k] : f) {
    if (k.pos[u] > 0) {
      PosKey d = k;
      d.pos[u] = narrow_exp(k.pos[u] - 1);
      for (const auto& [cr, t] : reduce(d)) add_term(acc, t, c * k.pos[u] * cr);
    }
    if (k.rad != 0) {
      PosKey d = k;
      d.pos[u] = narrow_exp(k.pos[u] + 1);
      d.rad = narrow_exp(k.rad - 2);
      for (const auto& [cr, t] : reduce(d)) add_term(acc, t, c * k.rad * cr);
    }
  }
  PosPoly out;
  out.reserve(acc.size());
  for (const auto& [t, c] : acc) out.emplace_back(c, t);
  return out;
}

// Mixed partial d^beta of a single monomial, memoized.
const PosPoly& partial(const PosKey& k, const std::array<int, 3>& beta) {
  thread_local std::map<std::pair<std::uint64_t, std::array<int, 3>>, PosPoly> cache;
  auto key = std::pair{pack(k), beta};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  PosPoly out;
  if (beta == std::array<int, 3>{0, 0, 0}) {
    out = reduce(k);
  } else {
    int u = beta[0] > 0 ? 0 : (beta[1] > 0 ? 1 : 2);
    auto lower = beta;
    --lower[u];
    out = derivative(partial(k, lower), u);
  }
  return cache.emplace(key, std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Spin words.

using Word = std::array<std::int8_t, 3>;

struct SpinTerm {
  GaussRational c;
  int hbar_power;
  Word word;
};

using SpinPoly = std::vector<SpinTerm>;

// PBW normal ordering of an arbitrary generator sequence using
// S_v S_u = S_u S_v + i hbar e_vuw S_w for v > u.
const SpinPoly& order_sequence(const std::vector<std::int8_t>& seq) {
  thread_local std::map<std::vector<std::int8_t>, SpinPoly> cache;
  if (auto it = cache.find(seq); it != cache.end()) return it->second;
  std::size_t i = 0;
  while (i + 1 < seq.size() && seq[i] <= seq[i + 1]) ++i;
  SpinPoly out;
  if (i + 1 >= seq.size()) {
    Word w{};
    for (auto g : seq) ++w[g];
    out.push_back({GaussRational(1), 0, w});
  } else {
    int v = seq[i];
    int u = seq[i + 1];
    int w = third_axis(u, v);
    std::vector<std::int8_t> swapped = seq;
    std::swap(swapped[i], swapped[i + 1]);
    std::vector<std::int8_t> contracted(seq.begin(), seq.begin() + static_cast<long>(i));
    contracted.push_back(static_cast<std::int8_t>(w));
    contracted.insert(contracted.end(), seq.begin() + static_cast<long>(i) + 2, seq.end());
    std::map<std::pair<Word, int>, GaussRational> flat;
    for (const auto& t : order_sequence(swapped)) flat[{t.word, t.hbar_power}] += t.c;
    GaussRational f = GaussRational::i() * GaussRational(levi_civita(v, u, w));
    for (const auto& t : order_sequence(contracted)) flat[{t.word, t.hbar_power + 1}] += f * t.c;
    for (const auto& [k, c] : flat)
      if (!c.is_zero()) out.push_back({c, k.second, k.first});
  }
  return cache.emplace(seq, std::move(out)).first->second;
}

SpinPoly spin_product_abstract(const Word& a, const Word& b) {
  std::vector<std::int8_t> seq;
  for (const Word* w : {&a, &b})
    for (int g = 0; g < 3; ++g)
      for (int k = 0; k < (*w)[g]; ++k) seq.push_back(static_cast<std::int8_t>(g));
  return order_sequence(seq);
}

// Spin-1/2: fold generators left to right into span{1, S_x, S_y, S_z}.
SpinPoly spin_product_half(const Word& a, const Word& b) {
  // state[0] = identity coefficient, state[1+w] = S_w coefficient; hbar powers
  // tracked alongside (identity and S_w parts differ by one power).
  std::map<std::pair<Word, int>, GaussRational> state;
  state[{Word{}, 0}] = GaussRational(1);
  auto apply = [&](int g) {
    std::map<std::pair<Word, int>, GaussRational> next;
    for (const auto& [k, c] : state) {
      const auto& [w, hp] = k;
      int deg = w[0] + w[1] + w[2];
      if (deg == 0) {
        Word nw{};
        nw[g] = 1;
        next[{nw, hp}] += c;
      } else {
        int u = w[0] ? 0 : (w[1] ? 1 : 2);
        if (u == g) {
          next[{Word{}, hp + 2}] += c * GaussRational(make_rational(1, 4));
        } else {
          int t = third_axis(u, g);
          Word nw{};
          nw[t] = 1;
          next[{nw, hp + 1}] += c * GaussRational(0, make_rational(levi_civita(u, g, t), 2));
        }
      }
    }
    state.clear();
    for (auto& [k, c] : next)
      if (!c.is_zero()) state.emplace(k, c);
  };
  for (const Word* w : {&a, &b})
    for (int g = 0; g < 3; ++g)
      for (int k = 0; k < (*w)[g]; ++k) apply(g);
  SpinPoly out;
  for (const auto& [k, c] : state) out.push_back({c, k.second, k.first});
  return out;
}

const SpinPoly& spin_product(const Word& a, const Word& b, SpinMode mode) {
  thread_local std::map<std::tuple<Word, Word, SpinMode>, SpinPoly> cache;
  auto key = std::tuple{a, b, mode};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  SpinPoly p = mode == SpinMode::Abstract ? spin_product_abstract(a, b) : spin_product_half(a, b);
  return cache.emplace(key, std::move(p)).first->second;
}

// ---------------------------------------------------------------------------
// Products of monomial keys.

struct StructTerm {
  GaussRational c;
  int hbar_power;
  OpKey key;
};

struct KeyPair {
  OpKey a;
  OpKey b;
  SpinMode mode;
  bool operator==(const KeyPair&) const = default;
};

struct KeyPairHash {
  std::size_t operator()(const KeyPair& k) const {
    static_assert(sizeof(OpKey) == 10);
    char buf[21];
    std::memcpy(buf, &k.a, 10);
    std::memcpy(buf + 10, &k.b, 10);
    buf[20] = static_cast<char>(k.mode);
    return std::hash<std::string_view>{}(std::string_view(buf, sizeof buf));
  }
};

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// (-i)^n
GaussRational minus_i_power(int n) {
  switch (n % 4) {
    case 0: return GaussRational(1);
    case 1: return GaussRational(0, -1);
    case 2: return GaussRational(-1);
    default: return GaussRational(0, 1);
  }
}

std::vector<StructTerm> key_product_uncached(const OpKey& a, const OpKey& b, SpinMode mode) {
  const SpinPoly& spins = spin_product(a.spin, b.spin, mode);
  PosKey fa{a.pos, a.rad};
  PosKey fb{b.pos, b.rad};
  std::map<std::pair<OpKey, int>, GaussRational> acc;
  // p^alpha F = sum_beta C(alpha, beta) (-i hbar)^|beta| (d^beta F) p^(alpha - beta)
  for (int bx = 0; bx <= a.mom[0]; ++bx)
    for (int by = 0; by <= a.mom[1]; ++by)
      for (int bz = 0; bz <= a.mom[2]; ++bz) {
        const PosPoly& d = partial(fb, {bx, by, bz});
        if (d.empty()) continue;
        int order = bx + by + bz;
        GaussRational pref = GaussRational(static_cast<long>(binomial(a.mom[0], bx) * binomial(a.mom[1], by) *
                                           binomial(a.mom[2], bz))) *
                             minus_i_power(order);
        std::array<std::int8_t, 3> mom{narrow_exp(a.mom[0] - bx + b.mom[0]),
                                       narrow_exp(a.mom[1] - by + b.mom[1]),
                                       narrow_exp(a.mom[2] - bz + b.mom[2])};
        for (const auto& [dc, dk] : d) {
          for (const auto& [pc, pk] : multiply(fa, PosPoly{{dc, dk}})) {
            for (const auto& s : spins) {
              OpKey k{pk.pos, pk.rad, mom, s.word};
              acc[{k, order + s.hbar_power}] += pref * GaussRational(static_cast<long>(pc)) * s.c;
            }
          }
        }
      }
  std::vector<StructTerm> out;
  out.reserve(acc.size());
  for (const auto& [k, c] : acc)
    if (!c.is_zero()) out.push_back({c, k.second, k.first});
  return out;
}

const std::vector<StructTerm>& key_product(const OpKey& a, const OpKey& b, SpinMode mode) {
  thread_local std::unordered_map<KeyPair, std::vector<StructTerm>, KeyPairHash> cache;
  KeyPair kp{a, b, mode};
  if (auto it = cache.find(kp); it != cache.end()) return it->second;
  return cache.emplace(kp, key_product_uncached(a, b, mode)).first->second;
}

struct OpKeyHash {
  std::size_t operator()(const OpKey& k) const {
    char buf[10];
    std::memcpy(buf, &k, 10);
    return std::hash<std::string_view>{}(std::string_view(buf, sizeof buf));
  }
};

const SymbolRegistry* merge_reg(const SymbolRegistry* a, const SymbolRegistry* b) {
  if (a && b && a != b) throw UsageError("operator expressions from different symbol registries");
  return a ? a : b;
}

std::string power_str(const std::string& base, int e) {
  return e == 1 ? base : base + "^" + std::to_string(e);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string OpKey::str() const {
  std::vector<std::string> f;
  for (int u = 0; u < 3; ++u)
    if (pos[u]) f.push_back(power_str(std::string("r_") + "xyz"[u], pos[u]));
  if (rad) f.push_back("r^" + std::to_string(rad));
  for (int u = 0; u < 3; ++u)
    if (mom[u]) f.push_back(power_str(std::string("p_") + "xyz"[u], mom[u]));
  for (int u = 0; u < 3; ++u)
    if (spin[u]) f.push_back(power_str(std::string("S_") + "xyz"[u], spin[u]));
  std::string s;
  for (const auto& x : f) s += (s.empty() ? "" : "*") + x;
  return s.empty() ? "1" : s;
}

OperatorExpr::OperatorExpr(ScalarCoeff c) {
  registry_ = c.registry();
  if (!c.is_zero()) terms_.emplace_back(OpKey{}, std::move(c));
}

OperatorExpr OperatorExpr::from_terms(const SymbolRegistry* reg, std::vector<Term> terms) {
  OperatorExpr e;
  e.registry_ = reg;
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  for (auto& t : terms) {
    e.registry_ = merge_reg(e.registry_, t.second.registry());
    if (!e.terms_.empty() && e.terms_.back().first == t.first) {
      e.terms_.back().second += t.second;
      if (e.terms_.back().second.is_zero()) e.terms_.pop_back();
    } else if (!t.second.is_zero()) {
      e.terms_.push_back(std::move(t));
    }
  }
  return e;
}

namespace {
OperatorExpr single(const SymbolRegistry& reg, const OpKey& k) {
  return OperatorExpr::from_terms(&reg, {{k, ScalarCoeff::monomial(&reg, {}, 1)}});
}
}  // namespace

OperatorExpr OperatorExpr::position(const SymbolRegistry& reg, Axis a) {
  OpKey k;
  k.pos[static_cast<int>(a)] = 1;
  return single(reg, k);
}

OperatorExpr OperatorExpr::momentum(const SymbolRegistry& reg, Axis a) {
  OpKey k;
  k.mom[static_cast<int>(a)] = 1;
  return single(reg, k);
}

OperatorExpr OperatorExpr::spin(const SymbolRegistry& reg, Axis a) {
  OpKey k;
  k.spin[static_cast<int>(a)] = 1;
  return single(reg, k);
}

OperatorExpr OperatorExpr::radial(const SymbolRegistry& reg, int m) {
  OpKey k;
  k.rad = narrow_exp(m);
  return single(reg, k);
}

bool OperatorExpr::is_scalar() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first.is_identity());
}

ScalarCoeff OperatorExpr::scalar_value() const {
  if (!is_scalar()) throw UsageError("operator expression is not a scalar: " + str());
  return terms_.empty() ? ScalarCoeff() : terms_.front().second;
}

int OperatorExpr::momentum_degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.momentum_degree());
  return d;
}

int OperatorExpr::spin_degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, k.spin_degree());
  return d;
}

OperatorExpr OperatorExpr::operator-() const {
  OperatorExpr r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& o) {
  registry_ = merge_reg(registry_, o.registry_);
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
      ScalarCoeff c = i->second + j->second;
      if (!c.is_zero()) out.emplace_back(i->first, std::move(c));
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& o) { return *this += -o; }

std::string OperatorExpr::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : terms_) {
    std::string cs = c.str();
    std::string t;
    if (k.is_identity()) {
      t = c.is_monomial() ? cs : "(" + cs + ")";
    } else if (c.is_monomial() && c.terms().front().first.empty() && c.terms().front().second.is_one()) {
      t = k.str();
    } else if (c.is_monomial() && c.terms().front().first.empty() &&
               c.terms().front().second == GaussRational(-1)) {
      t = "-" + k.str();
    } else {
      t = (c.is_monomial() ? cs : "(" + cs + ")") + "*" + k.str();
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

bool MatExpr::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](const OperatorExpr& e) { return e.is_zero(); });
}

VecExpr position_vector(const SymbolRegistry& reg) {
  VecExpr v;
  for (auto a : kAxes) v[a] = OperatorExpr::position(reg, a);
  return v;
}

VecExpr momentum_vector(const SymbolRegistry& reg) {
  VecExpr v;
  for (auto a : kAxes) v[a] = OperatorExpr::momentum(reg, a);
  return v;
}

VecExpr spin_vector(const SymbolRegistry& reg) {
  VecExpr v;
  for (auto a : kAxes) v[a] = OperatorExpr::spin(reg, a);
  return v;
}

VecExpr orbital_angular_momentum(const SymbolRegistry& reg) {
  return cross(position_vector(reg), momentum_vector(reg), SpinMode::Abstract);
}

OperatorExpr mul(const OperatorExpr& a, const OperatorExpr& b, SpinMode mode) {
  const SymbolRegistry* reg = merge_reg(a.registry(), b.registry());
  if (a.is_zero() || b.is_zero()) return OperatorExpr::from_terms(reg, {});
  std::unordered_map<OpKey, ScalarCoeff, OpKeyHash> acc;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const auto& st = key_product(ka, kb, mode);
      if (st.empty()) continue;
      ScalarCoeff cab = ca * cb;
      for (const auto& t : st) {
        if (t.hbar_power != 0 && reg == nullptr)
          throw UsageError("operator product needs a symbol registry for hbar");
        auto [it, inserted] = acc.try_emplace(t.key);
        it->second += cab.scaled(t.c, t.hbar_power, reg);
      }
    }
  }
  std::vector<OperatorExpr::Term> terms;
  terms.reserve(acc.size());
  for (auto& [k, c] : acc)
    if (!c.is_zero()) terms.emplace_back(k, std::move(c));
  return OperatorExpr::from_terms(reg, std::move(terms));
}

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b, SpinMode mode) {
  return mul(a, b, mode) - mul(b, a, mode);
}

OperatorExpr scale(const ScalarCoeff& c, const OperatorExpr& a) {
  const SymbolRegistry* reg = merge_reg(c.registry(), a.registry());
  std::vector<OperatorExpr::Term> terms;
  if (!c.is_zero()) {
    terms.reserve(a.terms().size());
    for (const auto& [k, v] : a.terms()) terms.emplace_back(k, c * v);
  }
  return OperatorExpr::from_terms(reg, std::move(terms));
}

bool is_zero(const OperatorExpr& a) { return a.is_zero(); }

VecExpr cross(const VecExpr& a, const VecExpr& b, SpinMode mode) {
  VecExpr r;
  for (int w = 0; w < 3; ++w) {
    int u = (w + 1) % 3;
    int v = (w + 2) % 3;
    r[w] = mul(a[u], b[v], mode) - mul(a[v], b[u], mode);
  }
  return r;
}

OperatorExpr dot(const VecExpr& a, const VecExpr& b, SpinMode mode) {
  return mul(a[0], b[0], mode) + mul(a[1], b[1], mode) + mul(a[2], b[2], mode);
}

VecExpr scale(const ScalarCoeff& c, const VecExpr& a) {
  return {{scale(c, a[0]), scale(c, a[1]), scale(c, a[2])}};
}

VecExpr mul(const OperatorExpr& a, const VecExpr& v, SpinMode mode) {
  return {{mul(a, v[0], mode), mul(a, v[1], mode), mul(a, v[2], mode)}};
}

VecExpr mul(const VecExpr& v, const OperatorExpr& a, SpinMode mode) {
  return {{mul(v[0], a, mode), mul(v[1], a, mode), mul(v[2], a, mode)}};
}

OperatorExpr reduce_spin_half(const OperatorExpr& a) {
  const SymbolRegistry* reg = a.registry();
  std::vector<OperatorExpr::Term> terms;
  for (const auto& [k, c] : a.terms()) {
    if (k.spin_degree() <= 1) {
      terms.emplace_back(k, c);
      continue;
    }
    for (const auto& s : spin_product(k.spin, Word{}, SpinMode::SpinHalf)) {
      OpKey nk = k;
      nk.spin = s.word;
      terms.emplace_back(nk, c.scaled(s.c, s.hbar_power, reg));
    }
  }
  return OperatorExpr::from_terms(reg, std::move(terms));
}

OperatorExpr map_coefficients(const OperatorExpr& a, const std::function<ScalarCoeff(const ScalarCoeff&)>& f) {
  std::vector<OperatorExpr::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& [k, c] : a.terms()) terms.emplace_back(k, f(c));
  return OperatorExpr::from_terms(a.registry(), std::move(terms));
}

OperatorExpr substitute(const OperatorExpr& a, SymbolId sym, const GaussRational& value) {
  return map_coefficients(a, [&](const ScalarCoeff& c) { return c.substitute(sym, value); });
}

}  // namespace so4atom
