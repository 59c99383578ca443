// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include "so4atom/numeric_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace so4atom {

namespace {

// Multi-indices up to kMaxOrder in graded order, with the product and shift
// tables used by jet arithmetic.
struct Layout {
  struct Triple {
    int i, j, k;
  };
  std::vector<std::array<int, 3>> alpha;
  std::vector<int> size_upto;     // number of multi-indices of degree <= o
  std::vector<int> triples_upto;  // number of product triples with |alpha_k| <= o
  std::vector<Triple> triples;
  std::vector<std::array<int, 3>> shift;  // index of alpha + e_u, -1 past the end
  std::vector<int> lookup;

  static constexpr int kSide = Jet::kMaxOrder + 1;
  int index(int a, int b, int c) const { return lookup[(a * kSide + b) * kSide + c]; }

  Layout() {
    constexpr int K = Jet::kMaxOrder;
    lookup.assign(kSide * kSide * kSide, -1);
    for (int d = 0; d <= K; ++d) {
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b) {
          int c = d - a - b;
          lookup[(a * kSide + b) * kSide + c] = static_cast<int>(alpha.size());
          alpha.push_back({a, b, c});
        }
      size_upto.push_back(static_cast<int>(alpha.size()));
    }
    for (const auto& al : alpha) {
      std::array<int, 3> s{};
      for (int u = 0; u < 3; ++u) {
        auto next = al;
        ++next[u];
        s[u] = next[0] + next[1] + next[2] <= K ? index(next[0], next[1], next[2]) : -1;
      }
      shift.push_back(s);
    }
    int k = 0;
    for (int d = 0; d <= K; ++d) {
      for (; k < size_upto[d]; ++k) {
        const auto& ak = alpha[k];
        for (int a = 0; a <= ak[0]; ++a)
          for (int b = 0; b <= ak[1]; ++b)
            for (int c = 0; c <= ak[2]; ++c)
              triples.push_back({index(a, b, c), index(ak[0] - a, ak[1] - b, ak[2] - c), k});
      }
      triples_upto.push_back(static_cast<int>(triples.size()));
    }
  }
};

const Layout& layout() {
  static const Layout l;
  return l;
}

void check_order(int order) {
  if (order < 0 || order > Jet::kMaxOrder)
    throw UsageError("jet order " + std::to_string(order) + " outside 0.." + std::to_string(Jet::kMaxOrder));
}

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

Jet::Jet(int order) : order_(order) {
  check_order(order);
  c_.assign(layout().size_upto[order], Complex(0));
}

Jet Jet::constant(int order, Complex c) {
  Jet j(order);
  j.c_[0] = c;
  return j;
}

Jet Jet::variable(int order, int axis, double x0) {
  Jet j(order);
  j.c_[0] = x0;
  if (order >= 1) j.c_[1 + axis] = 1;  // degree-1 entries are x, y, z in that order
  return j;
}

Complex Jet::coefficient(int a, int b, int c) const {
  if (a < 0 || b < 0 || c < 0 || a + b + c > order_) throw UsageError("jet coefficient beyond the truncation order");
  return c_[layout().index(a, b, c)];
}

Complex Jet::partial(int a, int b, int c) const {
  return coefficient(a, b, c) * (factorial(a) * factorial(b) * factorial(c));
}

Jet Jet::derivative(int axis) const {
  if (order_ == 0) throw UsageError("jet order too small for the momentum degree");
  const Layout& l = layout();
  Jet d(order_ - 1);
  for (std::size_t i = 0; i < d.c_.size(); ++i) d.c_[i] = c_[l.shift[i][axis]] * double(l.alpha[i][axis] + 1);
  return d;
}

Jet Jet::truncated(int order) const {
  if (order > order_) throw UsageError("cannot raise a jet's order");
  Jet t(order);
  std::copy_n(c_.begin(), t.c_.size(), t.c_.begin());
  return t;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(Complex s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet n = *this;
  for (auto& x : n.c_) x = -x;
  return n;
}

Jet operator*(const Jet& a, const Jet& b) {
  const Layout& l = layout();
  Jet out(std::min(a.order_, b.order_));
  const int end = l.triples_upto[out.order_];
  for (int t = 0; t < end; ++t) {
    const auto& tr = l.triples[t];
    out.c_[tr.k] += a.c_[tr.i] * b.c_[tr.j];
  }
  return out;
}

Jet exp(const Jet& g) {
  Jet h = g - Jet::constant(g.order(), g.value());
  Jet sum = Jet::constant(g.order(), 1);
  Jet term = sum;
  for (int k = 1; k <= g.order(); ++k) {
    term = term * h * Complex(1.0 / k);
    sum += term;
  }
  return sum * std::exp(g.value());
}

Jet pow(const Jet& g, double a) {
  Complex g0 = g.value();
  if (g0 == Complex(0)) throw DomainError("power of a jet with zero value");
  Jet h = g * (1.0 / g0) - Jet::constant(g.order(), 1);
  Jet sum = Jet::constant(g.order(), 1);
  Jet term = sum;
  double binom = 1;
  for (int k = 1; k <= g.order(); ++k) {
    binom *= (a - k + 1) / k;
    term = term * h;
    sum += term * Complex(binom);
  }
  Complex scale = g0.imag() == 0 && g0.real() > 0 ? Complex(std::pow(g0.real(), a)) : std::pow(g0, a);
  return sum * scale;
}

// --- states ----------------------------------------------------------------

TestState TestState::gaussian(double width, Spinor spinor) {
  TestState s;
  s.width = width;
  for (auto& p : s.poly) p[0] = 1;
  s.spinor = spinor;
  return s;
}

SpinorJet TestState::jet(const Point& x, int order) const {
  std::array<Jet, 3> v = {Jet::variable(order, 0, x[0]), Jet::variable(order, 1, x[1]),
                          Jet::variable(order, 2, x[2])};
  Jet q(order);
  for (int u = 0; u < 3; ++u) {
    Jet d = v[u] - Jet::constant(order, center[u]);
    q += d * d;
  }
  Jet g = exp(q * Complex(-1.0 / (2 * width * width)));
  const std::array<Jet, 10> mono = {Jet::constant(order, 1), v[0], v[1], v[2], v[0] * v[0], v[1] * v[1],
                                    v[2] * v[2], v[0] * v[1], v[0] * v[2], v[1] * v[2]};
  SpinorJet out;
  for (int k = 0; k < 2; ++k) {
    Jet p(order);
    for (int m = 0; m < 10; ++m)
      if (poly[k][m] != Complex(0)) p += mono[m] * poly[k][m];
    out.c[k] = g * p * spinor[k];
  }
  return out;
}

// --- parameters ------------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Complex symbol_value(const std::string& name, const OracleOptions& opts) {
  if (name == "hbar") return opts.hbar;
  if (name == "M") return opts.mass;
  if (name == "kappa") return opts.kappa;
  if (name == "k1") return opts.k1;
  if (name == "k2") return opts.k2;
  if (name == "mu") return opts.mu;
  std::mt19937_64 rng(opts.seed ^ fnv1a(name));
  return std::uniform_real_distribution<double>(opts.symbol_min, opts.symbol_max)(rng);
}

std::vector<Complex> registry_values(const SymbolRegistry& reg, const OracleOptions& opts) {
  std::vector<Complex> out;
  for (std::size_t id = 0; id < reg.size(); ++id) out.push_back(symbol_value(reg.name(static_cast<SymbolId>(id)), opts));
  return out;
}

std::vector<TestState> random_states(const OracleOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1, 1);
  auto cplx = [&](double scale) { return Complex(scale * unit(rng), scale * unit(rng)); };
  std::vector<TestState> states;
  for (int s = 0; s < opts.states; ++s) {
    TestState st;
    st.width = 1.1 + 0.3 * unit(rng);
    for (auto& c : st.center) c = 0.3 * unit(rng);
    for (auto& p : st.poly) {
      p[0] = Complex(1) + cplx(0.2);
      for (int m = 1; m < 10; ++m) p[m] = cplx(0.5);
    }
    do {
      st.spinor = {cplx(1), cplx(1)};
    } while (std::norm(st.spinor[0]) + std::norm(st.spinor[1]) < 0.1);
    states.push_back(st);
  }
  return states;
}

std::vector<Point> sample_points(const TestState& state, std::uint64_t stream, const OracleOptions& opts) {
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x50494e54u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(opts.shell_min, opts.shell_max);
  const double guard = opts.guard_factor * state.width;
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < opts.points_per_state) {
    Point d = {normal(rng), normal(rng), normal(rng)};
    double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    double r = radius(rng);
    if (n < 1e-6 || r < guard) continue;
    pts.push_back({d[0] / n * r, d[1] / n * r, d[2] / n * r});
  }
  return pts;
}

// --- normal-form evaluation ------------------------------------------------

namespace {

using SpinMatrix = std::array<std::array<Complex, 2>, 2>;

SpinMatrix pauli(int u, double hbar) {
  const Complex h = hbar / 2;
  const Complex i(0, 1);
  switch (u) {
    case 0: return {{{0, h}, {h, 0}}};
    case 1: return {{{0, -i * h}, {i * h, 0}}};
    default: return {{{h, 0}, {0, -h}}};
  }
}

SpinMatrix matmul(const SpinMatrix& a, const SpinMatrix& b) {
  SpinMatrix c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

double norm2(const Spinor& s) { return std::sqrt(std::norm(s[0]) + std::norm(s[1])); }

void check_guard(const TestState& state, const Point& x, double guard_factor) {
  double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (r < guard_factor * state.width) throw UsageError("evaluation point inside the guard radius");
}

}  // namespace

Spinor apply(const OperatorExpr& expr, const TestState& state, const Point& x, const std::vector<Complex>& values,
             int order, double guard_factor) {
  if (order < expr.momentum_degree())
    throw UsageError("jet order " + std::to_string(order) + " below momentum degree " +
                     std::to_string(expr.momentum_degree()));
  check_guard(state, x, guard_factor);
  const double hbar = values.at(SymbolRegistry::kHbar).real();
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  SpinorJet psi = state.jet(x, order);
  Spinor out{0, 0};
  for (const auto& [key, coeff] : expr.terms()) {
    Complex c = coeff.evaluate(values);
    c *= std::pow(x[0], key.pos[0]) * std::pow(x[1], key.pos[1]) * std::pow(x[2], key.pos[2]) * std::pow(r, key.rad);
    c *= std::pow(Complex(0, -hbar), key.momentum_degree());
    Spinor d = {psi.c[0].partial(key.mom[0], key.mom[1], key.mom[2]),
                psi.c[1].partial(key.mom[0], key.mom[1], key.mom[2])};
    SpinMatrix m = {{{1, 0}, {0, 1}}};
    for (int u = 0; u < 3; ++u)
      for (int k = 0; k < key.spin[u]; ++k) m = matmul(m, pauli(u, hbar));
    out[0] += c * (m[0][0] * d[0] + m[0][1] * d[1]);
    out[1] += c * (m[1][0] * d[0] + m[1][1] * d[1]);
  }
  return out;
}

// --- compositional evaluation ----------------------------------------------

namespace {

enum class NShape { Zero, Scalar, Vector, Matrix };

bool literal_zero(const Ast& a) { return a.kind == Ast::Kind::Num && sgn(a.num) == 0; }

int integer_literal(const Ast& a) {
  if (a.kind == Ast::Kind::Num && a.num.get_den() == 1) return static_cast<int>(a.num.get_num().get_si());
  if (a.kind == Ast::Kind::Neg) return -integer_literal(*a.args[0]);
  throw UsageError("exponent must be an integer literal");
}

SpinorJet zero_like(const SpinorJet& psi) { return {{Jet(psi.c[0].order()), Jet(psi.c[1].order())}}; }

SpinorJet operator+(const SpinorJet& a, const SpinorJet& b) { return {{a.c[0] + b.c[0], a.c[1] + b.c[1]}}; }
SpinorJet operator-(const SpinorJet& a, const SpinorJet& b) { return {{a.c[0] - b.c[0], a.c[1] - b.c[1]}}; }
SpinorJet operator*(Complex s, const SpinorJet& a) { return {{a.c[0] * s, a.c[1] * s}}; }
SpinorJet operator*(const Jet& f, const SpinorJet& a) { return {{f * a.c[0], f * a.c[1]}}; }

// Lets and symbols of a file, shared by depth and evaluation.
struct Scope {
  std::map<std::string, const Ast*> lets;
  std::set<std::string> symbols;

  explicit Scope(const IdentityFile& f) {
    for (const auto& b : f.bindings) lets[b.name] = b.value.get();
    symbols.insert(f.symbols.begin(), f.symbols.end());
  }
  const Ast* let(const std::string& name) const {
    auto it = lets.find(name);
    return it == lets.end() ? nullptr : it->second;
  }
};

int depth_of(const Ast& a, const Scope& scope, std::map<const Ast*, int>& memo) {
  auto d = [&](const Ast& x) { return depth_of(x, scope, memo); };
  switch (a.kind) {
    case Ast::Kind::Num: return 0;
    case Ast::Kind::Sym: {
      const Ast* b = scope.let(a.name);
      if (!b) return 0;
      if (auto it = memo.find(b); it != memo.end()) return it->second;
      int v = d(*b);
      memo[b] = v;
      return v;
    }
    case Ast::Kind::VecBuiltin: return a.name == "p" || a.name == "l" ? 1 : 0;
    case Ast::Kind::Index:
    case Ast::Kind::Neg: return d(*a.args[0]);
    case Ast::Kind::Commutator: return d(*a.args[0]) + d(*a.args[1]);
    case Ast::Kind::BinOp:
      switch (a.op) {
        case '+':
        case '-': return std::max(d(*a.args[0]), d(*a.args[1]));
        case '*': return d(*a.args[0]) + d(*a.args[1]);
        case '/': return d(*a.args[0]);
        case '^': {
          const Ast& base = *a.args[0];
          if (base.kind == Ast::Kind::VecBuiltin && base.name == "r") return 0;
          int n = integer_literal(*a.args[1]);
          return n < 0 ? 0 : n * d(base);
        }
      }
      return 0;
    case Ast::Kind::Apply:
      if (a.name == "cross" || a.name == "dot") return d(*a.args[0]) + d(*a.args[1]);
      if (a.name == "eps" || a.name == "delta") return d(*a.args[0]);
      return 0;
  }
  return 0;
}

class Evaluator {
 public:
  Evaluator(const Scope& scope, const OracleOptions& opts, const Point& x, int order)
      : scope_(scope), opts_(opts), order_(order) {
    for (int u = 0; u < 3; ++u) x_[u] = Jet::variable(order, u, x[u]);
    r2_ = x_[0] * x_[0] + x_[1] * x_[1] + x_[2] * x_[2];
  }

  NShape shape(const Ast& a) {
    switch (a.kind) {
      case Ast::Kind::Num: return literal_zero(a) ? NShape::Zero : NShape::Scalar;
      case Ast::Kind::Sym: {
        const Ast* b = scope_.let(a.name);
        if (!b) return NShape::Scalar;
        if (auto it = shapes_.find(a.name); it != shapes_.end()) return it->second;
        NShape s = shape(*b);
        shapes_[a.name] = s;
        return s;
      }
      case Ast::Kind::VecBuiltin: return NShape::Vector;
      case Ast::Kind::Index: return NShape::Scalar;
      case Ast::Kind::Neg: return shape(*a.args[0]);
      case Ast::Kind::BinOp: {
        NShape l = shape(*a.args[0]);
        NShape r = shape(*a.args[1]);
        switch (a.op) {
          case '+':
          case '-': return l == NShape::Zero ? r : l;
          case '*':
            if (l == NShape::Zero || r == NShape::Zero) return NShape::Zero;
            return l == NShape::Scalar ? r : l;
          case '/': return l;
          case '^': return NShape::Scalar;
        }
        return NShape::Scalar;
      }
      case Ast::Kind::Commutator: {
        NShape l = shape(*a.args[0]);
        NShape r = shape(*a.args[1]);
        if (l == NShape::Vector && r == NShape::Vector) return NShape::Matrix;
        return l == NShape::Vector || r == NShape::Vector ? NShape::Vector : NShape::Scalar;
      }
      case Ast::Kind::Apply:
        if (a.name == "cross" || a.name == "unitr") return NShape::Vector;
        if (a.name == "eps" || a.name == "delta") return NShape::Matrix;
        return NShape::Scalar;
    }
    return NShape::Scalar;
  }

  // Component `comp` of `a` applied to psi: 0 for scalars, u for vectors,
  // 3u + v for matrices.
  SpinorJet apply(const Ast& a, int comp, const SpinorJet& psi) {
    switch (a.kind) {
      case Ast::Kind::Num: return Complex(a.num.get_d()) * psi;
      case Ast::Kind::Sym: {
        if (a.name == "i") return Complex(0, 1) * psi;
        if (const Ast* b = scope_.let(a.name)) return apply(*b, comp, psi);
        return value(a.name) * psi;
      }
      case Ast::Kind::VecBuiltin: return builtin(a.name, comp, psi);
      case Ast::Kind::Index: return apply(*a.args[0], static_cast<int>(a.axis), psi);
      case Ast::Kind::Neg: return Complex(-1) * apply(*a.args[0], comp, psi);
      case Ast::Kind::BinOp: return binop(a, comp, psi);
      case Ast::Kind::Commutator: {
        auto [l, r] = commutator_args(a, comp);
        const Ast& x = *a.args[0];
        const Ast& y = *a.args[1];
        return apply(x, l, apply(y, r, psi)) - apply(y, r, apply(x, l, psi));
      }
      case Ast::Kind::Apply: return function(a, comp, psi);
    }
    throw UsageError("malformed expression");
  }

  // Signed additive pieces whose sum is apply(a, comp, psi).
  void pieces(const Ast& a, int comp, const SpinorJet& psi, Complex sign, std::vector<SpinorJet>& out) {
    switch (a.kind) {
      case Ast::Kind::Sym:
        if (const Ast* b = scope_.let(a.name)) return pieces(*b, comp, psi, sign, out);
        break;
      case Ast::Kind::Neg: return pieces(*a.args[0], comp, psi, -sign, out);
      case Ast::Kind::BinOp:
        if (a.op == '+' || a.op == '-') {
          if (!literal_zero(*a.args[0])) pieces(*a.args[0], comp, psi, sign, out);
          if (!literal_zero(*a.args[1])) pieces(*a.args[1], comp, psi, a.op == '+' ? sign : -sign, out);
          return;
        }
        if (a.op == '/') return pieces(*a.args[0], comp, psi, sign / constant(*a.args[1]), out);
        if (a.op == '*') {
          // Distribute over the left factor; constant factors scale the
          // pieces of the other side.
          const Ast& l = *a.args[0];
          const Ast& r = *a.args[1];
          NShape ls = shape(l);
          NShape rs = shape(r);
          if (ls == NShape::Zero || rs == NShape::Zero) return;
          if (is_constant(l)) return pieces(r, comp, psi, sign * constant(l), out);
          if (is_constant(r)) return pieces(l, comp, psi, sign * constant(r), out);
          if (ls == NShape::Scalar) return pieces(l, 0, apply(r, comp, psi), sign, out);
          return pieces(l, comp, apply(r, 0, psi), sign, out);
        }
        break;
      case Ast::Kind::Commutator: {
        auto [l, r] = commutator_args(a, comp);
        const Ast& x = *a.args[0];
        const Ast& y = *a.args[1];
        out.push_back(sign * apply(x, l, apply(y, r, psi)));
        out.push_back(-sign * apply(y, r, apply(x, l, psi)));
        return;
      }
      case Ast::Kind::Apply:
        if (a.name == "cross") {
          for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
              if (int e = levi_civita(comp, u, v))
                out.push_back(Complex(e) * sign * apply(*a.args[0], u, apply(*a.args[1], v, psi)));
          return;
        }
        if (a.name == "dot") {
          for (int u = 0; u < 3; ++u) out.push_back(sign * apply(*a.args[0], u, apply(*a.args[1], u, psi)));
          return;
        }
        break;
      default: break;
    }
    if (shape(a) == NShape::Zero) return;
    out.push_back(sign * apply(a, comp, psi));
  }

  // Operator-free scalar: numbers, symbols and their combinations.
  bool is_constant(const Ast& a) {
    switch (a.kind) {
      case Ast::Kind::Num: return true;
      case Ast::Kind::Sym: {
        const Ast* b = scope_.let(a.name);
        if (!b) return true;
        if (auto it = constant_lets_.find(a.name); it != constant_lets_.end()) return it->second;
        bool c = is_constant(*b);
        constant_lets_[a.name] = c;
        return c;
      }
      case Ast::Kind::Neg: return is_constant(*a.args[0]);
      case Ast::Kind::BinOp:
        if (a.op == '^') {
          const Ast& base = *a.args[0];
          return !(base.kind == Ast::Kind::VecBuiltin) && is_constant(base);
        }
        return is_constant(*a.args[0]) && is_constant(*a.args[1]);
      default: return false;
    }
  }

  Complex constant(const Ast& a) {
    switch (a.kind) {
      case Ast::Kind::Num: return a.num.get_d();
      case Ast::Kind::Sym:
        if (a.name == "i") return Complex(0, 1);
        if (const Ast* b = scope_.let(a.name)) return constant(*b);
        return value(a.name);
      case Ast::Kind::Neg: return -constant(*a.args[0]);
      case Ast::Kind::BinOp:
        switch (a.op) {
          case '+': return constant(*a.args[0]) + constant(*a.args[1]);
          case '-': return constant(*a.args[0]) - constant(*a.args[1]);
          case '*': return constant(*a.args[0]) * constant(*a.args[1]);
          case '/': return constant(*a.args[0]) / constant(*a.args[1]);
          case '^': return std::pow(constant(*a.args[0]), integer_literal(*a.args[1]));
        }
        break;
      default: break;
    }
    throw UsageError("expected a scalar constant");
  }

 private:
  Complex value(const std::string& name) {
    auto it = values_.find(name);
    if (it != values_.end()) return it->second;
    if (!scope_.symbols.count(name) && name != "hbar" && name != "M" && name != "kappa" && name != "k1" &&
        name != "k2" && name != "mu")
      throw UsageError("unbound name '" + name + "'");
    Complex v = symbol_value(name, opts_);
    values_[name] = v;
    return v;
  }

  const Jet& radial(int m) {
    auto it = rpow_.find(m);
    if (it == rpow_.end()) it = rpow_.emplace(m, pow(r2_, m / 2.0)).first;
    return it->second;
  }

  SpinorJet momentum(int u, const SpinorJet& psi) {
    Complex f(0, -opts_.hbar);
    return {{psi.c[0].derivative(u) * f, psi.c[1].derivative(u) * f}};
  }

  SpinorJet spin(int u, const SpinorJet& psi) {
    SpinMatrix m = pauli(u, opts_.hbar);
    return {{psi.c[0] * m[0][0] + psi.c[1] * m[0][1], psi.c[0] * m[1][0] + psi.c[1] * m[1][1]}};
  }

  SpinorJet builtin(const std::string& name, int u, const SpinorJet& psi) {
    if (name == "r") return x_[u] * psi;
    if (name == "p") return momentum(u, psi);
    if (name == "S") return spin(u, psi);
    // l_u = e_uvw r_v p_w
    SpinorJet out = zero_like(psi);
    bool first = true;
    for (int v = 0; v < 3; ++v)
      for (int w = 0; w < 3; ++w)
        if (int e = levi_civita(u, v, w)) {
          SpinorJet t = Complex(e) * (x_[v] * momentum(w, psi));
          out = first ? t : out + t;
          first = false;
        }
    return out;
  }

  std::pair<int, int> commutator_args(const Ast& a, int comp) {
    NShape l = shape(*a.args[0]);
    NShape r = shape(*a.args[1]);
    if (l == NShape::Vector && r == NShape::Vector) return {comp / 3, comp % 3};
    return {l == NShape::Vector ? comp : 0, r == NShape::Vector ? comp : 0};
  }

  SpinorJet binop(const Ast& a, int comp, const SpinorJet& psi) {
    const Ast& l = *a.args[0];
    const Ast& r = *a.args[1];
    switch (a.op) {
      case '+':
      case '-': {
        if (literal_zero(r)) return apply(l, comp, psi);
        SpinorJet rv = apply(r, comp, psi);
        if (literal_zero(l)) return a.op == '+' ? rv : Complex(-1) * rv;
        SpinorJet lv = apply(l, comp, psi);
        return a.op == '+' ? lv + rv : lv - rv;
      }
      case '*': {
        NShape ls = shape(l);
        NShape rs = shape(r);
        if (ls == NShape::Zero || rs == NShape::Zero) return zero_like(psi);
        if (ls == NShape::Scalar) return apply(l, 0, apply(r, comp, psi));
        return apply(l, comp, apply(r, 0, psi));
      }
      case '/': return (Complex(1) / constant(r)) * apply(l, comp, psi);
      case '^': {
        int n = integer_literal(r);
        if (l.kind == Ast::Kind::VecBuiltin && l.name == "r") return radial(n) * psi;
        if (shape(l) == NShape::Vector) {
          SpinorJet out = apply(l, 0, apply(l, 0, psi));
          for (int u = 1; u < 3; ++u) out = out + apply(l, u, apply(l, u, psi));
          return out;
        }
        if (n < 0) return std::pow(constant(l), n) * psi;
        SpinorJet out = psi;
        for (int k = 0; k < n; ++k) out = apply(l, 0, out);
        return out;
      }
    }
    throw UsageError("unknown operator");
  }

  SpinorJet function(const Ast& a, int comp, const SpinorJet& psi) {
    const std::string& fn = a.name;
    if (fn == "cross" || fn == "dot") {
      std::vector<SpinorJet> parts;
      pieces(a, comp, psi, 1, parts);
      SpinorJet out = zero_like(psi);
      for (const auto& p : parts) out = out + p;
      return out;
    }
    if (fn == "unitr") return (x_[comp] * radial(-1)) * psi;
    if (fn == "rpow") return radial(integer_literal(*a.args[0])) * psi;
    if (fn == "eps") {
      int u = comp / 3;
      int w = comp % 3;
      for (int k = 0; k < 3; ++k)
        if (int e = levi_civita(u, w, k)) return Complex(e) * apply(*a.args[0], k, psi);
      return zero_like(psi);
    }
    if (fn == "delta") return comp / 3 == comp % 3 ? apply(*a.args[0], 0, psi) : zero_like(psi);
    throw UsageError("unknown function '" + fn + "'");
  }

  const Scope& scope_;
  const OracleOptions& opts_;
  int order_;
  std::array<Jet, 3> x_;
  Jet r2_;
  std::map<int, Jet> rpow_;
  std::map<std::string, NShape> shapes_;
  std::map<std::string, bool> constant_lets_;
  std::map<std::string, Complex> values_;
};

int components(NShape s) { return s == NShape::Matrix ? 9 : s == NShape::Vector ? 3 : 1; }

}  // namespace

int momentum_depth(const Ast& ast, const IdentityFile& file) {
  Scope scope(file);
  std::map<const Ast*, int> memo;
  return depth_of(ast, scope, memo);
}

ResidualReport residual(const IdentityFile& file, const CheckSpec& check, const OracleOptions& opts) {
  Scope scope(file);
  std::map<const Ast*, int> memo;
  const int order = std::max(depth_of(*check.lhs, scope, memo), depth_of(*check.rhs, scope, memo));
  check_order(order);

  ResidualReport rep;
  rep.check_id = check.id;
  rep.mu = opts.mu;
  rep.seed = opts.seed;
  auto states = random_states(opts);
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (const Point& x : sample_points(states[s], s, opts)) {
      Evaluator ev(scope, opts, x, order);
      NShape ls = ev.shape(*check.lhs);
      NShape rs = ev.shape(*check.rhs);
      if (ls != NShape::Zero && rs != NShape::Zero && ls != rs) throw UsageError("sides of '" + check.id + "' differ in shape");
      const int n = components(ls == NShape::Zero ? rs : ls);
      SpinorJet psi = states[s].jet(x, order);
      double abs_res = 0;
      double lhs_scale = 0;
      double rhs_scale = 0;
      for (int c = 0; c < n; ++c) {
        std::vector<SpinorJet> parts;
        if (ls != NShape::Zero) ev.pieces(*check.lhs, c, psi, 1, parts);
        Spinor lhs{0, 0};
        for (const auto& p : parts) {
          Spinor v = p.value();
          lhs_scale = std::max(lhs_scale, norm2(v));
          lhs[0] += v[0];
          lhs[1] += v[1];
        }
        Spinor rhs{0, 0};
        if (rs != NShape::Zero) rhs = ev.apply(*check.rhs, c, psi).value();
        rhs_scale = std::max(rhs_scale, norm2(rhs));
        abs_res = std::max(abs_res, norm2({lhs[0] - rhs[0], lhs[1] - rhs[1]}));
      }
      double scale = lhs_scale > 0 ? lhs_scale : rhs_scale;
      double rel = scale > 0 ? abs_res / scale : (abs_res > 0 ? HUGE_VAL : 0);
      rep.max_abs_residual = std::max(rep.max_abs_residual, abs_res);
      rep.max_rel_residual = std::max(rep.max_rel_residual, rel);
      ++rep.num_points;
    }
  }
  return rep;
}

std::vector<double> oracle_regimes(MuPolicy policy) {
  switch (policy) {
    case MuPolicy::Zero: return {0};
    case MuPolicy::One: return {1};
    default: return {0, 1};
  }
}

double OracleOutcome::max_rel_residual() const {
  double m = 0;
  for (const auto& r : regimes) m = std::max(m, r.max_rel_residual);
  return m;
}

OracleOutcome oracle_check(const IdentityFile& file, const CheckSpec& check, const OracleOptions& opts,
                           double tol_pass, double tol_fail) {
  OracleOutcome out;
  out.id = check.id;
  out.expect = check.expect;
  for (double mu : oracle_regimes(check.mu)) {
    OracleOptions o = opts;
    o.mu = mu;
    out.regimes.push_back(residual(file, check, o));
  }
  if (check.expect == Expectation::Holds) {
    out.ok = std::all_of(out.regimes.begin(), out.regimes.end(),
                         [&](const ResidualReport& r) { return r.max_rel_residual < tol_pass; });
  } else {
    out.ok = out.max_rel_residual() > tol_fail;
  }
  return out;
}

}  // namespace so4atom
