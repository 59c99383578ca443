// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "so4atom/expr_language.hpp"

namespace so4atom {

Shape shape_of(const Value& v) { return static_cast<Shape>(v.index()); }

const char* to_string(Shape s) {
  switch (s) {
    case Shape::Scalar: return "scalar";
    case Shape::Vector: return "vector";
    case Shape::Matrix: return "matrix";
  }
  return "?";
}

bool is_zero(const Value& v) {
  return std::visit([](const auto& x) { return x.is_zero(); }, v);
}

namespace {

template <class F>
Value map_value(const Value& v, F&& f) {
  switch (shape_of(v)) {
    case Shape::Scalar: return f(std::get<OperatorExpr>(v));
    case Shape::Vector: {
      VecExpr r;
      for (int u = 0; u < 3; ++u) r[u] = f(std::get<VecExpr>(v)[u]);
      return r;
    }
    case Shape::Matrix: {
      MatExpr r;
      for (int k = 0; k < 9; ++k) r.c[k] = f(std::get<MatExpr>(v).c[k]);
      return r;
    }
  }
  return v;
}

template <class F>
Value zip_value(const Value& a, const Value& b, F&& f) {
  if (shape_of(a) != shape_of(b))
    throw UsageError(std::string("shape mismatch: ") + to_string(shape_of(a)) + " and " + to_string(shape_of(b)));
  switch (shape_of(a)) {
    case Shape::Scalar: return f(std::get<OperatorExpr>(a), std::get<OperatorExpr>(b));
    case Shape::Vector: {
      VecExpr r;
      for (int u = 0; u < 3; ++u) r[u] = f(std::get<VecExpr>(a)[u], std::get<VecExpr>(b)[u]);
      return r;
    }
    case Shape::Matrix: {
      MatExpr r;
      for (int k = 0; k < 9; ++k) r.c[k] = f(std::get<MatExpr>(a).c[k], std::get<MatExpr>(b).c[k]);
      return r;
    }
  }
  return a;
}

}  // namespace

Value value_sub(const Value& a, const Value& b) {
  return zip_value(a, b, [](const OperatorExpr& x, const OperatorExpr& y) { return x - y; });
}

Value reduce_spin_half(const Value& v) {
  return map_value(v, [](const OperatorExpr& x) { return reduce_spin_half(x); });
}

Value substitute(const Value& v, SymbolId sym, const GaussRational& value) {
  return map_value(v, [&](const OperatorExpr& x) { return substitute(x, sym, value); });
}

std::string value_str(const Value& v) {
  switch (shape_of(v)) {
    case Shape::Scalar: return std::get<OperatorExpr>(v).str();
    case Shape::Vector: {
      const auto& x = std::get<VecExpr>(v);
      std::string s;
      for (int u = 0; u < 3; ++u)
        if (!x[u].is_zero()) s += std::string(s.empty() ? "" : "; ") + "xyz"[u] + ": " + x[u].str();
      return s.empty() ? "0" : s;
    }
    case Shape::Matrix: {
      const auto& m = std::get<MatExpr>(v);
      std::string s;
      for (int u = 0; u < 3; ++u)
        for (int w = 0; w < 3; ++w)
          if (!m.at(u, w).is_zero())
            s += std::string(s.empty() ? "" : "; ") + "xyz"[u] + "xyz"[w] + ": " + m.at(u, w).str();
      return s.empty() ? "0" : s;
    }
  }
  return "?";
}

// --- Environment ---------------------------------------------------------

Environment::Environment(std::shared_ptr<SymbolRegistry> reg) : registry_(std::move(reg)) {
  if (!registry_) throw UsageError("environment needs a symbol registry");
  for (const char* n : {"hbar", "M", "kappa", "k1", "k2", "mu"}) symbols_[n] = true;
}

Environment Environment::from_file(const IdentityFile& f, std::shared_ptr<SymbolRegistry> reg) {
  Environment env(std::move(reg));
  for (const auto& s : f.symbols) env.declare_symbol(s);
  for (const auto& b : f.bindings) env.bind(b.name, b.value);
  return env;
}

SymbolId Environment::declare_symbol(const std::string& name) {
  if (bindings_.count(name)) throw UsageError("'" + name + "' is already a binding");
  symbols_[name] = true;
  return registry_->intern(name);
}

bool Environment::is_symbol(const std::string& name) const { return symbols_.count(name) > 0; }

void Environment::bind(const std::string& name, AstPtr value) {
  if (symbols_.count(name) || bindings_.count(name)) throw UsageError("'" + name + "' is already defined");
  bindings_[name] = std::move(value);
  order_.push_back(name);
}

AstPtr Environment::binding(const std::string& name) const {
  auto it = bindings_.find(name);
  return it == bindings_.end() ? nullptr : it->second;
}

const Value* Environment::cached(const std::string& name, SpinMode mode) const {
  auto it = cache_.find({name, mode});
  return it == cache_.end() ? nullptr : &it->second;
}

void Environment::store(const std::string& name, SpinMode mode, Value v) {
  cache_.insert_or_assign({name, mode}, std::move(v));
}

// --- elaboration ---------------------------------------------------------

namespace {

bool is_literal_zero(const Ast& a) { return a.kind == Ast::Kind::Num && sgn(a.num) == 0; }

class Elaborator {
 public:
  Elaborator(Environment& env, SpinMode mode) : env_(env), reg_(env.registry()), mode_(mode) {}

  Value run(const Ast& a) {
    try {
      return eval(a);
    } catch (const SourceError&) {
      throw;
    } catch (const Error& e) {
      throw ElabError(e.what(), a.span);
    }
  }

  Value eval(const Ast& a) {
    try {
      return eval_node(a);
    } catch (const SourceError&) {
      throw;
    } catch (const Error& e) {
      throw ElabError(e.what(), a.span);
    }
  }

 private:
  [[noreturn]] void fail(const Ast& a, const std::string& msg) { throw ElabError(msg, a.span); }

  OperatorExpr number(const GaussRational& q) { return OperatorExpr(ScalarCoeff::monomial(&reg_, {}, q)); }

  const OperatorExpr& scalar(const Value& v, const Ast& at, const char* what) {
    if (shape_of(v) != Shape::Scalar)
      fail(at, std::string(what) + " expects a scalar, got a " + to_string(shape_of(v)));
    return std::get<OperatorExpr>(v);
  }

  const VecExpr& vector(const Value& v, const Ast& at, const char* what) {
    if (shape_of(v) != Shape::Vector)
      fail(at, std::string(what) + " expects a vector, got a " + to_string(shape_of(v)));
    return std::get<VecExpr>(v);
  }

  int integer_constant(const Ast& a) {
    if (a.kind == Ast::Kind::Num && a.num.get_den() == 1 && a.num.get_num().fits_sint_p())
      return static_cast<int>(a.num.get_num().get_si());
    if (a.kind == Ast::Kind::Neg) return -integer_constant(*a.args[0]);
    fail(a, "exponent must be an integer literal");
  }

  Value eval_node(const Ast& a) {
    switch (a.kind) {
      case Ast::Kind::Num: return number(GaussRational(a.num));
      case Ast::Kind::Sym: return symbol(a);
      case Ast::Kind::VecBuiltin:
        if (a.name == "r") return position_vector(reg_);
        if (a.name == "p") return momentum_vector(reg_);
        if (a.name == "S") return spin_vector(reg_);
        if (a.name == "l") return orbital_angular_momentum(reg_);
        fail(a, "unknown vector '" + a.name + "'");
      case Ast::Kind::Index: return vector(eval(*a.args[0]), a, "component access")[a.axis];
      case Ast::Kind::Neg: return map_value(eval(*a.args[0]), [](const OperatorExpr& x) { return -x; });
      case Ast::Kind::BinOp: return binop(a);
      case Ast::Kind::Commutator: return commutator_node(a);
      case Ast::Kind::Apply: return apply(a);
    }
    fail(a, "malformed expression");
  }

  Value symbol(const Ast& a) {
    if (a.name == "i") return number(GaussRational::i());
    if (AstPtr b = env_.binding(a.name)) {
      if (const Value* v = env_.cached(a.name, mode_)) return *v;
      if (!active_.insert(a.name).second) fail(a, "binding '" + a.name + "' refers to itself");
      Value v = eval(*b);
      active_.erase(a.name);
      env_.store(a.name, mode_, v);
      return v;
    }
    if (env_.is_symbol(a.name)) {
      auto id = reg_.find(a.name);
      return OperatorExpr(ScalarCoeff::symbol(reg_, id ? *id : env_.declare_symbol(a.name)));
    }
    fail(a, "unbound name '" + a.name + "'");
  }

  Value binop(const Ast& a) {
    const Ast& la = *a.args[0];
    const Ast& ra = *a.args[1];
    switch (a.op) {
      case '+':
      case '-': {
        if (is_literal_zero(ra)) return eval(la);
        Value r = eval(ra);
        if (is_literal_zero(la))
          return a.op == '+' ? r : map_value(r, [](const OperatorExpr& x) { return -x; });
        Value l = eval(la);
        if (shape_of(l) != shape_of(r))
          fail(a, std::string("cannot ") + (a.op == '+' ? "add" : "subtract") + " a " + to_string(shape_of(l)) +
                      " and a " + to_string(shape_of(r)));
        return zip_value(l, r, [op = a.op](const OperatorExpr& x, const OperatorExpr& y) {
          return op == '+' ? x + y : x - y;
        });
      }
      case '*': return product(a, eval(la), eval(ra));
      case '/': {
        Value l = eval(la);
        Value rv = eval(ra);
        const OperatorExpr& d = scalar(rv, ra, "division");
        if (!d.is_scalar()) fail(ra, "division by an operator is not supported");
        ScalarCoeff c = d.scalar_value();
        if (c.is_zero()) fail(ra, "division by zero");
        if (!c.is_monomial()) fail(ra, "only single-term scalars can divide");
        ScalarCoeff inv = c.inverse();
        return map_value(l, [&](const OperatorExpr& x) { return scale(inv, x); });
      }
      case '^': return power(a);
    }
    fail(a, "unknown operator");
  }

  Value product(const Ast& at, const Value& l, const Value& r) {
    Shape ls = shape_of(l);
    Shape rs = shape_of(r);
    if (ls == Shape::Scalar) {
      const auto& s = std::get<OperatorExpr>(l);
      return map_value(r, [&](const OperatorExpr& x) { return mul(s, x, mode_); });
    }
    if (rs == Shape::Scalar) {
      const auto& s = std::get<OperatorExpr>(r);
      return map_value(l, [&](const OperatorExpr& x) { return mul(x, s, mode_); });
    }
    fail(at, std::string("cannot multiply a ") + to_string(ls) + " by a " + to_string(rs) + "; use dot or cross");
  }

  Value power(const Ast& a) {
    const Ast& base = *a.args[0];
    int n = integer_constant(*a.args[1]);
    if (base.kind == Ast::Kind::VecBuiltin && base.name == "r") return OperatorExpr::radial(reg_, n);
    Value b = eval(base);
    if (shape_of(b) == Shape::Vector) {
      if (n != 2) fail(a, "a vector can only be squared");
      const auto& v = std::get<VecExpr>(b);
      return dot(v, v, mode_);
    }
    const OperatorExpr& s = scalar(b, base, "'^'");
    OperatorExpr unit = number(1);
    if (n < 0) {
      if (!s.is_scalar() || s.is_zero() || !s.scalar_value().is_monomial())
        fail(a, "negative powers need a single-term scalar base");
      OperatorExpr inv(s.scalar_value().inverse());
      OperatorExpr out = unit;
      for (int k = 0; k < -n; ++k) out = mul(out, inv, mode_);
      return out;
    }
    OperatorExpr out = unit;
    for (int k = 0; k < n; ++k) out = mul(out, s, mode_);
    return out;
  }

  Value commutator_node(const Ast& a) {
    Value l = eval(*a.args[0]);
    Value r = eval(*a.args[1]);
    Shape ls = shape_of(l);
    Shape rs = shape_of(r);
    if (ls == Shape::Matrix || rs == Shape::Matrix) fail(a, "commutators of matrices are not supported");
    if (ls == Shape::Scalar && rs == Shape::Scalar)
      return commutator(std::get<OperatorExpr>(l), std::get<OperatorExpr>(r), mode_);
    if (ls == Shape::Vector && rs == Shape::Vector) {
      const auto& x = std::get<VecExpr>(l);
      const auto& y = std::get<VecExpr>(r);
      MatExpr m;
      for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v) m.at(u, v) = commutator(x[u], y[v], mode_);
      return m;
    }
    VecExpr out;
    for (int u = 0; u < 3; ++u)
      out[u] = ls == Shape::Vector ? commutator(std::get<VecExpr>(l)[u], std::get<OperatorExpr>(r), mode_)
                                   : commutator(std::get<OperatorExpr>(l), std::get<VecExpr>(r)[u], mode_);
    return out;
  }

  Value apply(const Ast& a) {
    const std::string& fn = a.name;
    if (fn == "cross") {
      Value x = eval(*a.args[0]);
      Value y = eval(*a.args[1]);
      return cross(vector(x, *a.args[0], "cross"), vector(y, *a.args[1], "cross"), mode_);
    }
    if (fn == "dot") {
      Value x = eval(*a.args[0]);
      Value y = eval(*a.args[1]);
      return dot(vector(x, *a.args[0], "dot"), vector(y, *a.args[1], "dot"), mode_);
    }
    if (fn == "unitr") {
      VecExpr r = position_vector(reg_);
      return mul(r, OperatorExpr::radial(reg_, -1), mode_);
    }
    if (fn == "rpow") return OperatorExpr::radial(reg_, integer_constant(*a.args[0]));
    if (fn == "eps") {
      Value x = eval(*a.args[0]);
      const VecExpr& v = vector(x, *a.args[0], "eps");
      MatExpr m;
      for (int u = 0; u < 3; ++u)
        for (int w = 0; w < 3; ++w)
          for (int k = 0; k < 3; ++k)
            if (int e = levi_civita(u, w, k)) m.at(u, w) += e > 0 ? v[k] : -v[k];
      return m;
    }
    if (fn == "delta") {
      Value x = eval(*a.args[0]);
      const OperatorExpr& s = scalar(x, *a.args[0], "delta");
      MatExpr m;
      for (int u = 0; u < 3; ++u) m.at(u, u) = s;
      return m;
    }
    fail(a, "unknown function '" + fn + "'");
  }

  Environment& env_;
  SymbolRegistry& reg_;
  SpinMode mode_;
  std::set<std::string> active_;
};

}  // namespace

Value elaborate(const Ast& ast, Environment& env, SpinMode mode) { return Elaborator(env, mode).run(ast); }

Value elaborate(std::string_view text, Environment& env, SpinMode mode) {
  return elaborate(*parse(text), env, mode);
}

Value elaborate_difference(const Ast& lhs, const Ast& rhs, Environment& env, SpinMode mode) {
  if (is_literal_zero(rhs)) return elaborate(lhs, env, mode);
  Value r = elaborate(rhs, env, mode);
  if (is_literal_zero(lhs)) return map_value(r, [](const OperatorExpr& x) { return -x; });
  Value l = elaborate(lhs, env, mode);
  if (shape_of(l) != shape_of(r))
    throw ElabError(std::string("sides differ in shape: ") + to_string(shape_of(l)) + " and " +
                        to_string(shape_of(r)),
                    {lhs.span.begin, rhs.span.end});
  return value_sub(l, r);
}

}  // namespace so4atom
