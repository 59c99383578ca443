// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "so4atom/expr_language.hpp"

namespace so4atom {

const char* to_string(MuPolicy p) {
  switch (p) {
    case MuPolicy::Symbolic: return "symbolic";
    case MuPolicy::Zero: return "0";
    case MuPolicy::One: return "1";
    case MuPolicy::All: return "all";
  }
  return "?";
}

const char* to_string(Expectation e) { return e == Expectation::Holds ? "holds" : "fails"; }

namespace {

constexpr int kBpSum = 10;
constexpr int kBpProduct = 20;
constexpr int kBpPower = 30;
constexpr int kBpNegate = 40;
constexpr int kBpAtom = 100;

const std::set<std::string, std::less<>> kVectorBuiltins = {"r", "p", "S", "l"};
const std::set<std::string, std::less<>> kScalarBuiltins = {"hbar", "M", "kappa", "k1", "k2", "mu"};
const std::set<std::string, std::less<>> kKeywords = {"let", "check", "symbol", "i"};

std::optional<Axis> axis_from(std::string_view s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  return std::nullopt;
}

// Splits "NAME_x" into (NAME, X).
std::optional<std::pair<std::string, Axis>> split_index(const std::string& ident) {
  if (ident.size() < 3 || ident[ident.size() - 2] != '_') return std::nullopt;
  auto ax = axis_from(ident.substr(ident.size() - 1));
  if (!ax) return std::nullopt;
  return std::pair{ident.substr(0, ident.size() - 2), *ax};
}

int binding_power(TokenKind k) {
  switch (k) {
    case TokenKind::Plus:
    case TokenKind::Minus: return kBpSum;
    case TokenKind::Star:
    case TokenKind::Slash: return kBpProduct;
    case TokenKind::Caret: return kBpPower;
    default: return 0;
  }
}

char op_char(TokenKind k) {
  switch (k) {
    case TokenKind::Plus: return '+';
    case TokenKind::Minus: return '-';
    case TokenKind::Star: return '*';
    case TokenKind::Slash: return '/';
    default: return '^';
  }
}

Rational parse_rational(const std::string& lexeme) {
  Rational q(lexeme, 10);
  q.canonicalize();
  return q;
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, bool newlines_significant)
      : toks_(tokens), newlines_(newlines_significant) {
    if (toks_.empty() || toks_.back().kind != TokenKind::End)
      throw UsageError("token stream must end with an End token");
  }

  const Token& peek() {
    skip_soft_newlines();
    return toks_[pos_];
  }

  const Token& next() {
    const Token& t = peek();
    if (t.kind != TokenKind::End) ++pos_;
    return t;
  }

  const Token& expect(TokenKind k) {
    const Token& t = peek();
    if (t.kind != k) fail(t, {to_string(k)});
    return next();
  }

  [[noreturn]] void fail(const Token& t, std::vector<std::string> expected) {
    std::string msg = "unexpected " + (t.kind == TokenKind::End || t.kind == TokenKind::Newline
                                           ? std::string(to_string(t.kind))
                                           : "'" + t.lexeme + "'");
    if (!expected.empty()) {
      msg += ", expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    }
    throw ParseError(msg, t.span, std::move(expected));
  }

  AstPtr expression(int min_bp = 0) {
    AstPtr lhs = prefix();
    for (;;) {
      const Token& t = peek();
      int bp = binding_power(t.kind);
      if (bp == 0 || bp <= min_bp) break;
      next();
      // '^' is right associative.
      AstPtr rhs = expression(t.kind == TokenKind::Caret ? bp - 1 : bp);
      lhs = make_binop(op_char(t.kind), lhs, rhs, {lhs->span.begin, rhs->span.end});
    }
    return lhs;
  }

  bool at(TokenKind k) { return peek().kind == k; }
  std::size_t depth() const { return depth_; }

  // Raw access for statement parsing, where newlines end statements.
  const Token& raw_peek() const { return toks_[pos_]; }
  void raw_advance() {
    if (toks_[pos_].kind != TokenKind::End) ++pos_;
  }

 private:
  void skip_soft_newlines() {
    while (toks_[pos_].kind == TokenKind::Newline && (!newlines_ || depth_ > 0)) ++pos_;
  }

  AstPtr prefix() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Integer:
      case TokenKind::Rational: next(); return make_num(parse_rational(t.lexeme), t.span);
      case TokenKind::Minus: {
        next();
        AstPtr a = expression(kBpNegate);
        return make_neg(a, {t.span.begin, a->span.end});
      }
      case TokenKind::LParen: {
        next();
        ++depth_;
        AstPtr a = expression();
        const Token& close = peek();
        if (close.kind != TokenKind::RParen) fail(close, {"')'", "operator"});
        --depth_;
        next();
        return a;
      }
      case TokenKind::LBracket: {
        next();
        ++depth_;
        AstPtr a = expression();
        if (!at(TokenKind::Comma)) fail(peek(), {"','", "operator"});
        next();
        AstPtr b = expression();
        const Token& close = peek();
        if (close.kind != TokenKind::RBracket) fail(close, {"']'", "operator"});
        --depth_;
        next();
        return make_commutator(a, b, {t.span.begin, close.span.end});
      }
      case TokenKind::Ident: return identifier();
      default: fail(t, {"number", "identifier", "'('", "'['", "'-'"});
    }
  }

  AstPtr identifier() {
    const Token& t = next();
    if (toks_[pos_].kind == TokenKind::LParen) return application(t);
    if (kVectorBuiltins.count(t.lexeme)) return make_vec(t.lexeme, t.span);
    if (auto ix = split_index(t.lexeme)) {
      AstPtr base = kVectorBuiltins.count(ix->first) ? make_vec(ix->first, t.span) : make_sym(ix->first, t.span);
      return make_index(base, ix->second, t.span);
    }
    return make_sym(t.lexeme, t.span);
  }

  AstPtr application(const Token& name) {
    auto arity = builtin_arity(name.lexeme);
    if (!arity) throw ParseError("unknown function '" + name.lexeme + "'", name.span);
    next();  // '('
    ++depth_;
    std::vector<AstPtr> args;
    if (!at(TokenKind::RParen)) {
      for (;;) {
        if (name.lexeme == "idx" && args.size() == 1) {
          const Token& ax = peek();
          if (ax.kind != TokenKind::Ident || !axis_from(ax.lexeme)) fail(ax, {"axis x, y or z"});
          next();
          args.push_back(make_sym(ax.lexeme, ax.span));
        } else {
          args.push_back(expression());
        }
        if (!at(TokenKind::Comma)) break;
        next();
      }
    }
    const Token& close = peek();
    if (close.kind != TokenKind::RParen) fail(close, {"')'", "','"});
    --depth_;
    next();
    Span span{name.span.begin, close.span.end};
    if (static_cast<int>(args.size()) != *arity)
      throw ParseError(name.lexeme + " takes " + std::to_string(*arity) + " argument(s), got " +
                           std::to_string(args.size()),
                       span);
    if (name.lexeme == "idx") return make_index(args[0], *axis_from(args[1]->name), span);
    return make_apply(name.lexeme, std::move(args), span);
  }

  const std::vector<Token>& toks_;
  bool newlines_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace

AstPtr parse(const std::vector<Token>& tokens) {
  Parser p(tokens, false);
  AstPtr a = p.expression();
  if (!p.at(TokenKind::End)) p.fail(p.peek(), {"operator", "end of input"});
  return a;
}

AstPtr parse(std::string_view text) { return parse(tokenize(text)); }

// --- identity files ------------------------------------------------------

namespace {

class FileParser {
 public:
  FileParser(std::string_view text, std::string name) : toks_(tokenize(text)), p_(toks_, true) {
    file_.name = std::move(name);
  }

  IdentityFile run() {
    for (;;) {
      while (p_.raw_peek().kind == TokenKind::Newline) p_.raw_advance();
      const Token& t = p_.raw_peek();
      if (t.kind == TokenKind::End) break;
      if (t.kind != TokenKind::Ident) p_.fail(t, {"'symbol'", "'let'", "'check'"});
      if (t.lexeme == "symbol") {
        symbol_statement();
      } else if (t.lexeme == "let") {
        let_statement();
      } else if (t.lexeme == "check") {
        check_statement();
      } else {
        p_.fail(t, {"'symbol'", "'let'", "'check'"});
      }
    }
    return std::move(file_);
  }

 private:
  void end_of_statement() {
    const Token& t = p_.raw_peek();
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::End) p_.fail(t, {"end of line"});
    p_.raw_advance();
  }

  const Token& fresh_name(const char* what) {
    const Token& t = p_.raw_peek();
    if (t.kind != TokenKind::Ident) p_.fail(t, {what});
    if (kVectorBuiltins.count(t.lexeme) || kScalarBuiltins.count(t.lexeme) || kKeywords.count(t.lexeme) ||
        builtin_arity(t.lexeme) || split_index(t.lexeme))
      throw ParseError("'" + t.lexeme + "' is reserved", t.span);
    if (names_.count(t.lexeme)) throw ParseError("'" + t.lexeme + "' is already defined", t.span);
    p_.raw_advance();
    return t;
  }

  void symbol_statement() {
    p_.raw_advance();
    for (;;) {
      const Token& t = fresh_name("symbol name");
      names_.insert(t.lexeme);
      file_.symbols.push_back(t.lexeme);
      if (p_.raw_peek().kind != TokenKind::Comma) break;
      p_.raw_advance();
    }
    end_of_statement();
  }

  void let_statement() {
    p_.raw_advance();
    const Token& name = fresh_name("binding name");
    if (p_.raw_peek().kind != TokenKind::Equals) p_.fail(p_.raw_peek(), {"'='"});
    p_.raw_advance();
    AstPtr value = p_.expression();
    check_names(*value);
    names_.insert(name.lexeme);
    lets_.insert(name.lexeme);
    file_.bindings.push_back({name.lexeme, value, {name.span.begin, value->span.end}});
    end_of_statement();
  }

  void check_statement() {
    const Token& kw = p_.raw_peek();
    p_.raw_advance();
    const Token& id = p_.raw_peek();
    if (id.kind != TokenKind::Ident) p_.fail(id, {"check id"});
    for (const auto& c : file_.checks)
      if (c.id == id.lexeme) throw ParseError("duplicate check id '" + id.lexeme + "'", id.span);
    p_.raw_advance();
    if (p_.raw_peek().kind != TokenKind::Colon) p_.fail(p_.raw_peek(), {"':'"});
    p_.raw_advance();
    CheckSpec c;
    c.id = id.lexeme;
    c.lhs = p_.expression();
    if (p_.raw_peek().kind != TokenKind::EqEq) p_.fail(p_.raw_peek(), {"'=='", "operator"});
    p_.raw_advance();
    c.rhs = p_.expression();
    check_names(*c.lhs);
    check_names(*c.rhs);
    std::size_t end = c.rhs->span.end;
    std::set<std::string> seen;
    while (p_.raw_peek().kind == TokenKind::Ident) {
      const Token& key = p_.raw_peek();
      p_.raw_advance();
      if (!seen.insert(key.lexeme).second) throw ParseError("option '" + key.lexeme + "' given twice", key.span);
      if (p_.raw_peek().kind != TokenKind::Equals) p_.fail(p_.raw_peek(), {"'='"});
      p_.raw_advance();
      const Token& val = p_.raw_peek();
      if (val.kind != TokenKind::Ident && val.kind != TokenKind::Integer) p_.fail(val, {"option value"});
      p_.raw_advance();
      end = val.span.end;
      apply_option(c, key, val);
    }
    c.span = {kw.span.begin, end};
    file_.checks.push_back(std::move(c));
    end_of_statement();
  }

  void apply_option(CheckSpec& c, const Token& key, const Token& val) {
    const std::string& v = val.lexeme;
    if (key.lexeme == "mode") {
      if (v == "abstract") {
        c.mode = SpinMode::Abstract;
      } else if (v == "half") {
        c.mode = SpinMode::SpinHalf;
      } else {
        p_.fail(val, {"abstract", "half"});
      }
    } else if (key.lexeme == "mu") {
      if (v == "symbolic") {
        c.mu = MuPolicy::Symbolic;
      } else if (v == "0") {
        c.mu = MuPolicy::Zero;
      } else if (v == "1") {
        c.mu = MuPolicy::One;
      } else if (v == "all") {
        c.mu = MuPolicy::All;
      } else {
        p_.fail(val, {"symbolic", "0", "1", "all"});
      }
    } else if (key.lexeme == "expect") {
      if (v == "holds") {
        c.expect = Expectation::Holds;
      } else if (v == "fails") {
        c.expect = Expectation::Fails;
      } else {
        p_.fail(val, {"holds", "fails"});
      }
    } else {
      p_.fail(key, {"mode", "mu", "expect"});
    }
  }

  void check_names(const Ast& a) {
    if (a.kind == Ast::Kind::Sym) {
      if (a.name != "i" && !kScalarBuiltins.count(a.name) && !names_.count(a.name))
        throw ParseError("unbound name '" + a.name + "'", a.span);
    }
    if (a.kind == Ast::Kind::Index && a.args[0]->kind == Ast::Kind::Sym && !lets_.count(a.args[0]->name)) {
      if (names_.count(a.args[0]->name))
        throw ParseError("'" + a.args[0]->name + "' is a scalar and cannot be indexed", a.span);
      throw ParseError("unbound name '" + a.args[0]->name + "'", a.span);
    }
    for (const auto& c : a.args) check_names(*c);
  }

  std::vector<Token> toks_;
  Parser p_;
  IdentityFile file_;
  std::set<std::string> names_;
  std::set<std::string> lets_;
};

}  // namespace

IdentityFile parse_identity_file(std::string_view text, std::string name) {
  return FileParser(text, std::move(name)).run();
}

// --- printing ------------------------------------------------------------

namespace {

int precedence(const Ast& a) {
  switch (a.kind) {
    case Ast::Kind::BinOp:
      return a.op == '^' ? kBpPower : (a.op == '*' || a.op == '/') ? kBpProduct : kBpSum;
    case Ast::Kind::Neg: return kBpNegate;
    default: return kBpAtom;
  }
}

std::string render(const Ast& a, int need);

std::string wrap(const Ast& a, int need) {
  std::string s = render(a, need);
  return precedence(a) < need ? "(" + s + ")" : s;
}

std::string render(const Ast& a, int /*need*/) {
  switch (a.kind) {
    case Ast::Kind::Num: return a.num.get_str();
    case Ast::Kind::Sym:
    case Ast::Kind::VecBuiltin: return a.name;
    case Ast::Kind::Index: {
      const Ast& v = *a.args[0];
      std::string ax(1, axis_name(a.axis));
      if (v.kind == Ast::Kind::Sym || v.kind == Ast::Kind::VecBuiltin) return v.name + "_" + ax;
      return "idx(" + render(v, 0) + ", " + ax + ")";
    }
    case Ast::Kind::Apply: {
      std::string s = a.name + "(";
      for (std::size_t i = 0; i < a.args.size(); ++i) s += (i ? ", " : "") + render(*a.args[i], 0);
      return s + ")";
    }
    case Ast::Kind::Commutator: return "[" + render(*a.args[0], 0) + ", " + render(*a.args[1], 0) + "]";
    case Ast::Kind::Neg: return "-" + wrap(*a.args[0], kBpNegate);
    case Ast::Kind::BinOp: {
      const Ast& l = *a.args[0];
      const Ast& r = *a.args[1];
      if (a.op == '^') {
        // A rational exponent must be parenthesised: after '^' the lexer
        // reads "1/2" as three tokens.
        std::string rs = r.kind == Ast::Kind::Num && r.num.get_den() != 1 ? "(" + render(r, 0) + ")"
                                                                         : wrap(r, kBpPower);
        return wrap(l, kBpPower + 1) + "^" + rs;
      }
      int p = precedence(a);
      return wrap(l, p) + " " + a.op + " " + wrap(r, p + 1);
    }
  }
  return "?";
}

}  // namespace

std::string pretty(const Ast& a) { return render(a, 0); }

std::string pretty(const IdentityFile& f) {
  std::string s;
  if (!f.symbols.empty()) {
    s += "symbol ";
    for (std::size_t i = 0; i < f.symbols.size(); ++i) s += (i ? ", " : "") + f.symbols[i];
    s += "\n";
  }
  for (const auto& b : f.bindings) s += "let " + b.name + " = " + pretty(*b.value) + "\n";
  for (const auto& c : f.checks) {
    s += "check " + c.id + " : " + pretty(*c.lhs) + " == " + pretty(*c.rhs);
    if (c.mode != SpinMode::Abstract) s += std::string(" mode=") + to_string(c.mode);
    if (c.mu != MuPolicy::Symbolic) s += std::string(" mu=") + to_string(c.mu);
    if (c.expect != Expectation::Holds) s += std::string(" expect=") + to_string(c.expect);
    s += "\n";
  }
  return s;
}

bool identity_files_equal(const IdentityFile& a, const IdentityFile& b) {
  if (a.symbols != b.symbols || a.bindings.size() != b.bindings.size() || a.checks.size() != b.checks.size())
    return false;
  for (std::size_t i = 0; i < a.bindings.size(); ++i)
    if (a.bindings[i].name != b.bindings[i].name || !ast_equal(*a.bindings[i].value, *b.bindings[i].value))
      return false;
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    const auto& x = a.checks[i];
    const auto& y = b.checks[i];
    if (x.id != y.id || x.mode != y.mode || x.mu != y.mu || x.expect != y.expect || !ast_equal(*x.lhs, *y.lhs) ||
        !ast_equal(*x.rhs, *y.rhs))
      return false;
  }
  return true;
}

}  // namespace so4atom
