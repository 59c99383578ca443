// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

// Text syntax for operator expressions and identity files. The grammar is
// documented in docs/identity-files.md.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "so4atom/operator_algebra.hpp"
#include "so4atom/scalar_ring.hpp"

namespace so4atom {

/// Half-open byte range [begin, end) into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

/// Error tied to a location in the source text.
class SourceError : public Error {
 public:
  SourceError(const std::string& msg, Span span) : Error(msg), span_(span) {}
  Span span() const { return span_; }

 private:
  Span span_;
};

class LexError : public SourceError {
 public:
  using SourceError::SourceError;
};

class ParseError : public SourceError {
 public:
  ParseError(const std::string& msg, Span span, std::vector<std::string> expected = {})
      : SourceError(msg, span), expected_(std::move(expected)) {}
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::vector<std::string> expected_;
};

/// Unbound name, shape mismatch or ill-typed operation during elaboration.
class ElabError : public SourceError {
 public:
  using SourceError::SourceError;
};

/// "line:col: message" for an error raised while reading `source`.
std::string describe_error(const SourceError& e, std::string_view source);

enum class TokenKind {
  Ident,
  Integer,
  Rational,
  LParen,
  RParen,
  Comma,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LBracket,
  RBracket,
  Equals,
  EqEq,
  Colon,
  Newline,
  End,
};

const char* to_string(TokenKind k);

struct Token {
  TokenKind kind;
  std::string lexeme;
  Span span;
};

/// Splits `input` into tokens. Newlines are significant in identity files and
/// appear as Newline tokens; the stream always ends with an End token.
std::vector<Token> tokenize(std::string_view input);

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
  enum class Kind { Num, Sym, VecBuiltin, Apply, BinOp, Neg, Commutator, Index };

  Kind kind;
  Rational num;               // Num (nonnegative when parsed)
  std::string name;           // Sym, VecBuiltin (r|p|S|l), Apply function name
  char op = 0;                // BinOp: + - * / ^
  std::vector<AstPtr> args;   // operands / arguments
  Axis axis = Axis::X;        // Index
  Span span;
};

AstPtr make_num(Rational q, Span s = {});
AstPtr make_sym(std::string name, Span s = {});
AstPtr make_vec(std::string name, Span s = {});
AstPtr make_apply(std::string fn, std::vector<AstPtr> args, Span s = {});
AstPtr make_binop(char op, AstPtr a, AstPtr b, Span s = {});
AstPtr make_neg(AstPtr a, Span s = {});
AstPtr make_commutator(AstPtr a, AstPtr b, Span s = {});
AstPtr make_index(AstPtr v, Axis a, Span s = {});

/// Structural equality, ignoring spans.
bool ast_equal(const Ast& a, const Ast& b);

/// Arity of a built-in function, or nullopt if `fn` is not one.
std::optional<int> builtin_arity(std::string_view fn);

/// Parses a complete expression; the token stream must contain nothing else.
AstPtr parse(const std::vector<Token>& tokens);
AstPtr parse(std::string_view text);

/// Minimal-parenthesis rendering that re-parses to an equal Ast.
std::string pretty(const Ast& a);

enum class MuPolicy { Symbolic, Zero, One, All };
enum class Expectation { Holds, Fails };

const char* to_string(MuPolicy p);
const char* to_string(Expectation e);

struct LetBinding {
  std::string name;
  AstPtr value;
  Span span;
};

struct CheckSpec {
  std::string id;
  AstPtr lhs;
  AstPtr rhs;
  SpinMode mode = SpinMode::Abstract;
  MuPolicy mu = MuPolicy::Symbolic;
  Expectation expect = Expectation::Holds;
  Span span;
};

struct IdentityFile {
  std::string name;
  std::vector<std::string> symbols;
  std::vector<LetBinding> bindings;
  std::vector<CheckSpec> checks;
};

/// Parses an identity file. Names must be declared or bound before use and
/// check ids must be unique.
IdentityFile parse_identity_file(std::string_view text, std::string name);

/// Canonical text of a file; parses back to an equal file.
std::string pretty(const IdentityFile& f);

bool identity_files_equal(const IdentityFile& a, const IdentityFile& b);

using Value = std::variant<OperatorExpr, VecExpr, MatExpr>;

enum class Shape { Scalar, Vector, Matrix };
Shape shape_of(const Value& v);
const char* to_string(Shape s);
bool is_zero(const Value& v);
Value value_sub(const Value& a, const Value& b);
Value reduce_spin_half(const Value& v);
Value substitute(const Value& v, SymbolId sym, const GaussRational& value);
std::string value_str(const Value& v);

/// Symbols, let-bindings and per-mode elaboration cache.
class Environment {
 public:
  explicit Environment(std::shared_ptr<SymbolRegistry> reg = SymbolRegistry::create());

  static Environment from_file(const IdentityFile& f,
                               std::shared_ptr<SymbolRegistry> reg = SymbolRegistry::create());

  SymbolRegistry& registry() { return *registry_; }
  const SymbolRegistry& registry() const { return *registry_; }
  const std::shared_ptr<SymbolRegistry>& registry_ptr() const { return registry_; }

  /// Makes `name` usable as a commuting scalar symbol.
  SymbolId declare_symbol(const std::string& name);
  bool is_symbol(const std::string& name) const;
  void bind(const std::string& name, AstPtr value);
  AstPtr binding(const std::string& name) const;
  const std::vector<std::string>& binding_order() const { return order_; }

  const Value* cached(const std::string& name, SpinMode mode) const;
  void store(const std::string& name, SpinMode mode, Value v);

 private:
  std::shared_ptr<SymbolRegistry> registry_;
  std::map<std::string, bool> symbols_;
  std::map<std::string, AstPtr> bindings_;
  std::vector<std::string> order_;
  std::map<std::pair<std::string, SpinMode>, Value> cache_;
};

/// Turns an Ast into a canonical operator value.
Value elaborate(const Ast& ast, Environment& env, SpinMode mode);
Value elaborate(std::string_view text, Environment& env, SpinMode mode);

/// Elaborates `lhs - rhs`; a literal 0 on either side takes the other's shape.
Value elaborate_difference(const Ast& lhs, const Ast& rhs, Environment& env, SpinMode mode);

}  // namespace so4atom
