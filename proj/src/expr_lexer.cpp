// Copyright 2026 The so4atom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>

#include "so4atom/expr_language.hpp"

namespace so4atom {

const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::Rational: return "rational";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Comma: return "','";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Caret: return "'^'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Equals: return "'='";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::Colon: return "':'";
    case TokenKind::Newline: return "end of line";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

std::string describe_error(const SourceError& e, std::string_view source) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < e.span().begin && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col) + ": " + e.what();
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

}  // namespace

std::vector<Token> tokenize(std::string_view in) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokenKind k, std::size_t b, std::size_t e) {
    out.push_back({k, std::string(in.substr(b, e - b)), {b, e}});
  };
  while (i < in.size()) {
    char c = in[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '#') {
      while (i < in.size() && in[i] != '\n') ++i;
    } else if (c == '\n') {
      push(TokenKind::Newline, i, i + 1);
      ++i;
    } else if (digit(c)) {
      std::size_t b = i;
      while (i < in.size() && digit(in[i])) ++i;
      bool after_caret = !out.empty() && out.back().kind == TokenKind::Caret;
      if (!after_caret && i + 1 < in.size() && in[i] == '/' && digit(in[i + 1])) {
        std::size_t s = i + 1;
        i = s;
        while (i < in.size() && digit(in[i])) ++i;
        if (in.substr(s, i - s).find_first_not_of('0') == std::string_view::npos)
          throw LexError("zero denominator in rational literal", {b, i});
        push(TokenKind::Rational, b, i);
      } else {
        push(TokenKind::Integer, b, i);
      }
    } else if (ident_start(c)) {
      std::size_t b = i;
      while (i < in.size() && ident_char(in[i])) ++i;
      push(TokenKind::Ident, b, i);
    } else if (c == '=') {
      if (i + 1 < in.size() && in[i + 1] == '=') {
        push(TokenKind::EqEq, i, i + 2);
        i += 2;
      } else {
        push(TokenKind::Equals, i, i + 1);
        ++i;
      }
    } else {
      TokenKind k;
      switch (c) {
        case '(': k = TokenKind::LParen; break;
        case ')': k = TokenKind::RParen; break;
        case ',': k = TokenKind::Comma; break;
        case '+': k = TokenKind::Plus; break;
        case '-': k = TokenKind::Minus; break;
        case '*': k = TokenKind::Star; break;
        case '/': k = TokenKind::Slash; break;
        case '^': k = TokenKind::Caret; break;
        case '[': k = TokenKind::LBracket; break;
        case ']': k = TokenKind::RBracket; break;
        case ':': k = TokenKind::Colon; break;
        default: {
          std::size_t n = std::min(utf8_length(static_cast<unsigned char>(c)), in.size() - i);
          throw LexError("unexpected character '" + std::string(in.substr(i, n)) + "'", {i, i + n});
        }
      }
      push(k, i, i + 1);
      ++i;
    }
  }
  out.push_back({TokenKind::End, "", {in.size(), in.size()}});
  return out;
}

// --- Ast helpers ---------------------------------------------------------

namespace {
AstPtr node(Ast a) { return std::make_shared<const Ast>(std::move(a)); }
}  // namespace

AstPtr make_num(Rational q, Span s) { return node({Ast::Kind::Num, std::move(q), {}, 0, {}, Axis::X, s}); }
AstPtr make_sym(std::string name, Span s) { return node({Ast::Kind::Sym, 0, std::move(name), 0, {}, Axis::X, s}); }
AstPtr make_vec(std::string name, Span s) {
  return node({Ast::Kind::VecBuiltin, 0, std::move(name), 0, {}, Axis::X, s});
}
AstPtr make_apply(std::string fn, std::vector<AstPtr> args, Span s) {
  return node({Ast::Kind::Apply, 0, std::move(fn), 0, std::move(args), Axis::X, s});
}
AstPtr make_binop(char op, AstPtr a, AstPtr b, Span s) {
  return node({Ast::Kind::BinOp, 0, {}, op, {std::move(a), std::move(b)}, Axis::X, s});
}
AstPtr make_neg(AstPtr a, Span s) { return node({Ast::Kind::Neg, 0, {}, 0, {std::move(a)}, Axis::X, s}); }
AstPtr make_commutator(AstPtr a, AstPtr b, Span s) {
  return node({Ast::Kind::Commutator, 0, {}, 0, {std::move(a), std::move(b)}, Axis::X, s});
}
AstPtr make_index(AstPtr v, Axis a, Span s) { return node({Ast::Kind::Index, 0, {}, 0, {std::move(v)}, a, s}); }

bool ast_equal(const Ast& a, const Ast& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Ast::Kind::Num:
      if (a.num != b.num) return false;
      break;
    case Ast::Kind::Sym:
    case Ast::Kind::VecBuiltin:
    case Ast::Kind::Apply:
      if (a.name != b.name) return false;
      break;
    case Ast::Kind::BinOp:
      if (a.op != b.op) return false;
      break;
    case Ast::Kind::Index:
      if (a.axis != b.axis) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!ast_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

std::optional<int> builtin_arity(std::string_view fn) {
  if (fn == "cross" || fn == "dot" || fn == "idx") return 2;
  if (fn == "rpow" || fn == "eps" || fn == "delta") return 1;
  if (fn == "unitr") return 0;
  return std::nullopt;
}

}  // namespace so4atom
