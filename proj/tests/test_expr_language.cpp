#include <string>
#include <vector>

#include "doctest.h"
#include "so4atom/expr_language.hpp"
#include "so4atom/paper_catalog.hpp"

using namespace so4atom;

namespace {

std::vector<TokenKind> kinds(const std::string& text) {
  std::vector<TokenKind> out;
  for (const Token& t : tokenize(text))
    if (t.kind != TokenKind::End) out.push_back(t.kind);
  return out;
}

}  // namespace

TEST_CASE("tokenize splits function calls") {
  auto toks = tokenize("cross(p,l)");
  REQUIRE(toks.size() == 7);
  CHECK(kinds("cross(p,l)") == std::vector<TokenKind>{TokenKind::Ident, TokenKind::LParen, TokenKind::Ident,
                                                        TokenKind::Comma, TokenKind::Ident, TokenKind::RParen});
  CHECK(toks[0].lexeme == "cross");
  CHECK(toks[2].lexeme == "p");
}

TEST_CASE("tokenize reads rationals only in literal position") {
  auto toks = tokenize("1/2 * hbar");
  CHECK(kinds("1/2 * hbar") == std::vector<TokenKind>{TokenKind::Rational, TokenKind::Star, TokenKind::Ident});
  CHECK(toks[0].lexeme == "1/2");
  CHECK(kinds("r^-2") == std::vector<TokenKind>{TokenKind::Ident, TokenKind::Caret, TokenKind::Minus,
                                                  TokenKind::Integer});
  CHECK(kinds("r^2/3") == std::vector<TokenKind>{TokenKind::Ident, TokenKind::Caret, TokenKind::Integer,
                                                   TokenKind::Slash, TokenKind::Integer});
}

TEST_CASE("token spans are ordered and cover the non-blank input") {
  std::string text = "let H = (1/(2*M))*p^2 - kappa*r^-1  # Coulomb\ncheck a : [l_x, l_y] == i*hbar*l_z\n";
  auto toks = tokenize(text);
  std::size_t prev_end = 0;
  std::string covered;
  for (const Token& t : toks) {
    CHECK(t.span.begin >= prev_end);
    CHECK(t.span.end <= text.size());
    CHECK(text.substr(t.span.begin, t.span.end - t.span.begin) == t.lexeme);
    prev_end = t.span.end;
    if (t.kind != TokenKind::Newline) covered += t.lexeme;
  }
  std::string expected;
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    if (!comment && c != ' ' && c != '\n') expected += c;
  }
  CHECK(covered == expected);
}

TEST_CASE("unknown characters are lex errors with a span") {
  try {
    tokenize("p $ l");
    FAIL("expected a lex error");
  } catch (const LexError& e) {
    CHECK(e.span().begin == 2);
    CHECK(e.span().end == 3);
  }
  CHECK_THROWS_AS(tokenize("1/0"), LexError);
}

TEST_CASE("parse respects operator precedence") {
  AstPtr h = parse("(1/(2*M))*dot(p,p) - kappa*r^-1");
  REQUIRE(h->kind == Ast::Kind::BinOp);
  CHECK(h->op == '-');
  CHECK(h->args[0]->op == '*');
  CHECK(h->args[0]->args[1]->kind == Ast::Kind::Apply);
  CHECK(h->args[0]->args[1]->name == "dot");
  CHECK(h->args[1]->op == '*');
  CHECK(h->args[1]->args[1]->op == '^');

  AstPtr c = parse("[l_x, l_y]");
  REQUIRE(c->kind == Ast::Kind::Commutator);
  CHECK(c->args[0]->kind == Ast::Kind::Index);
  CHECK(c->args[0]->axis == Axis::X);
  CHECK(c->args[1]->axis == Axis::Y);

  AstPtr rl = parse("cross(p,l) - cross(l,p)");
  CHECK(rl->op == '-');
  CHECK(rl->args[0]->name == "cross");
  CHECK(rl->args[1]->name == "cross");

  CHECK(ast_equal(*parse("a + b*c^2"), *parse("a + (b*(c^2))")));
  CHECK(ast_equal(*parse("idx(l, z)"), *parse("l_z")));
}

TEST_CASE("syntax errors carry the expected set and an in-range span") {
  for (std::string text : {"cross(p,", "a + * b", "[p, l", "dot(p)", "(a", "a b", "r^", "unitr(1)"}) {
    CAPTURE(text);
    try {
      parse(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.span().begin <= text.size());
      CHECK(e.span().end <= text.size());
    }
  }
  try {
    parse("cross(p,");
  } catch (const ParseError& e) {
    CHECK_FALSE(e.expected().empty());
  }
}

TEST_CASE("builtin arities") {
  CHECK(builtin_arity("cross") == 2);
  CHECK(builtin_arity("dot") == 2);
  CHECK(builtin_arity("unitr") == 0);
  CHECK(builtin_arity("rpow") == 1);
  CHECK_FALSE(builtin_arity("sin"));
}

TEST_CASE("elaboration builds canonical values") {
  Environment env;
  Value l = elaborate("cross(r,p)", env, SpinMode::Abstract);
  REQUIRE(shape_of(l) == Shape::Vector);
  CHECK(std::get<VecExpr>(l) == orbital_angular_momentum(env.registry()));

  Value s2 = elaborate("dot(S,S)", env, SpinMode::SpinHalf);
  REQUIRE(shape_of(s2) == Shape::Scalar);
  const auto& op = std::get<OperatorExpr>(s2);
  REQUIRE(op.is_scalar());
  CHECK(op.scalar_value() ==
        ScalarCoeff(GaussRational(make_rational(3, 4))) * ScalarCoeff::symbol(env.registry(), SymbolRegistry::kHbar, 2));

  CHECK_THROWS_AS(elaborate("unknown_name", env, SpinMode::Abstract), ElabError);
  CHECK_THROWS_AS(elaborate("p + 1", env, SpinMode::Abstract), ElabError);
  CHECK_THROWS_AS(elaborate("dot(p_x, p)", env, SpinMode::Abstract), ElabError);
  CHECK_THROWS_AS(elaborate("1/p_x", env, SpinMode::Abstract), ElabError);
}

TEST_CASE("r is the position vector or the radius by context") {
  Environment env;
  CHECK(shape_of(elaborate("r", env, SpinMode::Abstract)) == Shape::Vector);
  Value rinv = elaborate("r^-1", env, SpinMode::Abstract);
  CHECK(std::get<OperatorExpr>(rinv) == OperatorExpr::radial(env.registry(), -1));
}

TEST_CASE("identity files reject duplicate ids and unbound names") {
  CHECK_THROWS_AS(parse_identity_file("check a : p_x == p_x\ncheck a : p_y == p_y\n", "dup"), ParseError);
  CHECK_THROWS_AS(parse_identity_file("let A = B\nlet B = p\n", "order"), SourceError);
  IdentityFile f = parse_identity_file("let A = p\ncheck c : [A, A] == 0 mode=half mu=all expect=holds\n", "ok");
  REQUIRE(f.checks.size() == 1);
  CHECK(f.checks[0].mode == SpinMode::SpinHalf);
  CHECK(f.checks[0].mu == MuPolicy::All);
}

TEST_CASE("catalog files round-trip through the pretty printer") {
  for (const auto& suite : builtin_suites()) {
    CAPTURE(suite.name);
    std::string text = pretty(suite.file);
    IdentityFile again = parse_identity_file(text, suite.name);
    CHECK(identity_files_equal(suite.file, again));
    for (const auto& b : suite.file.bindings) CHECK(ast_equal(*parse(pretty(*b.value)), *b.value));
  }
}

TEST_CASE("abstract elaboration then reduction equals spin-half elaboration") {
  for (const auto& suite : builtin_suites()) {
    CAPTURE(suite.name);
    Environment env = Environment::from_file(suite.file);
    for (const auto& b : suite.file.bindings) {
      CAPTURE(b.name);
      Value abstract_v = elaborate(*b.value, env, SpinMode::Abstract);
      Value half_v = elaborate(*b.value, env, SpinMode::SpinHalf);
      CHECK(is_zero(value_sub(reduce_spin_half(abstract_v), half_v)));
    }
  }
}

TEST_CASE("describe_error reports line and column") {
  std::string text = "let A = p\nlet B = $\n";
  try {
    parse_identity_file(text, "bad");
    FAIL("expected an error");
  } catch (const SourceError& e) {
    CHECK(describe_error(e, text).rfind("2:9:", 0) == 0);
  }
}
