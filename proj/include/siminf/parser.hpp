#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "siminf/error.hpp"
#include "siminf/syntax.hpp"

namespace siminf {

// Recursive-descent parser for the formula language.
//
//   precedence  ~  >  &  >  |  >  ->  >  <->   (-> and <-> right-associative)
//   forall x. F / exists x. F scope as far right as possible
//   atoms R(t1,...,tn), equality t1 = t2, parentheses
//
// Every constant and relation must be declared in the signature handed to the
// parser; identifiers starting with a lowercase letter that are not declared
// parse as variables.

namespace detail {

enum class TokenType {
  ident, lparen, rparen, comma, eq, tilde, amp, pipe, arrow, darrow, dot, end
};

struct Token {
  TokenType type;
  std::string text;
  std::size_t offset;
};

inline std::vector<Token> lex_formula(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokenType t, std::size_t at, std::string s) {
    out.push_back({t, std::move(s), at});
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        ++i;
      push(TokenType::ident, start, text.substr(start, i - start));
      continue;
    }
    switch (c) {
      case '(': push(TokenType::lparen, i, "("); ++i; break;
      case ')': push(TokenType::rparen, i, ")"); ++i; break;
      case ',': push(TokenType::comma, i, ","); ++i; break;
      case '=': push(TokenType::eq, i, "="); ++i; break;
      case '~': push(TokenType::tilde, i, "~"); ++i; break;
      case '&': push(TokenType::amp, i, "&"); ++i; break;
      case '|': push(TokenType::pipe, i, "|"); ++i; break;
      case '.': push(TokenType::dot, i, "."); ++i; break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          push(TokenType::arrow, i, "->");
          i += 2;
          break;
        }
        throw SyntaxError("stray '-'", i, "'->'");
      case '<':
        if (i + 2 < text.size() && text[i + 1] == '-' && text[i + 2] == '>') {
          push(TokenType::darrow, i, "<->");
          i += 3;
          break;
        }
        throw SyntaxError("stray '<'", i, "'<->'");
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", i, "");
    }
  }
  out.push_back({TokenType::end, "", text.size()});
  return out;
}

class FormulaParser {
public:
  FormulaParser(std::vector<Token> tokens, const Signature& sig)
      : tokens_(std::move(tokens)), sig_(sig) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_iff();
    if (peek().type != TokenType::end)
      throw SyntaxError("trailing input after formula", peek().offset, "end of input");
    return f;
  }

private:
  const Token& peek() const { return tokens_[idx_]; }
  Token take() { return tokens_[idx_++]; }

  Token expect(TokenType t, const std::string& what) {
    if (peek().type != t)
      throw SyntaxError("unexpected '" + describe(peek()) + "'", peek().offset, what);
    return take();
  }

  static std::string describe(const Token& t) {
    return t.type == TokenType::end ? "end of input" : t.text;
  }

  FormulaPtr parse_iff() {
    FormulaPtr lhs = parse_implies();
    if (peek().type == TokenType::darrow) {
      take();
      return biconditional(std::move(lhs), parse_iff());
    }
    return lhs;
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (peek().type == TokenType::arrow) {
      take();
      return implication(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (peek().type == TokenType::pipe) {
      take();
      lhs = disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (peek().type == TokenType::amp) {
      take();
      lhs = conjunction(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  FormulaPtr parse_unary() {
    if (peek().type == TokenType::tilde) {
      take();
      return negation(parse_unary());
    }
    if (peek().type == TokenType::ident &&
        (peek().text == "forall" || peek().text == "exists")) {
      Token q = take();
      Token var = expect(TokenType::ident, "variable name");
      if (is_reserved_word(var.text))
        throw SyntaxError("'" + var.text + "' is reserved", var.offset, "variable name");
      if (sig_.contains(var.text))
        throw SyntaxError("cannot bind declared symbol '" + var.text + "'",
                          var.offset, "variable name");
      if (!std::islower(static_cast<unsigned char>(var.text[0])))
        throw SyntaxError("variables start with a lowercase letter", var.offset,
                          "variable name");
      expect(TokenType::dot, "'.'");
      FormulaPtr body = parse_iff();  // scope extends maximally right
      return quantified(q.text == "forall" ? Quantifier::universal
                                           : Quantifier::existential,
                        var.text, std::move(body));
    }
    return parse_primary();
  }

  FormulaPtr parse_primary() {
    if (peek().type == TokenType::lparen) {
      take();
      FormulaPtr f = parse_iff();
      expect(TokenType::rparen, "')'");
      return f;
    }
    if (peek().type != TokenType::ident)
      throw SyntaxError("unexpected '" + describe(peek()) + "'", peek().offset,
                        "formula");
    Token name = take();
    if (is_reserved_word(name.text))
      throw SyntaxError("'" + name.text + "' cannot start a formula here",
                        name.offset, "formula");
    if (peek().type == TokenType::lparen) {
      // relation atom
      const Symbol* sym = sig_.find(name.text);
      if (!sym)
        throw Error(ErrorKind::unknown_symbol,
                    "undeclared relation '" + name.text + "'");
      if (sym->is_constant())
        throw Error(ErrorKind::arity_mismatch,
                    "constant '" + name.text + "' used as a relation");
      take();
      std::vector<Term> args;
      if (peek().type != TokenType::rparen) {
        args.push_back(parse_term());
        while (peek().type == TokenType::comma) {
          take();
          args.push_back(parse_term());
        }
      }
      expect(TokenType::rparen, "')'");
      if (static_cast<int>(args.size()) != sym->arity)
        throw Error(ErrorKind::arity_mismatch,
                    "relation '" + name.text + "' expects " +
                        std::to_string(sym->arity) + " argument(s), got " +
                        std::to_string(args.size()));
      return atom(name.text, std::move(args));
    }
    // bare term: must be the left side of an equality
    Term lhs = make_term(name);
    expect(TokenType::eq, "'=' (a bare term is not a formula)");
    Term rhs = parse_term();
    return equality(std::move(lhs), std::move(rhs));
  }

  Term parse_term() {
    Token t = expect(TokenType::ident, "term");
    if (is_reserved_word(t.text))
      throw SyntaxError("'" + t.text + "' is reserved", t.offset, "term");
    return make_term(t);
  }

  Term make_term(const Token& t) {
    if (const Symbol* sym = sig_.find(t.text)) {
      if (sym->is_relation())
        throw Error(ErrorKind::arity_mismatch,
                    "relation '" + t.text + "' used as a term");
      return Term::constant(t.text);
    }
    if (std::islower(static_cast<unsigned char>(t.text[0]))) return Term::var(t.text);
    throw Error(ErrorKind::unknown_symbol, "undeclared symbol '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  const Signature& sig_;
  std::size_t idx_ = 0;
};

}  // namespace detail

/// Parses a formula over the given signature. Throws SyntaxError (with
/// offset and expectation), or Error with kind unknown_symbol /
/// arity_mismatch for undeclared or misused symbols.
inline FormulaPtr parse_formula(const std::string& text, const Signature& sig) {
  return detail::FormulaParser(detail::lex_formula(text), sig).parse();
}

/// Parses a closed formula; rejects free variables.
inline FormulaPtr parse_sentence(const std::string& text, const Signature& sig) {
  FormulaPtr f = parse_formula(text, sig);
  auto fv = free_variables(f);
  if (!fv.empty())
    throw Error(ErrorKind::free_variable,
                "sentence required, but '" + *fv.begin() + "' occurs free in '" +
                    text + "'");
  return f;
}

}  // namespace siminf
