#pragma once

// Recursive-descent parser for the expression DSL:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := base ('^' unary)?           (right associative)
//   base   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Identifiers are the active variable, one of the declared parameter names,
// or a function name (exp log sqrt sin cos sinh cosh tanh). Numbers are
// decimals with an optional exponent. The parser builds unfolded trees.

#include <cctype>
#include <charconv>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swankit/expr.hpp"

namespace swankit {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, Var var, std::span<const std::string> params)
      : text_(text), var_(var), params_(params) {}

  ScalarExpr parse() {
    ScalarExpr e = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  ScalarExpr expr() {
    ScalarExpr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = NodeFactory::binary(BinaryOp::add, lhs, term());
      } else if (accept('-')) {
        lhs = NodeFactory::binary(BinaryOp::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  ScalarExpr term() {
    ScalarExpr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = NodeFactory::binary(BinaryOp::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = NodeFactory::binary(BinaryOp::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  ScalarExpr unary() {
    if (accept('-')) return NodeFactory::unary(UnaryOp::neg, unary());
    return power();
  }

  ScalarExpr power() {
    ScalarExpr b = base();
    if (accept('^')) return NodeFactory::binary(BinaryOp::pow, b, unary());
    return b;
  }

  ScalarExpr base() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarExpr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  ScalarExpr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", pos_);
    }
    double value = 0.0;
    const auto* first = text_.data() + start;
    const auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
    return ScalarExpr(value);
  }

  ScalarExpr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      const auto op = unary_from_name(name);
      if (!op) throw ParseError("unknown function '" + std::string(name) + "'", start);
      ++pos_;
      ScalarExpr arg = expr();
      expect(')');
      return NodeFactory::unary(*op, arg);
    }
    if (unary_from_name(name)) throw ParseError("function '" + std::string(name) + "' needs an argument", start);
    if (name.size() == 1 && (name[0] == 'x' || name[0] == 'u' || name[0] == 'z')) {
      if (name[0] != var_name(var_)) {
        throw ParseError("variable '" + std::string(name) + "' used in an expression of '" +
                             std::string(1, var_name(var_)) + "'",
                         start);
      }
      return ScalarExpr::variable(var_);
    }
    for (const auto& p : params_) {
      if (p == name) return ScalarExpr::parameter(std::string(name));
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  Var var_;
  std::span<const std::string> params_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` as an expression in variable `var`. Identifiers listed in
/// `params` become named parameters; any other identifier is an error.
inline ScalarExpr parse_expr(std::string_view text, Var var, std::span<const std::string> params = {}) {
  return detail::Parser(text, var, params).parse();
}

inline ScalarExpr parse_expr(std::string_view text, Var var, std::initializer_list<std::string> params) {
  const std::vector<std::string> names(params);
  return parse_expr(text, var, std::span<const std::string>(names));
}

}  // namespace swankit
