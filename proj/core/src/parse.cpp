#include <cctype>

#include "linevo/errors.hpp"
#include "linevo/symkernel.hpp"

namespace linevo {

namespace {

class Parser {
 public:
  Parser(std::string_view s, const SymbolTable& syms) : s_(s), syms_(syms) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr acc = term();
    for (;;) {
      if (eat('+'))
        acc = acc + term();
      else if (eat('-'))
        acc = acc - term();
      else
        return acc;
    }
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (eat('*')) {
        acc = acc * factor();
      } else if (eat('/')) {
        skip();
        std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) fail_at("division by zero", at);
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  Expr factor() {
    skip();
    std::size_t at = pos_;
    Expr b = base();
    if (eat('^')) {
      skip();
      std::size_t eat_at = pos_;
      Expr e = factor();
      auto q = e.as_rational();
      if (!q) fail_at("exponent must be a rational constant", eat_at);
      try {
        return pow(b, Ratio::from_rational(*q));
      } catch (const DomainError& err) {
        fail_at(err.what(), at);
      }
    }
    return b;
  }

  Expr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '.') fail("decimal literals are not exact; write a rational");
      return Expr(Rational(Integer(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        Expr arg = expr();
        if (!eat(')')) fail("expected ')'");
        try {
          if (name == "exp") return exp(arg);
          if (name == "ln") return ln(arg);
          if (name == "sin") return sin(arg);
          if (name == "cos") return cos(arg);
          if (name == "abs") return abs(arg);
          if (name == "sgn") return sgn(arg);
        } catch (const DomainError& err) {
          fail_at(err.what(), start);
        }
        fail_at("unknown function '" + name + "'", start);
      }
      if (!syms_.has(name)) fail_at("unknown symbol '" + name + "'", start);
      return Expr::symbol(name);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  const SymbolTable& syms_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const SymbolTable& symbols) { return Parser(text, symbols).run(); }

}  // namespace linevo
