#include "canardkit/parser.hpp"

#include <cctype>
#include <string>

#include "canardkit/error.hpp"

namespace canardkit {

namespace {

enum class TokenKind { kInteger, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::kEnd:
      return "end of input";
    case TokenKind::kInteger:
      return "number '" + t.text + "'";
    case TokenKind::kIdent:
      return "identifier '" + t.text + "'";
    default:
      return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t{TokenKind::kEnd, "", line_, column_};
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(t.text);
      t.kind = TokenKind::kInteger;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance(t.text);
      }
      t.kind = TokenKind::kIdent;
      return t;
    }
    switch (c) {
      case '+': t.kind = TokenKind::kPlus; break;
      case '-': t.kind = TokenKind::kMinus; break;
      case '*': t.kind = TokenKind::kStar; break;
      case '/': t.kind = TokenKind::kSlash; break;
      case '^': t.kind = TokenKind::kCaret; break;
      case '(': t.kind = TokenKind::kLParen; break;
      case ')': t.kind = TokenKind::kRParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }
    advance(t.text);
    return t;
  }

 private:
  void advance(std::string& into) {
    into += src_[pos_++];
    ++column_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      if (src_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, const VarList& vars) : lexer_(src), vars_(vars) { current_ = lexer_.next(); }

  MultiPoly parse() {
    MultiPoly result = expr();
    if (current_.kind != TokenKind::kEnd) fail("unexpected " + describe(current_));
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, current_.line, current_.column);
  }

  Token take() {
    Token t = current_;
    current_ = lexer_.next();
    return t;
  }

  MultiPoly expr() {
    MultiPoly acc = term();
    while (current_.kind == TokenKind::kPlus || current_.kind == TokenKind::kMinus) {
      const bool minus = take().kind == TokenKind::kMinus;
      MultiPoly rhs = term();
      if (minus) {
        acc -= rhs;
      } else {
        acc += rhs;
      }
    }
    return acc;
  }

  MultiPoly term() {
    MultiPoly acc = unary();
    while (current_.kind == TokenKind::kStar || current_.kind == TokenKind::kSlash) {
      const Token op = take();
      MultiPoly rhs = unary();
      if (op.kind == TokenKind::kStar) {
        acc = acc * rhs;
        continue;
      }
      auto divisor = rhs.constant_value();
      if (!divisor) throw ParseError("division is only allowed by a rational constant", op.line, op.column);
      if (divisor->is_zero()) throw ParseError("division by zero", op.line, op.column);
      acc *= divisor->reciprocal();
    }
    return acc;
  }

  MultiPoly unary() {
    if (current_.kind == TokenKind::kMinus) {
      take();
      return -unary();
    }
    return factor();
  }

  MultiPoly factor() {
    MultiPoly b = base();
    if (current_.kind == TokenKind::kCaret) {
      take();
      if (current_.kind != TokenKind::kInteger) {
        fail("exponent must be a non-negative integer literal, found " + describe(current_));
      }
      const Token e = take();
      if (e.text.size() > 6) throw ParseError("exponent too large", e.line, e.column);
      b = b.pow(static_cast<unsigned>(std::stoul(e.text)));
      if (current_.kind == TokenKind::kCaret) fail("chained exponents need parentheses");
    }
    return b;
  }

  MultiPoly base() {
    switch (current_.kind) {
      case TokenKind::kInteger: {
        const Token t = take();
        return MultiPoly::constant(vars_, Rational(mpz_class(t.text, 10)));
      }
      case TokenKind::kIdent: {
        const Token t = take();
        if (!vars_.index_of(t.text)) {
          throw ParseError("unknown variable '" + t.text + "'", t.line, t.column);
        }
        if (current_.kind == TokenKind::kIdent || current_.kind == TokenKind::kInteger ||
            current_.kind == TokenKind::kLParen) {
          fail("implicit multiplication is not allowed; use '*'");
        }
        return MultiPoly::variable(vars_, t.text);
      }
      case TokenKind::kLParen: {
        take();
        MultiPoly inner = expr();
        if (current_.kind != TokenKind::kRParen) fail("expected ')', found " + describe(current_));
        take();
        return inner;
      }
      default:
        fail("expected a number, variable or '(', found " + describe(current_));
    }
  }

  Lexer lexer_;
  const VarList& vars_;
  Token current_;
};

}  // namespace

MultiPoly parse_poly(std::string_view source, const VarList& vars) {
  return Parser(source, vars).parse();
}

}  // namespace canardkit
