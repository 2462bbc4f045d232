#include "rr/chart/expression.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

#include "rr/errors.hpp"

namespace rr::chart {
namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  ScalarField parse() {
    ScalarField r = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput("expression '" + s_ + "': " + msg + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ScalarField expr() {
    ScalarField r = term();
    for (;;) {
      if (accept('+')) {
        r = r + term();
      } else if (accept('-')) {
        r = r - term();
      } else {
        return r;
      }
    }
  }

  ScalarField term() {
    ScalarField r = unary();
    for (;;) {
      if (accept('*')) {
        r = r * unary();
      } else if (accept('/')) {
        r = r / unary();
      } else {
        return r;
      }
    }
  }

  ScalarField unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  ScalarField power() {
    ScalarField base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  ScalarField primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarField r = expr();
      expect(')');
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return ScalarField::coordinate(0);
      if (id == "y") return ScalarField::coordinate(1);
      if (id == "z" || id == "tau") return ScalarField::coordinate(2);
      if (id == "pi") return ScalarField(std::numbers::pi);
      ScalarField (*fn)(const ScalarField&) = nullptr;
      if (id == "sin") fn = &rr::chart::sin;
      if (id == "cos") fn = &rr::chart::cos;
      if (id == "exp") fn = &rr::chart::exp;
      if (id == "log") fn = &rr::chart::log;
      if (id == "sqrt") fn = &rr::chart::sqrt;
      if (!fn) {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      expect('(');
      ScalarField arg = expr();
      expect(')');
      return fn(arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  ScalarField number() {
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return ScalarField(v);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarField parse_expression(const std::string& text) { return Parser(text).parse(); }

}  // namespace rr::chart
