#include "expr.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace semidev::cli {

namespace {

struct Parser {
  const std::string& text;
  const std::map<std::string, double>& vars;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  double parse_expr() {
    double v = parse_term();
    while (true) {
      if (eat('+'))
        v += parse_term();
      else if (eat('-'))
        v -= parse_term();
      else
        return v;
    }
  }

  double parse_term() {
    double v = parse_unary();
    while (true) {
      if (eat('*'))
        v *= parse_unary();
      else if (eat('/'))
        v /= parse_unary();
      else
        return v;
    }
  }

  double parse_unary() {
    if (eat('-')) return -parse_unary();
    return parse_primary();
  }

  double parse_primary() {
    skip_ws();
    if (pos >= text.size()) throw std::invalid_argument("truncated expression");
    if (eat('(')) {
      const double v = parse_expr();
      if (!eat(')')) throw std::invalid_argument("missing ')' in expression");
      return v;
    }
    const char head = text[pos];
    if (std::isdigit(static_cast<unsigned char>(head)) || head == '.') {
      char* end = nullptr;
      const double v = std::strtod(text.c_str() + pos, &end);
      pos = static_cast<std::size_t>(end - text.c_str());
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(head)) || head == '_') {
      std::size_t end = pos;
      while (end < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
        ++end;
      const std::string name = text.substr(pos, end - pos);
      pos = end;
      const auto it = vars.find(name);
      if (it == vars.end())
        throw std::invalid_argument("unknown name '" + name + "' in expression");
      return it->second;
    }
    throw std::invalid_argument(std::string("unexpected character '") + head +
                                "' in expression");
  }
};

}  // namespace

double eval_expr(const std::string& text,
                 const std::map<std::string, double>& vars) {
  Parser p{text, vars};
  const double v = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw std::invalid_argument("trailing characters in expression: " + text);
  return v;
}

}  // namespace semidev::cli
