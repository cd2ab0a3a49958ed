#include "finsler/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace finsler {

class ExprParser {
 public:
  ExprParser(std::string_view text, int dimension) : text_(text) {
    tree_.dimension_ = dimension;
  }

  ExprTree run() {
    if (tree_.dimension_ < 1) throw ArgumentError("expression dimension must be positive");
    skip_space();
    if (pos_ == text_.size()) throw ParseError("syntax error: empty expression", pos_);
    tree_.root_ = expr();
    skip_space();
    if (pos_ != text_.size())
      throw ParseError("syntax error: unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return std::move(tree_);
  }

 private:
  int push(ExprNode node) {
    tree_.nodes_.push_back(node);
    return static_cast<int>(tree_.nodes_.size()) - 1;
  }

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
      if (pos_ >= text_.size())
        throw ParseError(std::string("syntax error: expected '") + c + "' but reached end of input",
                         pos_);
      throw ParseError(std::string("syntax error: expected '") + c + "'", pos_);
    }
  }

  int expr() {
    int lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = push({NodeKind::add, 0.0, 0, lhs, term()});
      } else if (accept('-')) {
        lhs = push({NodeKind::sub, 0.0, 0, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = factor();
    while (true) {
      if (accept('*')) {
        lhs = push({NodeKind::mul, 0.0, 0, lhs, factor()});
      } else if (accept('/')) {
        lhs = push({NodeKind::div, 0.0, 0, lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  int factor() {
    if (accept('-')) return push({NodeKind::neg, 0.0, 0, power(), -1});
    return power();
  }

  int power() {
    int base = atom();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("syntax error: expected integer exponent", start);
      int e = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, e);
      if (ec != std::errc()) throw ParseError("exponent out of range", start);
      base = push({NodeKind::pow, 0.0, e, base, -1});
    }
    return base;
  }

  int atom() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("syntax error: unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("syntax error: unexpected '") + c + "'", pos_);
  }

  int number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (exp_start == pos_) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    return push({NodeKind::number, v, 0, -1, -1});
  }

  int identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    const std::size_t digit_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view digits = text_.substr(digit_start, pos_ - digit_start);

    if ((word == "x" || word == "y") && !digits.empty()) {
      if (digits[0] == '0') throw ParseError("unknown identifier '" + std::string(word) +
                                                 std::string(digits) + "'",
                                             start);
      int index = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec != std::errc() || index > tree_.dimension_)
        throw ParseError("variable '" + std::string(word) + std::string(digits) +
                             "' exceeds dimension " + std::to_string(tree_.dimension_),
                         start);
      return push({word == "x" ? NodeKind::var_x : NodeKind::var_y, 0.0, index - 1, -1, -1});
    }
    if (digits.empty()) {
      NodeKind kind;
      if (word == "sqrt") kind = NodeKind::sqrt;
      else if (word == "sin") kind = NodeKind::sin;
      else if (word == "cos") kind = NodeKind::cos;
      else if (word == "exp") kind = NodeKind::exp;
      else if (word == "log") kind = NodeKind::log;
      else throw ParseError("unknown identifier '" + std::string(word) + "'", start);
      expect('(');
      int arg = expr();
      expect(')');
      return push({kind, 0.0, 0, arg, -1});
    }
    throw ParseError("unknown identifier '" + std::string(word) + std::string(digits) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  ExprTree tree_;
};

ExprTree parse_expression(std::string_view text, int dimension) {
  return ExprParser(text, dimension).run();
}

ExprTree ExprTree::constant(double value, int dimension) {
  ExprTree t;
  t.dimension_ = dimension;
  t.nodes_.push_back({NodeKind::number, value, 0, -1, -1});
  t.root_ = 0;
  return t;
}

bool ExprTree::uses_fiber_variables() const {
  for (const auto& n : nodes_)
    if (n.kind == NodeKind::var_y) return true;
  return false;
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print(const std::vector<ExprNode>& nodes, int i) {
  const ExprNode& n = nodes[i];
  auto bin = [&](const char* op) {
    return "(" + print(nodes, n.lhs) + " " + op + " " + print(nodes, n.rhs) + ")";
  };
  auto fn = [&](const char* name) { return std::string(name) + "(" + print(nodes, n.lhs) + ")"; };
  switch (n.kind) {
    case NodeKind::number: return "(" + format_number(n.number) + ")";
    case NodeKind::var_x: return "x" + std::to_string(n.index + 1);
    case NodeKind::var_y: return "y" + std::to_string(n.index + 1);
    case NodeKind::add: return bin("+");
    case NodeKind::sub: return bin("-");
    case NodeKind::mul: return bin("*");
    case NodeKind::div: return bin("/");
    case NodeKind::neg: return "(-" + print(nodes, n.lhs) + ")";
    case NodeKind::pow: return "(" + print(nodes, n.lhs) + "^" + std::to_string(n.index) + ")";
    case NodeKind::sqrt: return fn("sqrt");
    case NodeKind::sin: return fn("sin");
    case NodeKind::cos: return fn("cos");
    case NodeKind::exp: return fn("exp");
    case NodeKind::log: return fn("log");
  }
  return {};
}

}  // namespace

std::string ExprTree::to_string() const {
  if (empty()) return {};
  return print(nodes_, root_);
}

}  // namespace finsler
