#include "nld/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "nld/errors.hpp"

namespace nld {

struct Expression::Node {
  enum class Op {
    constant, var_x, var_y,
    add, sub, mul, div, pow, neg,
    abs, exp, ln, sqrt, cos, sin,
    indicator,
  };
  Op op = Op::constant;
  double value = 0.0;
  std::vector<std::unique_ptr<Node>> args;

  double eval(double x, double y) const {
    switch (op) {
      case Op::constant: return value;
      case Op::var_x: return x;
      case Op::var_y: return y;
      case Op::add: return args[0]->eval(x, y) + args[1]->eval(x, y);
      case Op::sub: return args[0]->eval(x, y) - args[1]->eval(x, y);
      case Op::mul: return args[0]->eval(x, y) * args[1]->eval(x, y);
      case Op::div: return args[0]->eval(x, y) / args[1]->eval(x, y);
      case Op::pow: return std::pow(args[0]->eval(x, y), args[1]->eval(x, y));
      case Op::neg: return -args[0]->eval(x, y);
      case Op::abs: return std::abs(args[0]->eval(x, y));
      case Op::exp: return std::exp(args[0]->eval(x, y));
      case Op::ln: return std::log(args[0]->eval(x, y));
      case Op::sqrt: return std::sqrt(args[0]->eval(x, y));
      case Op::cos: return std::cos(args[0]->eval(x, y));
      case Op::sin: return std::sin(args[0]->eval(x, y));
      case Op::indicator: {
        const double lo = args[0]->eval(x, y);
        const double hi = args[1]->eval(x, y);
        const double v = args[2]->eval(x, y);
        return (lo < v && v < hi) ? 1.0 : 0.0;
      }
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::unique_ptr<Node>;

NodePtr make_constant(double v) {
  auto n = std::make_unique<Node>();
  n->value = v;
  return n;
}

NodePtr make_op(Node::Op op, std::vector<NodePtr> args) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    auto root = expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return root;
  }

  bool uses_y() const { return uses_y_; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("expression '{}': {} at offset {}", src_, what, pos_));
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(fmt::format("expected '{}'", c));
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Node::Op::add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(Node::Op::sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Node::Op::mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = binary(Node::Op::div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      std::vector<NodePtr> args;
      args.push_back(unary());
      return make_op(Node::Op::neg, std::move(args));
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return binary(Node::Op::pow, std::move(base), unary());
    return base;
  }

  static NodePtr binary(Node::Op op, NodePtr a, NodePtr b) {
    std::vector<NodePtr> args;
    args.push_back(std::move(a));
    args.push_back(std::move(b));
    return make_op(op, std::move(args));
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (src_.substr(pos_).starts_with("θ")) {
      pos_ += std::string_view("θ").size();
      return make_op(Node::Op::var_x, {});
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(fmt::format("unexpected character '{}'", c));
  }

  NodePtr number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make_constant(value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "x" || name == "theta") return make_op(Node::Op::var_x, {});
    if (name == "y") {
      uses_y_ = true;
      return make_op(Node::Op::var_y, {});
    }
    if (name == "pi") return make_constant(std::numbers::pi);
    if (name == "e") return make_constant(std::numbers::e);

    static constexpr std::pair<std::string_view, Node::Op> unary_functions[] = {
        {"abs", Node::Op::abs}, {"exp", Node::Op::exp},   {"ln", Node::Op::ln},
        {"sqrt", Node::Op::sqrt}, {"cos", Node::Op::cos}, {"sin", Node::Op::sin},
    };
    for (const auto& [fn, op] : unary_functions) {
      if (name == fn) {
        expect('(');
        std::vector<NodePtr> args;
        args.push_back(expr());
        expect(')');
        return make_op(op, std::move(args));
      }
    }
    if (name == "indicator") {
      expect('(');
      std::vector<NodePtr> args;
      args.push_back(expr());
      expect(',');
      args.push_back(expr());
      expect(',');
      args.push_back(expr());
      expect(')');
      return make_op(Node::Op::indicator, std::move(args));
    }
    pos_ = start;
    fail(fmt::format("unknown identifier '{}'", name));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  bool uses_y_ = false;
};

}  // namespace

Expression Expression::parse(std::string_view source) {
  Parser parser(source);
  auto root = parser.parse();
  return Expression(std::shared_ptr<const Node>(std::move(root)), std::string(source),
                    parser.uses_y());
}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace nld
