#include "fgbc/expression.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "fgbc/error.hpp"

namespace fgbc {

struct Expression::Node {
  enum class Op { Const, VarU, VarV, Add, Sub, Mul, Div, Pow, Neg, Call };
  Op op = Op::Const;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using D2 = ad::Dual<double, 2>;

NodePtr make(Node::Op op, std::vector<NodePtr> args = {}, double value = 0.0,
             std::string fn = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  n->fn = std::move(fn);
  return n;
}

bool known_function(const std::string& f) {
  return f == "sin" || f == "cos" || f == "tan" || f == "exp" || f == "log" || f == "sqrt" ||
         f == "abs";
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Validation,
                fmt::format("expression '{}': {} at column {}", s_, what, pos_ + 1));
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

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Node::Op::Add, {n, term()});
      else if (accept('-')) n = make(Node::Op::Sub, {n, term()});
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Node::Op::Mul, {n, unary()});
      else if (accept('/')) n = make(Node::Op::Div, {n, unary()});
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Node::Op::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Node::Op::Pow, {base, unary()});
    return base;
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return make(Node::Op::Const, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (accept('(')) {
        if (!known_function(name)) {
          pos_ = start;
          fail(fmt::format("unknown function '{}'", name));
        }
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(Node::Op::Call, {arg}, 0.0, name);
      }
      if (name == "u" || name == "x1") return make(Node::Op::VarU);
      if (name == "v" || name == "x2") return make(Node::Op::VarV);
      if (name == "pi") return make(Node::Op::Const, {}, std::numbers::pi);
      if (name == "e") return make(Node::Op::Const, {}, std::numbers::e);
      pos_ = start;
      fail(fmt::format("unknown identifier '{}'", name));
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

template <typename S>
S eval(const Node& n, const S& u, const S& v) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  switch (n.op) {
    case Node::Op::Const: return S(n.value);
    case Node::Op::VarU: return u;
    case Node::Op::VarV: return v;
    case Node::Op::Add: return eval(*n.args[0], u, v) + eval(*n.args[1], u, v);
    case Node::Op::Sub: return eval(*n.args[0], u, v) - eval(*n.args[1], u, v);
    case Node::Op::Mul: return eval(*n.args[0], u, v) * eval(*n.args[1], u, v);
    case Node::Op::Div: return eval(*n.args[0], u, v) / eval(*n.args[1], u, v);
    case Node::Op::Neg: return -eval(*n.args[0], u, v);
    case Node::Op::Pow: {
      const Node& ex = *n.args[1];
      const S b = eval(*n.args[0], u, v);
      if (ex.op == Node::Op::Const && ex.value == std::round(ex.value) && std::abs(ex.value) <= 16) {
        // Integer powers by repeated multiplication so negative bases are fine.
        const int k = static_cast<int>(ex.value);
        S r(1.0);
        for (int i = 0; i < std::abs(k); ++i) r = r * b;
        return k < 0 ? S(1.0) / r : r;
      }
      const S e = eval(ex, u, v);
      return exp(e * log(b));
    }
    case Node::Op::Call: {
      const S a = eval(*n.args[0], u, v);
      if (n.fn == "sin") return sin(a);
      if (n.fn == "cos") return cos(a);
      if (n.fn == "tan") return sin(a) / cos(a);
      if (n.fn == "exp") return exp(a);
      if (n.fn == "log") return log(a);
      if (n.fn == "sqrt") return sqrt(a);
      return abs(a);
    }
  }
  return S(0.0);
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  return Expression(text, p.parse());
}

double Expression::operator()(double u, double v) const { return eval(*root_, u, v); }

D2 Expression::operator()(const D2& u, const D2& v) const { return eval(*root_, u, v); }

}  // namespace fgbc
