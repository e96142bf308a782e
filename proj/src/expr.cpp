#include "hforge/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "hforge/errors.hpp"
#include "hforge/eval.hpp"

namespace hforge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::UnboundVariable: return "unbound variable";
    case ErrorKind::SingularEvaluation: return "singular evaluation";
    case ErrorKind::PoleOnContour: return "pole on contour";
    case ErrorKind::DegenerateTetrad: return "degenerate tetrad";
    case ErrorKind::DegenerateMetric: return "degenerate metric";
    case ErrorKind::NotLinearizedSolution: return "not a linearized solution";
    case ErrorKind::InconsistentSystem: return "inconsistent system";
    case ErrorKind::AnsatzInsufficient: return "ansatz insufficient";
    case ErrorKind::IndexRange: return "index out of range";
    case ErrorKind::TailUndetermined: return "tail coefficients undetermined";
    case ErrorKind::LegendreFailed: return "Legendre inversion failed";
    case ErrorKind::DegenerateLegendre: return "degenerate Legendre transform";
    case ErrorKind::DegenerateGH: return "degenerate GH potential";
    case ErrorKind::OffSurface: return "off surface";
    case ErrorKind::DegenerateM: return "M degenerate";
    case ErrorKind::WeightMismatch: return "weight mismatch";
    case ErrorKind::OffConstraint: return "off constraint surface";
    case ErrorKind::DegenerateSigma: return "degenerate two-form";
    case ErrorKind::BranchPoint: return "branch point";
    case ErrorKind::DegenerateElliptic: return "degenerate elliptic curve";
    case ErrorKind::LimitAmbiguous: return "limit selection ambiguous";
    case ErrorKind::DegreeMismatch: return "degree mismatch";
  }
  return "error";
}

void throw_singular(const Node* n, const char* why) {
  std::string text = node_to_string(n);
  if (text.size() > 120) text = text.substr(0, 117) + "...";
  throw Error(ErrorKind::SingularEvaluation,
              std::string("singular evaluation (") + why + ") at node '" + text + "'");
}

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(cplx c) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = c;
  return n;
}

const NodePtr& zero_node() {
  static const NodePtr z = make_const(0.0);
  return z;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr, int e = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  n->exponent = e;
  return n;
}

bool is_const(const NodePtr& n, cplx c) { return n->op == Op::Const && n->value == c; }
bool is_const(const NodePtr& n) { return n->op == Op::Const; }

NodePtr mk_neg(const NodePtr& a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->op == Op::Neg) return a->lhs;
  return make_node(Op::Neg, a);
}

NodePtr mk_add(const NodePtr& a, const NodePtr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  if (b->op == Op::Neg) return make_node(Op::Sub, a, b->lhs);
  return make_node(Op::Add, a, b);
}

NodePtr mk_sub(const NodePtr& a, const NodePtr& b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return mk_neg(b);
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  if (a == b) return zero_node();
  if (b->op == Op::Neg) return make_node(Op::Add, a, b->lhs);
  return make_node(Op::Sub, a, b);
}

NodePtr mk_mul(const NodePtr& a, const NodePtr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return zero_node();
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return mk_neg(b);
  if (is_const(b, -1.0)) return mk_neg(a);
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  return make_node(Op::Mul, a, b);
}

NodePtr mk_div(const NodePtr& a, const NodePtr& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b) && b->value != cplx(0.0)) {
    if (is_const(a)) return make_const(a->value / b->value);
    if (is_const(b, -1.0)) return mk_neg(a);
  }
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return zero_node();
  return make_node(Op::Div, a, b);
}

NodePtr mk_pow(const NodePtr& a, int e) {
  if (e == 0) return make_const(1.0);
  if (e == 1) return a;
  if (is_const(a) && !(e < 0 && a->value == cplx(0.0)))
    return make_const(hf_powi(a->value, e, a.get()));
  if (a->op == Op::Pow) {
    long long prod = static_cast<long long>(a->exponent) * e;
    if (prod > -100000 && prod < 100000) return mk_pow(a->lhs, static_cast<int>(prod));
  }
  return make_node(Op::Pow, a, nullptr, e);
}

NodePtr mk_ln(const NodePtr& a) {
  if (is_const(a, 1.0)) return zero_node();
  return make_node(Op::Ln, a);
}

NodePtr mk_sqrt(const NodePtr& a) {
  if (is_const(a, 0.0)) return zero_node();
  if (is_const(a, 1.0)) return make_const(1.0);
  return make_node(Op::Sqrt, a);
}

// ---------------------------------------------------------------- printing

int precedence(const Node* n) {
  switch (n->op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const:
      if (n->value.imag() != 0.0) return 5;
      return n->value.real() < 0.0 ? 3 : 5;
    default: return 5;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_const(cplx c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return "(" + format_double(c.imag()) + "i)";
  std::string im = format_double(c.imag());
  std::string sign = (im[0] == '-') ? "" : "+";
  return "(" + format_double(c.real()) + sign + im + "i)";
}

void print(const Node* n, std::string& out);

void print_child(const Node* child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Node* n, std::string& out) {
  switch (n->op) {
    case Op::Const: out += format_const(n->value); return;
    case Op::Var: out += n->name; return;
    case Op::Add:
      print_child(n->lhs.get(), 1, out);
      out += " + ";
      print_child(n->rhs.get(), 2, out);
      return;
    case Op::Sub:
      print_child(n->lhs.get(), 1, out);
      out += " - ";
      print_child(n->rhs.get(), 2, out);
      return;
    case Op::Mul:
      print_child(n->lhs.get(), 2, out);
      out += "*";
      print_child(n->rhs.get(), 3, out);
      return;
    case Op::Div:
      print_child(n->lhs.get(), 2, out);
      out += "/";
      print_child(n->rhs.get(), 3, out);
      return;
    case Op::Neg:
      out += "-";
      print_child(n->lhs.get(), 3, out);
      return;
    case Op::Pow:
      print_child(n->lhs.get(), 5, out);
      out += "^";
      if (n->exponent < 0) {
        out += "(" + std::to_string(n->exponent) + ")";
      } else {
        out += std::to_string(n->exponent);
      }
      return;
    case Op::Ln:
      out += "ln(";
      print(n->lhs.get(), out);
      out += ")";
      return;
    case Op::Sqrt:
      out += "sqrt(";
      print(n->lhs.get(), out);
      out += ")";
      return;
  }
}

// ---------------------------------------------------------------- parsing

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1;
    int col = 1;
    for (size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col),
                     line, col);
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

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      int e = exponent();
      return pow(base, e);
    }
    return base;
  }

  int exponent() {
    skip();
    bool paren = accept('(');
    skip();
    int sign = 1;
    if (accept('-')) {
      sign = -1;
    } else {
      accept('+');
    }
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int value = 0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, value);
    if (res.ec != std::errc()) fail("exponent out of range");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      fail("exponent must be an integer");
    if (paren) expect(')');
    return sign * value;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id(s_.substr(start, pos_ - start));
      if (id == "ln" || id == "sqrt") {
        expect('(');
        Expr arg = expr();
        expect(')');
        return id == "ln" ? ln(arg) : sqrt(arg);
      }
      if (id == "i") return Expr(cplx(0.0, 1.0));
      return Expr::var(id);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        !(pos_ + 1 < s_.size() &&
          (std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
      ++pos_;
      return Expr(cplx(0.0, v));
    }
    return Expr(v);
  }

  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------- Expr API

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(cplx c) : node_(make_const(c)) {}
Expr::Expr(double c) : node_(make_const(c)) {}
Expr::Expr(int c) : node_(make_const(static_cast<double>(c))) {}

Expr Expr::var(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->name = name;
  return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::constant(cplx c) { return Expr(c); }

Expr Expr::parse(std::string_view text) { return Parser(text).run(); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(mk_add(a.node_, b.node_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(mk_sub(a.node_, b.node_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mk_mul(a.node_, b.node_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(mk_div(a.node_, b.node_)); }
Expr operator-(const Expr& a) { return Expr(mk_neg(a.node_)); }
Expr pow(const Expr& base, int exponent) { return Expr(mk_pow(base.node_, exponent)); }
Expr ln(const Expr& a) { return Expr(mk_ln(a.node_)); }
Expr sqrt(const Expr& a) { return Expr(mk_sqrt(a.node_)); }

Expr Expr::diff(const std::string& var) const {
  std::unordered_map<const Node*, NodePtr> memo;
  std::function<NodePtr(const NodePtr&)> d = [&](const NodePtr& n) -> NodePtr {
    if (n->op == Op::Const) return zero_node();
    if (n->op == Op::Var) return n->name == var ? make_const(1.0) : zero_node();
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    NodePtr r;
    switch (n->op) {
      case Op::Add: r = mk_add(d(n->lhs), d(n->rhs)); break;
      case Op::Sub: r = mk_sub(d(n->lhs), d(n->rhs)); break;
      case Op::Mul: r = mk_add(mk_mul(d(n->lhs), n->rhs), mk_mul(n->lhs, d(n->rhs))); break;
      case Op::Div: {
        NodePtr da = d(n->lhs);
        NodePtr db = d(n->rhs);
        r = mk_sub(mk_div(da, n->rhs), mk_div(mk_mul(n->lhs, db), mk_pow(n->rhs, 2)));
        break;
      }
      case Op::Neg: r = mk_neg(d(n->lhs)); break;
      case Op::Pow:
        r = mk_mul(mk_mul(make_const(static_cast<double>(n->exponent)),
                          mk_pow(n->lhs, n->exponent - 1)),
                   d(n->lhs));
        break;
      case Op::Ln: r = mk_div(d(n->lhs), n->lhs); break;
      case Op::Sqrt: r = mk_div(d(n->lhs), mk_mul(make_const(2.0), n)); break;
      default: r = zero_node(); break;
    }
    memo.emplace(n.get(), r);
    return r;
  };
  return Expr(d(node_));
}

Expr Expr::diff(const std::string& var, int times) const {
  Expr r = *this;
  for (int k = 0; k < times; ++k) r = r.diff(var);
  return r;
}

Expr Expr::substitute(const std::map<std::string, Expr>& repl) const {
  std::unordered_map<const Node*, NodePtr> memo;
  std::function<NodePtr(const NodePtr&)> s = [&](const NodePtr& n) -> NodePtr {
    if (n->op == Op::Const) return n;
    if (n->op == Op::Var) {
      auto it = repl.find(n->name);
      return it == repl.end() ? n : it->second.shared();
    }
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    NodePtr r;
    switch (n->op) {
      case Op::Add: r = mk_add(s(n->lhs), s(n->rhs)); break;
      case Op::Sub: r = mk_sub(s(n->lhs), s(n->rhs)); break;
      case Op::Mul: r = mk_mul(s(n->lhs), s(n->rhs)); break;
      case Op::Div: r = mk_div(s(n->lhs), s(n->rhs)); break;
      case Op::Neg: r = mk_neg(s(n->lhs)); break;
      case Op::Pow: r = mk_pow(s(n->lhs), n->exponent); break;
      case Op::Ln: r = mk_ln(s(n->lhs)); break;
      case Op::Sqrt: r = mk_sqrt(s(n->lhs)); break;
      default: r = n; break;
    }
    memo.emplace(n.get(), r);
    return r;
  };
  return Expr(s(node_));
}

std::set<std::string> Expr::variables() const {
  std::set<std::string> out;
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const Node*)> walk = [&](const Node* n) {
    if (!n || seen.count(n)) return;
    seen.emplace(n, true);
    if (n->op == Op::Var) out.insert(n->name);
    walk(n->lhs.get());
    walk(n->rhs.get());
  };
  walk(node_.get());
  return out;
}

bool Expr::depends_on(const std::string& var) const { return variables().count(var) > 0; }

cplx Expr::evaluate(const std::map<std::string, cplx>& point) const {
  std::unordered_map<std::string, cplx> b(point.begin(), point.end());
  return evaluate_as<cplx>(*this, b, [](cplx c) { return c; });
}

std::optional<cplx> Expr::constant_value() const {
  if (node_->op == Op::Const) return node_->value;
  return std::nullopt;
}

bool Expr::is_zero() const { return node_->op == Op::Const && node_->value == cplx(0.0); }

std::string Expr::to_string() const { return node_to_string(node_.get()); }

std::string node_to_string(const Node* n) {
  std::string out;
  print(n, out);
  return out;
}

Expr poisson_bracket(const Expr& f, const Expr& g, const BracketPair& pair) {
  Expr fy = f.diff(pair.y_name);
  Expr gy = g.diff(pair.y_name);
  Expr fx = f.diff(pair.x_name);
  Expr gx = g.diff(pair.x_name);
  if (pair.x_sign < 0) {
    fx = -fx;
    gx = -gx;
  }
  return fy * gx - fx * gy;
}

}  // namespace hforge
