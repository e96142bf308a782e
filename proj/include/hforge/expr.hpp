#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

namespace hforge {

using cplx = std::complex<double>;

enum class Op { Var, Const, Add, Sub, Mul, Div, Neg, Pow, Ln, Sqrt };

struct Node {
  Op op = Op::Const;
  cplx value{};
  std::string name;
  int exponent = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

// Immutable expression tree over complex scalars. Nodes are shared, so copies
// are cheap and derivative trees reuse the subtrees of their source.
class Expr {
 public:
  Expr();
  Expr(cplx c);  // NOLINT(google-explicit-constructor)
  Expr(double c);  // NOLINT(google-explicit-constructor)
  Expr(int c);  // NOLINT(google-explicit-constructor)

  static Expr var(const std::string& name);
  static Expr constant(cplx c);
  static Expr parse(std::string_view text);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, int exponent);
  friend Expr ln(const Expr& a);
  friend Expr sqrt(const Expr& a);

  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  Expr diff(const std::string& var) const;
  Expr diff(const std::string& var, int times) const;
  Expr substitute(const std::map<std::string, Expr>& repl) const;

  std::set<std::string> variables() const;
  bool depends_on(const std::string& var) const;

  // Throws Error(UnboundVariable) or Error(SingularEvaluation).
  cplx evaluate(const std::map<std::string, cplx>& point) const;

  std::optional<cplx> constant_value() const;
  bool is_zero() const;
  std::string to_string() const;

  const Node* node() const { return node_.get(); }
  const std::shared_ptr<const Node>& shared() const { return node_; }
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

std::string node_to_string(const Node* n);

// Bracket {f,g} = f_y g_x - f_x g_y where the x-slot may be a sign-flipped
// coordinate: f_x is read as x_sign * d f / d(x_name).
struct BracketPair {
  std::string y_name = "y";
  std::string x_name = "x";
  int x_sign = 1;
};

Expr poisson_bracket(const Expr& f, const Expr& g, const BracketPair& pair = {});

}  // namespace hforge
