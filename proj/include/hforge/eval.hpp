#pragma once

#include <functional>
#include <string>
#include <unordered_map>

#include "hforge/errors.hpp"
#include "hforge/expr.hpp"

namespace hforge {

[[noreturn]] void throw_singular(const Node* n, const char* why);

inline cplx hf_div(const cplx& a, const cplx& b, const Node* n) {
  if (b == cplx(0.0)) throw_singular(n, "division by zero");
  return a / b;
}
inline cplx hf_ln(const cplx& a, const Node* n) {
  if (a == cplx(0.0)) throw_singular(n, "logarithm at zero");
  return std::log(a);
}
inline cplx hf_sqrt(const cplx& a, const Node*) { return std::sqrt(a); }
inline cplx hf_powi(const cplx& a, int e, const Node* n) {
  if (e < 0 && a == cplx(0.0)) throw_singular(n, "negative power of zero");
  cplx r(1.0);
  cplx b = e < 0 ? cplx(1.0) / a : a;
  for (unsigned k = static_cast<unsigned>(e < 0 ? -e : e); k; k >>= 1) {
    if (k & 1U) r *= b;
    b *= b;
  }
  return r;
}

// Evaluates an expression over any scalar type S providing +, -, *, unary -
// and the hf_* functions above. Shared subtrees are evaluated once.
template <class S>
class Evaluator {
 public:
  using Lift = std::function<S(cplx)>;

  Evaluator(const std::unordered_map<std::string, S>& bindings, Lift lift)
      : bindings_(bindings), lift_(std::move(lift)) {}

  S operator()(const Expr& e) { return eval(e.node()); }

 private:
  S eval(const Node* n) {
    if (n->op == Op::Const) return lift_(n->value);
    if (n->op == Op::Var) {
      auto it = bindings_.find(n->name);
      if (it == bindings_.end())
        throw Error(ErrorKind::UnboundVariable, "unbound variable '" + n->name + "'");
      return it->second;
    }
    auto hit = memo_.find(n);
    if (hit != memo_.end()) return hit->second;
    S r = compute(n);
    memo_.emplace(n, r);
    return r;
  }

  S compute(const Node* n) {
    switch (n->op) {
      case Op::Add: return eval(n->lhs.get()) + eval(n->rhs.get());
      case Op::Sub: return eval(n->lhs.get()) - eval(n->rhs.get());
      case Op::Mul: return eval(n->lhs.get()) * eval(n->rhs.get());
      case Op::Div: return hf_div(eval(n->lhs.get()), eval(n->rhs.get()), n);
      case Op::Neg: return -eval(n->lhs.get());
      case Op::Pow: return hf_powi(eval(n->lhs.get()), n->exponent, n);
      case Op::Ln: return hf_ln(eval(n->lhs.get()), n);
      case Op::Sqrt: return hf_sqrt(eval(n->lhs.get()), n);
      default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "malformed expression node");
  }

  const std::unordered_map<std::string, S>& bindings_;
  Lift lift_;
  std::unordered_map<const Node*, S> memo_;
};

template <class S>
S evaluate_as(const Expr& e, const std::unordered_map<std::string, S>& bindings,
              typename Evaluator<S>::Lift lift) {
  Evaluator<S> ev(bindings, std::move(lift));
  return ev(e);
}

}  // namespace hforge
