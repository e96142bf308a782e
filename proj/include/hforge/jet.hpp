#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hforge/eval.hpp"
#include "hforge/expr.hpp"

namespace hforge {

// Index set of a truncated multivariate Taylor expansion: every multi-index
// alpha with alpha_v <= cap_v and (optionally) |alpha| <= total_cap.
class JetSpace {
 public:
  static constexpr int kDefaultCap = 4;

  JetSpace(std::vector<std::string> vars, std::vector<int> caps, int total_cap = -1);

  static std::shared_ptr<const JetSpace> make(std::vector<std::string> vars,
                                              int cap = kDefaultCap, int total_cap = -1);
  static std::shared_ptr<const JetSpace> make_total(std::vector<std::string> vars, int total_degree);

  size_t nvars() const { return vars_.size(); }
  size_t size() const { return indices_.size(); }
  const std::vector<std::string>& vars() const { return vars_; }
  int var_index(const std::string& name) const;  // -1 if absent
  const std::vector<int>& caps() const { return caps_; }
  int max_degree() const { return max_degree_; }

  const std::vector<int>& multi_index(size_t k) const { return indices_[k]; }
  // -1 if the multi-index is outside the space.
  long find(const std::vector<int>& alpha) const;
  long shifted(size_t k, size_t var, int delta) const;

  struct Triple {
    unsigned a, b, out;
  };
  const std::vector<Triple>& triples() const { return triples_; }

 private:
  std::vector<std::string> vars_;
  std::vector<int> caps_;
  int total_cap_;
  int max_degree_ = 0;
  std::vector<std::vector<int>> indices_;
  std::vector<long> dense_to_compact_;
  std::vector<size_t> radix_;
  std::vector<Triple> triples_;
  std::vector<std::vector<long>> shift_up_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

// Truncated Taylor value: coefficient k multiplies prod_v h_v^{alpha_v}.
class Jet {
 public:
  Jet() = default;
  Jet(JetSpacePtr space, cplx constant);

  static Jet variable(JetSpacePtr space, size_t var, cplx value);
  static Jet variable(JetSpacePtr space, const std::string& var, cplx value);

  const JetSpacePtr& space() const { return space_; }
  cplx value() const { return c_.empty() ? cplx(0.0) : c_[0]; }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<cplx>& coeffs() { return c_; }

  // Taylor coefficient for alpha (0 outside the space).
  cplx coeff(const std::vector<int>& alpha) const;
  // Mixed partial derivative: coefficient times alpha!.
  cplx partial(const std::vector<int>& alpha) const;
  // Convenience for up to second order by variable position.
  cplx d(size_t v) const;
  cplx d(size_t v, size_t w) const;

  Jet derivative(size_t var) const;
  bool is_constant() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(cplx s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, cplx s);
  friend Jet operator-(Jet a, cplx s);
  friend Jet operator-(const Jet& a);

  // f(a0 + h) = sum_k d[k] h^k with h nilpotent.
  Jet compose(const std::vector<cplx>& d) const;

 private:
  JetSpacePtr space_;
  std::vector<cplx> c_;
};

Jet reciprocal(const Jet& a);
Jet operator/(const Jet& a, const Jet& b);

Jet hf_div(const Jet& a, const Jet& b, const Node* n);
Jet hf_ln(const Jet& a, const Node* n);
Jet hf_sqrt(const Jet& a, const Node* n);
Jet hf_powi(const Jet& a, int e, const Node* n);

// Evaluates e with the given jet bindings; variables of e not bound there are
// looked up in `constants` and lifted.
Jet jet_of(const Expr& e, const std::unordered_map<std::string, Jet>& bindings,
           const JetSpacePtr& space, const std::map<std::string, cplx>& constants = {});

// Jet of e about `point` in the variables of `space` (other variables are
// taken from `point` as constants).
Jet jet_at(const Expr& e, const JetSpacePtr& space, const std::map<std::string, cplx>& point);

// Mixed partial derivative of f at point; `order` maps variable -> count.
cplx jet_eval(const Expr& f, const std::map<std::string, cplx>& point,
              const std::map<std::string, int>& order, int truncation = JetSpace::kDefaultCap);

}  // namespace hforge
