#include "hforge/jet.hpp"

#include <cmath>
#include <numeric>

#include "hforge/errors.hpp"

namespace hforge {

JetSpace::JetSpace(std::vector<std::string> vars, std::vector<int> caps, int total_cap)
    : vars_(std::move(vars)), caps_(std::move(caps)), total_cap_(total_cap) {
  if (caps_.size() != vars_.size())
    throw Error(ErrorKind::InvalidArgument, "jet space: caps/vars size mismatch");
  for (int c : caps_)
    if (c < 0) throw Error(ErrorKind::InvalidArgument, "jet space: negative cap");

  const size_t nv = vars_.size();
  radix_.assign(nv, 1);
  size_t dense = 1;
  for (size_t v = 0; v < nv; ++v) {
    radix_[v] = dense;
    dense *= static_cast<size_t>(caps_[v] + 1);
  }
  dense_to_compact_.assign(dense, -1);

  std::vector<int> alpha(nv, 0);
  for (size_t code = 0; code < dense; ++code) {
    size_t rest = code;
    int deg = 0;
    for (size_t v = 0; v < nv; ++v) {
      alpha[v] = static_cast<int>(rest % static_cast<size_t>(caps_[v] + 1));
      rest /= static_cast<size_t>(caps_[v] + 1);
      deg += alpha[v];
    }
    if (total_cap_ >= 0 && deg > total_cap_) continue;
    dense_to_compact_[code] = static_cast<long>(indices_.size());
    indices_.push_back(alpha);
    max_degree_ = std::max(max_degree_, deg);
  }

  shift_up_.assign(nv, std::vector<long>(indices_.size(), -1));
  for (size_t k = 0; k < indices_.size(); ++k) {
    for (size_t v = 0; v < nv; ++v) {
      std::vector<int> beta = indices_[k];
      beta[v] += 1;
      shift_up_[v][k] = find(beta);
    }
  }

  for (size_t a = 0; a < indices_.size(); ++a) {
    for (size_t b = 0; b < indices_.size(); ++b) {
      std::vector<int> s(nv);
      for (size_t v = 0; v < nv; ++v) s[v] = indices_[a][v] + indices_[b][v];
      long out = find(s);
      if (out >= 0)
        triples_.push_back({static_cast<unsigned>(a), static_cast<unsigned>(b),
                            static_cast<unsigned>(out)});
    }
  }
}

std::shared_ptr<const JetSpace> JetSpace::make(std::vector<std::string> vars, int cap, int total_cap) {
  std::vector<int> caps(vars.size(), cap);
  return std::make_shared<const JetSpace>(std::move(vars), std::move(caps), total_cap);
}

std::shared_ptr<const JetSpace> JetSpace::make_total(std::vector<std::string> vars, int total_degree) {
  return make(std::move(vars), total_degree, total_degree);
}

int JetSpace::var_index(const std::string& name) const {
  for (size_t v = 0; v < vars_.size(); ++v)
    if (vars_[v] == name) return static_cast<int>(v);
  return -1;
}

long JetSpace::find(const std::vector<int>& alpha) const {
  if (alpha.size() != vars_.size()) return -1;
  size_t code = 0;
  int deg = 0;
  for (size_t v = 0; v < vars_.size(); ++v) {
    if (alpha[v] < 0 || alpha[v] > caps_[v]) return -1;
    code += radix_[v] * static_cast<size_t>(alpha[v]);
    deg += alpha[v];
  }
  if (total_cap_ >= 0 && deg > total_cap_) return -1;
  return dense_to_compact_[code];
}

long JetSpace::shifted(size_t k, size_t var, int delta) const {
  if (delta == 1) return shift_up_[var][k];
  std::vector<int> beta = indices_[k];
  beta[var] += delta;
  return find(beta);
}

// ---------------------------------------------------------------- Jet

Jet::Jet(JetSpacePtr space, cplx constant) : space_(std::move(space)) {
  c_.assign(space_->size(), cplx(0.0));
  c_[0] = constant;
}

Jet Jet::variable(JetSpacePtr space, size_t var, cplx value) {
  Jet j(space, value);
  std::vector<int> e(space->nvars(), 0);
  e[var] = 1;
  long k = space->find(e);
  if (k >= 0) j.c_[static_cast<size_t>(k)] = 1.0;
  return j;
}

Jet Jet::variable(JetSpacePtr space, const std::string& var, cplx value) {
  int v = space->var_index(var);
  if (v < 0) throw Error(ErrorKind::InvalidArgument, "jet space has no variable '" + var + "'");
  return variable(std::move(space), static_cast<size_t>(v), value);
}

cplx Jet::coeff(const std::vector<int>& alpha) const {
  long k = space_->find(alpha);
  return k < 0 ? cplx(0.0) : c_[static_cast<size_t>(k)];
}

cplx Jet::partial(const std::vector<int>& alpha) const {
  double fact = 1.0;
  for (int a : alpha)
    for (int m = 2; m <= a; ++m) fact *= m;
  return coeff(alpha) * fact;
}

cplx Jet::d(size_t v) const {
  std::vector<int> a(space_->nvars(), 0);
  a[v] = 1;
  return partial(a);
}

cplx Jet::d(size_t v, size_t w) const {
  std::vector<int> a(space_->nvars(), 0);
  a[v] += 1;
  a[w] += 1;
  return partial(a);
}

Jet Jet::derivative(size_t var) const {
  Jet r(space_, 0.0);
  for (size_t k = 0; k < c_.size(); ++k) {
    long up = space_->shifted(k, var, 1);
    if (up >= 0) {
      double m = space_->multi_index(static_cast<size_t>(up))[var];
      r.c_[k] = m * c_[static_cast<size_t>(up)];
    }
  }
  return r;
}

bool Jet::is_constant() const {
  for (size_t k = 1; k < c_.size(); ++k)
    if (c_[k] != cplx(0.0)) return false;
  return true;
}

Jet& Jet::operator+=(const Jet& o) {
  for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.space_, 0.0);
  const auto& A = a.c_;
  const auto& B = b.c_;
  auto& R = r.c_;
  for (const auto& t : a.space_->triples()) {
    const cplx& x = A[t.a];
    if (x == cplx(0.0)) continue;
    R[t.out] += x * B[t.b];
  }
  return r;
}

Jet operator+(Jet a, cplx s) {
  a.c_[0] += s;
  return a;
}

Jet operator-(Jet a, cplx s) {
  a.c_[0] -= s;
  return a;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  for (auto& x : r.c_) x = -x;
  return r;
}

Jet Jet::compose(const std::vector<cplx>& d) const {
  Jet h = *this;
  h.c_[0] = 0.0;
  const int K = std::min<int>(space_->max_degree(), static_cast<int>(d.size()) - 1);
  Jet r(space_, d[static_cast<size_t>(K)]);
  for (int k = K - 1; k >= 0; --k) {
    r = r * h;
    r.c_[0] += d[static_cast<size_t>(k)];
  }
  return r;
}

namespace {

std::vector<cplx> reciprocal_series(cplx a0, int K) {
  std::vector<cplx> d(static_cast<size_t>(K) + 1);
  cplx inv = 1.0 / a0;
  cplx p = inv;
  for (int k = 0; k <= K; ++k) {
    d[static_cast<size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * p;
    p *= inv;
  }
  return d;
}

}  // namespace

Jet reciprocal(const Jet& a) {
  if (a.value() == cplx(0.0))
    throw Error(ErrorKind::SingularEvaluation, "singular evaluation (division by zero) in jet");
  return a.compose(reciprocal_series(a.value(), a.space()->max_degree()));
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet hf_div(const Jet& a, const Jet& b, const Node* n) {
  if (b.value() == cplx(0.0)) throw_singular(n, "division by zero");
  return a * b.compose(reciprocal_series(b.value(), b.space()->max_degree()));
}

Jet hf_ln(const Jet& a, const Node* n) {
  cplx a0 = a.value();
  if (a0 == cplx(0.0)) throw_singular(n, "logarithm at zero");
  const int K = a.space()->max_degree();
  std::vector<cplx> d(static_cast<size_t>(K) + 1);
  d[0] = std::log(a0);
  cplx p = 1.0 / a0;
  for (int k = 1; k <= K; ++k) {
    d[static_cast<size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(k);
    p /= a0;
  }
  return a.compose(d);
}

Jet hf_sqrt(const Jet& a, const Node* n) {
  cplx a0 = a.value();
  const int K = a.space()->max_degree();
  if (a0 == cplx(0.0)) {
    if (K > 0 && !a.is_constant()) throw_singular(n, "square root at branch point");
    return Jet(a.space(), 0.0);
  }
  std::vector<cplx> d(static_cast<size_t>(K) + 1);
  cplx s = std::sqrt(a0);
  double binom = 1.0;  // binom(1/2, k)
  cplx p = s;          // a0^{1/2 - k}
  for (int k = 0; k <= K; ++k) {
    d[static_cast<size_t>(k)] = binom * p;
    binom *= (0.5 - k) / (k + 1.0);
    p /= a0;
  }
  return a.compose(d);
}

Jet hf_powi(const Jet& a, int e, const Node* n) {
  if (e < 0 && a.value() == cplx(0.0)) throw_singular(n, "negative power of zero");
  Jet base = e < 0 ? a.compose(reciprocal_series(a.value(), a.space()->max_degree())) : a;
  Jet r(a.space(), 1.0);
  for (unsigned k = static_cast<unsigned>(e < 0 ? -e : e); k; k >>= 1) {
    if (k & 1U) r = r * base;
    if (k > 1) base = base * base;
  }
  return r;
}

Jet jet_of(const Expr& e, const std::unordered_map<std::string, Jet>& bindings,
           const JetSpacePtr& space, const std::map<std::string, cplx>& constants) {
  std::unordered_map<std::string, Jet> all = bindings;
  for (const auto& [name, value] : constants)
    if (!all.count(name)) all.emplace(name, Jet(space, value));
  return evaluate_as<Jet>(e, all, [&space](cplx c) { return Jet(space, c); });
}

Jet jet_at(const Expr& e, const JetSpacePtr& space, const std::map<std::string, cplx>& point) {
  std::unordered_map<std::string, Jet> b;
  for (size_t v = 0; v < space->nvars(); ++v) {
    const auto& name = space->vars()[v];
    auto it = point.find(name);
    if (it == point.end())
      throw Error(ErrorKind::UnboundVariable, "unbound variable '" + name + "'");
    b.emplace(name, Jet::variable(space, v, it->second));
  }
  return jet_of(e, b, space, point);
}

cplx jet_eval(const Expr& f, const std::map<std::string, cplx>& point,
              const std::map<std::string, int>& order, int truncation) {
  std::vector<std::string> vars;
  std::vector<int> caps;
  std::vector<int> alpha;
  for (const auto& [name, count] : order) {
    if (count < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
    if (count > truncation)
      throw Error(ErrorKind::InvalidArgument,
                  "derivative order for '" + name + "' exceeds truncation " + std::to_string(truncation));
    if (count == 0) continue;
    vars.push_back(name);
    caps.push_back(count);
    alpha.push_back(count);
  }
  auto space = std::make_shared<const JetSpace>(vars, caps);
  return jet_at(f, space, point).partial(alpha);
}

}  // namespace hforge
