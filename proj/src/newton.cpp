#include "hforge/newton.hpp"

#include <cmath>
#include <unordered_map>

#include "hforge/linalg.hpp"

namespace hforge {

namespace {

double norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

std::vector<cplx> residual(const std::vector<Expr>& eqs, std::map<std::string, cplx>& at) {
  std::vector<cplx> r;
  r.reserve(eqs.size());
  for (const auto& e : eqs) r.push_back(e.evaluate(at));
  return r;
}

}  // namespace

std::vector<cplx> newton_solve(const std::vector<Expr>& equations,
                               const std::vector<std::string>& unknowns,
                               const std::map<std::string, cplx>& fixed,
                               const std::vector<cplx>& seed, const NewtonOptions& opts) {
  const size_t n = unknowns.size();
  if (equations.size() != n || seed.size() != n)
    throw Error(ErrorKind::InvalidArgument, "Newton: equation/unknown/seed count mismatch");
  Matrix<Expr> jac(n, std::vector<Expr>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) jac[i][j] = equations[i].diff(unknowns[j]);

  std::map<std::string, cplx> at = fixed;
  std::vector<cplx> u = seed;
  auto load = [&](const std::vector<cplx>& v) {
    for (size_t j = 0; j < n; ++j) at[unknowns[j]] = v[j];
  };
  load(u);
  std::vector<cplx> r = residual(equations, at);
  for (int it = 0; it < opts.max_iter; ++it) {
    Matrix<cplx> J = filled<cplx>(n, n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) J[i][j] = jac[i][j].evaluate(at);
    Matrix<cplx> Jinv = inverse<cplx>(J, 0.0, 1.0, opts.degenerate);
    std::vector<cplx> step = mat_vec<cplx>(Jinv, r, 0.0);
    double r0 = norm(r);
    double t = 1.0;
    std::vector<cplx> trial(n);
    std::vector<cplx> rt;
    for (int half = 0; half < 30; ++half) {
      for (size_t j = 0; j < n; ++j) trial[j] = u[j] - t * step[j];
      load(trial);
      try {
        rt = residual(equations, at);
        if (norm(rt) <= r0 || r0 == 0.0) break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularEvaluation) throw;
      }
      t *= 0.5;
    }
    if (rt.size() != n) throw Error(opts.failure, std::string(to_string(opts.failure)) + ": singular step");
    double du = t * norm(step);
    u = trial;
    r = rt;
    if (du <= opts.rel_tol * (1.0 + norm(u)) || norm(r) == 0.0) {
      // final Jacobian check at the root
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) J[i][j] = jac[i][j].evaluate(at);
      inverse<cplx>(J, 0.0, 1.0, opts.degenerate);
      return u;
    }
  }
  throw Error(opts.failure, std::string(to_string(opts.failure)) + ": no convergence in " +
                                std::to_string(opts.max_iter) + " iterations");
}

std::vector<Jet> implicit_jets(const std::vector<Expr>& equations,
                               const std::vector<std::string>& unknowns,
                               const JetSpacePtr& space, const std::map<std::string, cplx>& fixed,
                               const std::vector<cplx>& root, ErrorKind degenerate) {
  const size_t n = unknowns.size();
  std::map<std::string, cplx> at = fixed;
  for (size_t j = 0; j < n; ++j) at[unknowns[j]] = root[j];
  Matrix<cplx> J = filled<cplx>(n, n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) J[i][j] = equations[i].diff(unknowns[j]).evaluate(at);
  Matrix<cplx> Jinv = inverse<cplx>(J, 0.0, 1.0, degenerate);

  std::unordered_map<std::string, Jet> bind;
  for (size_t v = 0; v < space->nvars(); ++v) {
    const auto& name = space->vars()[v];
    auto it = fixed.find(name);
    if (it == fixed.end()) throw Error(ErrorKind::UnboundVariable, "unbound variable '" + name + "'");
    bind.emplace(name, Jet::variable(space, v, it->second));
  }
  std::vector<Jet> u;
  for (size_t j = 0; j < n; ++j) u.emplace_back(space, root[j]);
  for (int it = 0; it <= space->max_degree() + 1; ++it) {
    for (size_t j = 0; j < n; ++j) bind.insert_or_assign(unknowns[j], u[j]);
    std::vector<Jet> e;
    for (const auto& eq : equations) e.push_back(jet_of(eq, bind, space, fixed));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) u[i] -= Jinv[i][j] * e[j];
  }
  return u;
}

}  // namespace hforge
