#pragma once

#include <map>
#include <string>
#include <vector>

#include "hforge/errors.hpp"
#include "hforge/expr.hpp"
#include "hforge/jet.hpp"

namespace hforge {

struct NewtonOptions {
  double rel_tol = 1e-12;
  int max_iter = 50;
  ErrorKind failure = ErrorKind::LegendreFailed;
  ErrorKind degenerate = ErrorKind::DegenerateLegendre;
};

// Damped Newton for equations(unknowns; fixed) = 0 starting from seed.
std::vector<cplx> newton_solve(const std::vector<Expr>& equations,
                               const std::vector<std::string>& unknowns,
                               const std::map<std::string, cplx>& fixed,
                               const std::vector<cplx>& seed, const NewtonOptions& opts = {});

// Taylor expansion of the implicit solution u(params) of equations = 0 about
// a known root. The parameters are the variables of `space`; every other
// variable comes from `fixed`.
std::vector<Jet> implicit_jets(const std::vector<Expr>& equations,
                               const std::vector<std::string>& unknowns,
                               const JetSpacePtr& space, const std::map<std::string, cplx>& fixed,
                               const std::vector<cplx>& root,
                               ErrorKind degenerate = ErrorKind::DegenerateLegendre);

}  // namespace hforge
