#include "hforge/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "hforge/ale.hpp"
#include "hforge/errors.hpp"
#include "hforge/hierarchy.hpp"
#include "hforge/legendre.hpp"
#include "hforge/plebanski.hpp"
#include "hforge/twistor.hpp"

#ifndef HFORGE_VERSION
#define HFORGE_VERSION "0.0.0"
#endif

namespace hforge {

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownTask : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void unbound(const std::string& what) { throw Error(ErrorKind::UnboundVariable, what); }

using Point = std::map<std::string, cplx>;

struct PointResult {
  std::vector<Cell> values;
  double residual = 0.0;
};

// A grid task evaluates `eval` at every grid point; a direct task builds its
// rows itself.
struct TaskSpec {
  std::vector<std::string> outputs;
  std::function<PointResult(const Point&)> eval;
  std::function<Table()> direct;
  std::function<void(const std::set<std::string>& bound)> check_bound;
};

cplx json_complex(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_complex(v.get<std::string>());
    } catch (const std::invalid_argument&) {
      throw ConfigError(what + ": cannot read '" + v.get<std::string>() + "' as a complex number");
    }
  }
  throw ConfigError(what + ": expected a number or an \"a+bi\" string");
}

struct Context {
  const Json& cfg;
  Json params;
  Point constants;
  std::vector<std::string> grid_vars;
  std::vector<std::vector<cplx>> grid_values;

  explicit Context(const Json& c) : cfg(c) {
    params = c.contains("params") ? c.at("params") : Json::object();
    if (!params.is_object()) throw ConfigError("'params' must be an object");
    if (c.contains("constants")) {
      if (!c.at("constants").is_object()) throw ConfigError("'constants' must be an object");
      for (const auto& [k, v] : c.at("constants").items()) constants[k] = json_complex(v, "constant '" + k + "'");
    }
    if (c.contains("grid")) {
      if (!c.at("grid").is_object()) throw ConfigError("'grid' must be an object of variable -> values");
      for (const auto& [k, v] : c.at("grid").items()) {
        grid_vars.push_back(k);
        grid_values.push_back(read_axis(k, v));
      }
    }
  }

  static std::vector<cplx> read_axis(const std::string& name, const Json& v) {
    const std::string what = "grid variable '" + name + "'";
    std::vector<cplx> out;
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(json_complex(e, what));
    } else if (v.is_object() && v.contains("linspace")) {
      const Json& l = v.at("linspace");
      if (!l.is_array() || l.size() != 3 || !l[2].is_number_integer() || l[2].get<long long>() < 1)
        throw ConfigError(what + ": linspace needs [start, stop, count >= 1]");
      cplx a = json_complex(l[0], what), b = json_complex(l[1], what);
      const long long n = l[2].get<long long>();
      for (long long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * (static_cast<double>(i) / (n - 1)));
    } else {
      out.push_back(json_complex(v, what));
    }
    if (out.empty()) throw ConfigError(what + " has no values");
    return out;
  }

  std::set<std::string> bound() const {
    std::set<std::string> b(grid_vars.begin(), grid_vars.end());
    for (const auto& [k, v] : constants) b.insert(k);
    return b;
  }

  bool has(const std::string& key) const { return params.contains(key); }

  int get_int(const std::string& key, std::optional<int> fallback = std::nullopt) const {
    if (!params.contains(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing parameter '" + key + "'");
    }
    if (!params.at(key).is_number_integer()) throw ConfigError("parameter '" + key + "' must be an integer");
    return params.at(key).get<int>();
  }

  double get_double(const std::string& key, double fallback) const {
    if (!params.contains(key)) return fallback;
    if (!params.at(key).is_number()) throw ConfigError("parameter '" + key + "' must be a number");
    return params.at(key).get<double>();
  }

  std::optional<cplx> get_complex(const std::string& key) const {
    if (!params.contains(key)) return std::nullopt;
    return json_complex(params.at(key), "parameter '" + key + "'");
  }

  std::string get_string(const std::string& key) const {
    if (!params.contains(key) || !params.at(key).is_string())
      throw ConfigError("parameter '" + key + "' must be a string");
    return params.at(key).get<std::string>();
  }

  ContourSpec contour() const {
    ContourSpec c;
    c.radius = get_double("radius", 1.0);
    c.nodes = get_int("nodes", 512);
    if (auto z = get_complex("center")) c.center = *z;
    if (!(c.radius > 0.0) || c.nodes < 1) throw ConfigError("contour needs radius > 0 and nodes >= 1");
    return c;
  }

  // Parses expression `name`, binds the constants, and checks that the
  // remaining variables lie in `allowed`.
  Expr expr(const std::string& name, const std::set<std::string>& allowed, bool required = true) const {
    auto list = expr_list(name, allowed, required);
    if (list.empty()) return Expr();
    if (list.size() != 1) throw ConfigError("expression '" + name + "' must be a single string");
    return list[0];
  }

  std::vector<Expr> expr_list(const std::string& name, const std::set<std::string>& allowed, bool required = true) const {
    const Json* src = nullptr;
    if (cfg.contains("expressions") && cfg.at("expressions").contains(name)) src = &cfg.at("expressions").at(name);
    if (!src) {
      if (required) throw ConfigError("missing expression '" + name + "'");
      return {};
    }
    std::vector<std::string> texts;
    if (src->is_string()) {
      texts.push_back(src->get<std::string>());
    } else if (src->is_array()) {
      for (const auto& e : *src) {
        if (!e.is_string()) throw ConfigError("expression '" + name + "' entries must be strings");
        texts.push_back(e.get<std::string>());
      }
    } else {
      throw ConfigError("expression '" + name + "' must be a string or a list of strings");
    }
    std::map<std::string, Expr> repl;
    for (const auto& [k, v] : constants)
      if (!allowed.count(k)) repl[k] = Expr(v);
    std::vector<Expr> out;
    for (const auto& t : texts) {
      Expr e;
      try {
        e = Expr::parse(t);
      } catch (const ParseError& pe) {
        throw ParseError("expression '" + name + "': " + pe.what(), pe.line(), pe.column());
      }
      e = e.substitute(repl);
      for (const auto& v : e.variables())
        if (!allowed.count(v)) unbound("expression '" + name + "' uses '" + v + "', which is not bound by the grid or a constant");
      out.push_back(e);
    }
    return out;
  }
};

std::set<std::string> set_of(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void require_coords(const std::vector<std::string>& coords, const std::set<std::string>& bound) {
  for (const auto& c : coords)
    if (!bound.count(c)) unbound("coordinate '" + c + "' is not bound by the grid or a constant");
}

Vec4 pleb_point(const Point& p) { return {p.at("w"), p.at("z"), p.at("x"), p.at("y")}; }

std::vector<std::string> t_names(int k) { return section_vars(k); }

std::vector<cplx> t_point(const Point& p, int k) {
  std::vector<cplx> t;
  for (const auto& n : t_names(k)) t.push_back(p.at(n));
  return t;
}

// Largest component of the 4-form s ^ s.
double wedge_max(const Matrix<cplx>& s) {
  const size_t n = s.size();
  double m = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k)
        for (size_t l = k + 1; l < n; ++l)
          m = std::max(m, std::abs(s[i][j] * s[k][l] - s[i][k] * s[j][l] + s[i][l] * s[j][k]));
  return m;
}

double wave_max_of_jet(const Jet& j, int k) {
  double m = 0.0;
  for (size_t a = 0; a + 1 < static_cast<size_t>(k); ++a)
    for (size_t b = a + 1; b < static_cast<size_t>(k); ++b) m = std::max(m, std::abs(j.d(a + 1, b) - j.d(a, b + 1)));
  return m;
}

// ------------------------------------------------------------ tasks

const std::set<std::string> kPleb{"w", "z", "x", "y"};
const std::set<std::string> kTwistor{"Q", "lambda"};

TaskSpec task_check_heavenly(const Context& c) {
  Expr theta = c.expr("theta", kPleb);
  TaskSpec t;
  t.outputs = {"heavenly_residual"};
  t.check_bound = [](const auto& b) { require_coords({"w", "z", "x", "y"}, b); };
  t.eval = [theta](const Point& p) {
    cplx r = heavenly_residual(theta, pleb_point(p));
    return PointResult{{r}, std::abs(r)};
  };
  return t;
}

TaskSpec task_curvature(const Context& c) {
  Expr theta = c.expr("theta", kPleb);
  TaskSpec t;
  t.outputs = {"max_ricci", "max_sd_weyl"};
  t.check_bound = [](const auto& b) { require_coords({"w", "z", "x", "y"}, b); };
  t.eval = [theta](const Point& p) {
    auto r = curvature_report(theta, pleb_point(p));
    return PointResult{{r.max_ricci, r.max_weyl}, std::max(r.max_ricci, r.max_weyl)};
  };
  return t;
}

TaskSpec task_hierarchy_check(const Context& c) {
  const int n = c.get_int("n");
  if (n < 1) throw ConfigError("parameter 'n' must be >= 1");
  auto vars = hierarchy_vars(n);
  HierarchyPotential h{n, c.expr("theta", set_of(vars))};
  TaskSpec t;
  t.outputs = {"max_hierarchy_residual"};
  t.check_bound = [vars](const auto& b) { require_coords(vars, b); };
  t.eval = [h](const Point& p) {
    double m = 0.0;
    for (int A = 0; A < 2; ++A)
      for (int B = 0; B < 2; ++B)
        for (int i = 1; i <= h.n; ++i)
          for (int j = 1; j <= h.n; ++j) m = std::max(m, std::abs(hierarchy_residual(h, A, i, B, j, p)));
    return PointResult{{m}, m};
  };
  return t;
}

Table task_recursion_chain(const Context& c) {
  Expr theta = c.expr("theta", kPleb);
  Expr start = c.expr("start", kPleb);
  const int steps = c.get_int("steps", 2), degree = c.get_int("ansatz_degree", 3);
  if (steps < 1 || degree < 1) throw ConfigError("'steps' and 'ansatz_degree' must be >= 1");
  auto chain = recursion_chain(theta, start, monomials({"w", "z", "x", "y"}, degree), steps);
  const std::vector<Vec4> probes{{0.3, -0.2, 0.5, 0.7}, {-0.4, 0.6, 0.1, -0.3}, {0.8, 0.2, -0.6, 0.4}};
  Table tab;
  tab.columns = {"step", "expression", "wave_residual"};
  for (size_t s = 0; s < chain.size(); ++s) {
    double r = 0.0;
    for (const auto& q : probes) r = std::max(r, std::abs(wave_operator(theta, chain[s], q)));
    tab.rows.push_back({static_cast<long long>(s), chain[s].to_string(), r});
    tab.residuals.push_back(r);
  }
  return tab;
}

TaskSpec task_gh_build(const Context& c) {
  Expr F = c.expr("F", {"w", "y", "p", "z"});
  const double tol = c.get_double("monopole_tolerance", 1e-10);
  TaskSpec t;
  t.outputs = {"psi", "wave", "monopole_max", "max_ricci", "max_sd_weyl", "non_monopole"};
  t.check_bound = [](const auto& b) { require_coords({"w", "y", "p", "z"}, b); };
  t.eval = [F, tol](const Point& p) {
    Vec4 q{p.at("w"), p.at("y"), p.at("p"), p.at("z")};
    auto rep = gh_metric(F, q, tol);
    auto cr = curvature_from_jets(gh_metric_field(F), q, gh_sd_forms(F, q));
    double r = std::max({std::abs(rep.wave), rep.monopole_max, cr.max_ricci, cr.max_weyl});
    return PointResult{{rep.psi, rep.wave, rep.monopole_max, cr.max_ricci, cr.max_weyl,
                        static_cast<long long>(rep.non_monopole)},
                       r};
  };
  return t;
}

TaskSpec task_legendre(const Context& c) {
  Expr theta = c.expr("theta", {"w", "x", "y"});
  auto seed = c.get_complex("seed_x");
  if (!seed) throw ConfigError("legendre needs the Newton seed 'seed_x'");
  TaskSpec t;
  t.outputs = {"F", "x", "identity_residual"};
  t.check_bound = [](const auto& b) { require_coords({"w", "y", "p"}, b); };
  t.eval = [theta, s = *seed](const Point& p) {
    auto r = legendre_gh(theta, p.at("w"), p.at("y"), p.at("p"), s);
    return PointResult{{r.F, r.x, r.identity_residual}, r.identity_residual};
  };
  return t;
}

TaskSpec task_f_from_g(const Context& c) {
  const int k = c.get_int("k");
  TwistorClass G{k, c.expr("G", kTwistor), 0, c.contour(), {}};
  validate(G);
  TaskSpec t;
  t.outputs = {"F", "wave_max"};
  t.check_bound = [k](const auto& b) { require_coords(t_names(k), b); };
  t.eval = [G, space = section_space(k, 2)](const Point& p) {
    auto tp = t_point(p, G.k);
    Jet F = f_from_g_jet(G, space, tp);
    double w = wave_max_of_jet(F, G.k);
    return PointResult{{F.value(), w}, w};
  };
  return t;
}

// psi-field, constraints and sigma read the section either from t0..tk or,
// for k = 2, from GH coordinates (p, y, w).
struct SectionReader {
  int k;
  bool gh = false;
  std::vector<cplx> operator()(const Point& p) const {
    return gh ? gh_section(p.at("w"), p.at("y"), p.at("p")) : t_point(p, k);
  }
};

SectionReader section_reader(int k, const std::set<std::string>& bound) {
  auto t = t_names(k);
  bool all_t = std::all_of(t.begin(), t.end(), [&](const auto& n) { return bound.count(n) > 0; });
  if (all_t) return {k, false};
  if (k == 2 && bound.count("p") && bound.count("y") && bound.count("w")) return {k, true};
  require_coords(t, bound);
  return {k, false};
}

TwistorClass f_class(const Context& c, int k) {
  TwistorClass f{k, c.expr("f", kTwistor), 2 - k, c.contour(), {}};
  validate(f);
  return f;
}

TaskSpec task_psi_field(const Context& c) {
  const int k = c.get_int("k");
  TwistorClass f = f_class(c, k);
  std::vector<int> idx(static_cast<size_t>(std::max(0, 2 * k - 4)), 1);
  if (c.has("indices")) {
    const Json& j = c.params.at("indices");
    if (!j.is_array()) throw ConfigError("'indices' must be a list of 0/1");
    idx.clear();
    for (const auto& e : j) {
      if (!e.is_number_integer()) throw ConfigError("'indices' must be a list of 0/1");
      idx.push_back(e.get<int>());
    }
  }
  const auto bound = c.bound();
  SectionReader read = section_reader(k, bound);
  auto refs = c.expr_list("reference", bound, false);
  const bool has_ref = !refs.empty();
  Expr ref = has_ref ? refs.front() : Expr();
  TaskSpec t;
  t.outputs = {"psi"};
  if (has_ref) t.outputs.push_back("reference");
  t.outputs.push_back("wave_max");
  t.eval = [f, idx, read, ref, has_ref, space = section_space(k, 2)](const Point& p) {
    auto tp = read(p);
    Jet j = psi_field_jet(f, space, tp, idx);
    PointResult out;
    out.values.push_back(j.value());
    out.residual = wave_max_of_jet(j, f.k);
    if (has_ref) {
      cplx r = ref.evaluate(p);
      out.values.push_back(r);
      out.residual = std::max(out.residual, std::abs(j.value() - r));
    }
    out.values.push_back(wave_max_of_jet(j, f.k));
    return out;
  };
  return t;
}

TaskSpec task_constraints(const Context& c) {
  const int k = c.get_int("k");
  TwistorClass f = f_class(c, k);
  SectionReader read = section_reader(k, c.bound());
  TaskSpec t;
  for (int m = 0; m <= k - 4; ++m) t.outputs.push_back("constraint_" + std::to_string(m));
  t.eval = [f, read](const Point& p) {
    PointResult out;
    for (cplx v : constraint_fields(f, read(p))) {
      out.values.push_back(v);
      out.residual = std::max(out.residual, std::abs(v));
    }
    return out;
  };
  return t;
}

TaskSpec task_sigma(const Context& c) {
  const int k = c.get_int("k");
  TwistorClass f = f_class(c, k);
  SectionReader read = section_reader(k, c.bound());
  std::vector<cplx> lambdas{0.3, cplx(-0.2, 0.25)};
  if (c.has("lambdas")) {
    lambdas.clear();
    for (const auto& e : c.params.at("lambdas")) lambdas.push_back(json_complex(e, "'lambdas'"));
  }
  const double ctol = c.get_double("constraint_tolerance", 1e-9);
  TaskSpec t;
  t.outputs = {"wedge_max", "quadratic_residual"};
  t.eval = [f, read, lambdas, ctol](const Point& p) {
    auto tp = read(p);
    double w = 0.0;
    for (cplx l : lambdas) w = std::max(w, wedge_max(sigma_from_psi(f, tp, l, ctol)));
    double q = sigma_components(f, tp, ctol).quadratic_residual;
    return PointResult{{w, q}, std::max(w, q)};
  };
  return t;
}

Table task_ale_degrees(const Context& c) {
  std::vector<std::string> families;
  if (c.has("families")) {
    for (const auto& e : c.params.at("families")) families.push_back(e.get<std::string>());
  } else {
    families.push_back(c.get_string("family"));
  }
  std::vector<int> ks;
  if (c.has("k") && c.params.at("k").is_array()) {
    for (const auto& e : c.params.at("k")) ks.push_back(e.get<int>());
  } else {
    ks.push_back(c.get_int("k", 0));
  }
  Table tab;
  tab.columns = {"family", "k", "p", "q", "r", "s", "chern", "parameter_count"};
  for (const auto& name : families) {
    ALEKind kind = parse_ale_kind(name);
    const bool e_series = kind != ALEKind::A && kind != ALEKind::D;
    for (int k : (e_series ? std::vector<int>{0} : ks)) {
      auto d = ale_degrees(kind, k);
      long long chern = d.chern();
      tab.rows.push_back({name, static_cast<long long>(k), static_cast<long long>(d.p), static_cast<long long>(d.q),
                          static_cast<long long>(d.r), static_cast<long long>(d.s), chern,
                          static_cast<long long>(parameter_count(kind, k))});
      tab.residuals.push_back(static_cast<double>(std::llabs(chern - 2)));
    }
  }
  return tab;
}

TaskSpec task_ale_patch(const Context& c) {
  ALEKind kind = parse_ale_kind(c.get_string("family"));
  TaskSpec t;
  t.check_bound = [](const auto& b) { require_coords({"z", "lambda"}, b); };
  if (kind == ALEKind::A) {
    auto roots = c.expr_list("roots", {"lambda"});
    Expr G = ak_g_expr(roots);
    t.outputs = {"f", "G", "dG_dz_residual", "path_residual"};
    t.eval = [roots, G](const Point& p) {
      const cplx z = p.at("z"), l = p.at("lambda");
      auto v = ak_patching(roots, z, l);
      Jet j = jet_at(G.substitute({{"lambda", Expr(l)}}), JetSpace::make_total({"z"}, 1), {{"z", z}});
      double dg = std::abs(j.d(0) - v.f);
      cplx k = (ak_patch_integral(roots, z, l) - v.f) / cplx(0.0, 2.0 * std::numbers::pi);
      double path = std::abs(k - std::round(k.real()));
      return PointResult{{v.f, v.G, dg, path}, std::max(dg, path)};
    };
  } else if (kind == ALEKind::D) {
    auto roots = c.expr_list("roots", {"lambda"});
    t.outputs = {"f", "patch_integral", "half_ratio_residual"};
    t.eval = [roots](const Point& p) {
      const cplx z = p.at("z"), l = p.at("lambda");
      cplx f = dk_patching(roots, z, l), in = dk_patch_integral(roots, z, l);
      double r = std::abs(in - 0.5 * f);
      return PointResult{{f, in, r}, r};
    };
  } else {
    ALEFamily fam = make_ale_family(kind, 0, c.expr_list("a", {"lambda"}));
    EllipticOptions o;
    o.y0_hint = c.get_complex("y0_hint");
    o.y1_hint = c.get_complex("y1_hint");
    o.nodes = c.get_int("quadrature_nodes", 64);
    t.outputs = {"f", "y0", "y1", "convergence"};
    t.eval = [fam, o](const Point& p) {
      auto r = ek_patching(fam, p.at("z"), p.at("lambda"), o);
      EllipticOptions o2 = o;
      o2.nodes = 2 * o.nodes;
      double conv = std::abs(ek_patching(fam, p.at("z"), p.at("lambda"), o2).f - r.f);
      return PointResult{{r.f, r.y0, r.y1, conv}, conv};
    };
  }
  return t;
}

TaskSpec task_ale_potential(const Context& c) {
  auto roots = c.expr_list("roots", {"lambda"});
  TaskSpec t;
  t.outputs = {"psi", "wave_residual"};
  t.check_bound = [](const auto& b) { require_coords({"p", "y", "w"}, b); };
  t.eval = [roots, space = section_space(2, 2)](const Point& p) {
    const cplx pp = p.at("p"), y = p.at("y"), w = p.at("w");
    cplx psi = ak_gh_potential(roots, pp, y, w);
    Jet j = psi_field_jet(ak_f_class(roots), space, gh_section(w, y, pp), {});
    double r = std::abs(j.d(1, 1) - j.d(0, 2));
    return PointResult{{psi, r}, r};
  };
  return t;
}

using Builder = std::function<TaskSpec(const Context&)>;

const std::map<std::string, Builder>& grid_tasks() {
  static const std::map<std::string, Builder> m{
      {"check-heavenly", task_check_heavenly}, {"hierarchy-check", task_hierarchy_check},
      {"gh-build", task_gh_build},             {"legendre", task_legendre},
      {"f-from-g", task_f_from_g},             {"psi-field", task_psi_field},
      {"constraints", task_constraints},       {"sigma", task_sigma},
      {"ale-patch", task_ale_patch},           {"ale-potential", task_ale_potential},
      {"curvature", task_curvature},
  };
  return m;
}

const std::map<std::string, std::function<Table(const Context&)>>& direct_tasks() {
  static const std::map<std::string, std::function<Table(const Context&)>> m{
      {"recursion-chain", task_recursion_chain}, {"ale-degrees", task_ale_degrees}};
  return m;
}

// ------------------------------------------------------------ grid runner

Table run_grid(const Context& c, const TaskSpec& spec) {
  const size_t nv = c.grid_vars.size();
  size_t total = 1;
  for (const auto& v : c.grid_values) total *= v.size();

  Table tab;
  tab.columns = c.grid_vars;
  tab.columns.insert(tab.columns.end(), spec.outputs.begin(), spec.outputs.end());
  tab.rows.resize(total);
  tab.residuals.resize(total);

  auto point_values = [&](size_t idx) {
    // lexicographic: the first grid variable varies slowest
    std::vector<cplx> vals(nv);
    for (size_t v = nv; v-- > 0;) {
      vals[v] = c.grid_values[v][idx % c.grid_values[v].size()];
      idx /= c.grid_values[v].size();
    }
    return vals;
  };

  std::vector<std::exception_ptr> errors(total);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t idx = next++; idx < total; idx = next++) {
      Point p = c.constants;
      std::vector<Cell> row;
      auto vals = point_values(idx);
      for (size_t v = 0; v < nv; ++v) {
        p[c.grid_vars[v]] = vals[v];
        row.emplace_back(vals[v]);
      }
      try {
        PointResult r = spec.eval(p);
        row.insert(row.end(), r.values.begin(), r.values.end());
        tab.rows[idx] = std::move(row);
        tab.residuals[idx] = r.residual;
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(worker_count(), static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  // report the first failing point in grid order, whatever thread hit it
  for (size_t i = 0; i < total; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "at grid point " << i << " (";
      auto vals = point_values(i);
      for (size_t v = 0; v < nv; ++v) os << (v ? ", " : "") << c.grid_vars[v] << " = " << format_complex(vals[v]);
      os << "): " << e.what();
      if (e.kind() == ErrorKind::Parse) throw;
      throw Error(e.kind(), os.str());
    }
  }
  return tab;
}

Json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, cplx>) return format_complex(v);
        else return v;
      },
      c);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IOError("failed writing '" + path.string() + "'");
}

}  // namespace

// ------------------------------------------------------------ public

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty complex number");
  auto number = [&](const std::string& part, bool imag) -> double {
    if (imag && (part.empty() || part == "+")) return 1.0;
    if (imag && part == "-") return -1.0;
    char* end = nullptr;
    double v = std::strtod(part.c_str(), &end);
    if (part.empty() || end != part.c_str() + part.size()) throw std::invalid_argument("bad number '" + part + "'");
    return v;
  };
  if (s.back() != 'i') return {number(s, false), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  size_t split = std::string::npos;
  for (size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string::npos) return {0.0, number(body, true)};
  return {number(body.substr(0, split), false), number(body.substr(split), true)};
}

std::string format_complex(cplx z) {
  char re[40], im[40];
  std::snprintf(re, sizeof re, "%.17g", z.real());
  std::snprintf(im, sizeof im, "%.17g", std::abs(z.imag()));
  return std::string(re) + (std::signbit(z.imag()) ? "-" : "+") + im + "i";
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, cplx>) {
          return format_complex(v);
        } else if constexpr (std::is_same_v<T, double>) {
          char b[40];
          std::snprintf(b, sizeof b, "%.17g", v);
          return b;
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      c);
}

std::string to_csv(const Table& t) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  std::ostringstream os;
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << field(t.columns[i]);
  os << ",residual\n";
  for (size_t r = 0; r < t.rows.size(); ++r) {
    for (size_t i = 0; i < t.rows[r].size(); ++i) os << (i ? "," : "") << field(format_cell(t.rows[r][i]));
    os << "," << format_cell(t.residuals[r]) << "\n";
  }
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string cur;
  bool quoted = false, any = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(cur);
      cur.clear();
    } else if (ch == '\n') {
      row.push_back(cur);
      out.push_back(row);
      row.clear();
      cur.clear();
      any = false;
    } else {
      cur += ch;
    }
  }
  if (any) {
    row.push_back(cur);
    out.push_back(row);
  }
  return out;
}

unsigned worker_count() {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HFORGE_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{
      "check-heavenly", "hierarchy-check", "recursion-chain", "gh-build",  "legendre",
      "f-from-g",       "psi-field",       "constraints",     "sigma",     "ale-degrees",
      "ale-patch",      "ale-potential",   "curvature"};
  return names;
}

RunResult run_config(const Json& config, const RunOptions& options) {
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!config.is_object()) throw ConfigError("config must be an object");
    if (!config.contains("task") || !config.at("task").is_string()) throw ConfigError("missing string field 'task'");
    const std::string task = config.at("task").get<std::string>();
    double tol = 1e-8;
    if (config.contains("tolerance")) {
      if (!config.at("tolerance").is_number()) throw ConfigError("'tolerance' must be a number");
      tol = config.at("tolerance").get<double>();
    }
    if (options.tolerance) tol = *options.tolerance;

    Context ctx(config);
    if (auto it = direct_tasks().find(task); it != direct_tasks().end()) {
      res.table = it->second(ctx);
    } else if (auto g = grid_tasks().find(task); g != grid_tasks().end()) {
      TaskSpec spec = g->second(ctx);
      if (ctx.grid_vars.empty()) throw ConfigError("task '" + task + "' needs a 'grid'");
      if (spec.check_bound) spec.check_bound(ctx.bound());
      res.table = run_grid(ctx, spec);
    } else {
      throw UnknownTask("unknown task '" + task + "'");
    }

    double worst = 0.0;
    bool finite = true;
    for (double r : res.table.residuals) {
      if (!std::isfinite(r)) finite = false;
      worst = std::max(worst, r);
    }
    const bool pass = finite && worst <= tol;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json rows = Json::array();
    for (size_t r = 0; r < res.table.rows.size(); ++r) {
      Json row = Json::object();
      for (size_t i = 0; i < res.table.columns.size(); ++i) row[res.table.columns[i]] = cell_json(res.table.rows[r][i]);
      row["residual"] = res.table.residuals[r];
      rows.push_back(row);
    }
    res.report = Json::object();
    res.report["task"] = task;
    res.report["columns"] = res.table.columns;
    res.report["rows"] = rows;
    res.report["summary"] = {{"points", res.table.rows.size()},
                             {"max_residual", worst},
                             {"tolerance", tol},
                             {"pass", pass},
                             {"runtime_seconds", secs},
                             {"threads", worker_count()}};
    res.report["provenance"] = {{"tool", "hforge"}, {"version", HFORGE_VERSION}, {"config", config}};

    std::optional<std::string> dir = options.out_dir;
    std::string csv_name = task + ".csv", report_name = "report.json";
    if (config.contains("output")) {
      const Json& o = config.at("output");
      if (!dir && o.contains("dir")) dir = o.at("dir").get<std::string>();
      if (o.contains("csv")) csv_name = o.at("csv").get<std::string>();
      if (o.contains("report")) report_name = o.at("report").get<std::string>();
    }
    if (dir) {
      std::error_code ec;
      std::filesystem::create_directories(*dir, ec);
      if (ec) throw IOError("cannot create output directory '" + *dir + "': " + ec.message());
      auto csv_path = std::filesystem::path(*dir) / csv_name, rep_path = std::filesystem::path(*dir) / report_name;
      write_file(csv_path, to_csv(res.table));
      write_file(rep_path, res.report.dump(2) + "\n");
      res.written = {csv_path.string(), rep_path.string()};
    }
    char line[200];
    std::snprintf(line, sizeof line, "%s: %zu rows, max residual %.3g, tolerance %.3g: %s", task.c_str(),
                  res.table.rows.size(), worst, tol, pass ? "PASS" : "FAIL");
    res.message = line;
    res.exit_code = pass ? kExitPass : kExitFail;
  } catch (const ParseError& e) {
    res.exit_code = kExitParse;
    // the parser message already carries line and column
    res.message = std::string("parse error: ") + e.what();
  } catch (const Error& e) {
    res.exit_code = e.kind() == ErrorKind::UnboundVariable ? kExitUnbound : kExitEval;
    res.message = std::string(e.kind() == ErrorKind::UnboundVariable ? "unbound variable: " : "evaluation error [") +
                  (e.kind() == ErrorKind::UnboundVariable ? "" : std::string(to_string(e.kind())) + "] ") + e.what();
  } catch (const UnknownTask& e) {
    res.exit_code = kExitUnknownTask;
    res.message = e.what();
  } catch (const IOError& e) {
    res.exit_code = kExitIO;
    res.message = std::string("I/O error: ") + e.what();
  } catch (const ConfigError& e) {
    res.exit_code = kExitConfig;
    res.message = std::string("config error: ") + e.what();
  } catch (const Json::exception& e) {
    res.exit_code = kExitConfig;
    res.message = std::string("config error: ") + e.what();
  }
  return res;
}

RunResult run_file(const std::string& path, const RunOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    RunResult r;
    r.exit_code = kExitIO;
    r.message = "I/O error: cannot read '" + path + "'";
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  Json cfg;
  try {
    cfg = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    RunResult r;
    r.exit_code = kExitConfig;
    r.message = std::string("config error: ") + e.what();
    return r;
  }
  return run_config(cfg, options);
}

}  // namespace hforge
