#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "hforge/errors.hpp"
#include "hforge/expr.hpp"
#include "hforge/jet.hpp"

namespace hforge {

struct ContourSpec {
  cplx center{0.0, 0.0};
  double radius = 1.0;
  int nodes = 512;
  bool normalize = true;  // divide by 2*pi*i

  void validate() const;
  cplx node(int j) const;
};

inline bool all_finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
inline bool all_finite(const Jet& j) {
  for (const auto& c : j.coeffs())
    if (!all_finite(c)) return false;
  return true;
}

[[noreturn]] void throw_pole_on_contour(const ContourSpec& spec, int node);

// Trapezoidal rule on the circle: sum_j f(l_j) (l_j - c) * (2 pi i / N), or
// that divided by 2 pi i when normalized. T is cplx or Jet.
template <class T, class F>
T contour_sum(F&& integrand, const ContourSpec& spec, T zero) {
  spec.validate();
  T acc = zero;
  for (int j = 0; j < spec.nodes; ++j) {
    cplx l = spec.node(j);
    T v;
    try {
      v = integrand(l);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SingularEvaluation) throw_pole_on_contour(spec, j);
      throw;
    }
    if (!all_finite(v)) throw_pole_on_contour(spec, j);
    acc += v * (l - spec.center);
  }
  cplx scale = 1.0 / static_cast<double>(spec.nodes);
  if (!spec.normalize) scale *= cplx(0.0, 2.0 * std::numbers::pi);
  return acc * scale;
}

cplx contour_integral(const std::function<cplx(cplx)>& integrand, const ContourSpec& spec = {});

}  // namespace hforge
