#include "hforge/contour.hpp"

#include <sstream>

namespace hforge {

void ContourSpec::validate() const {
  if (nodes < 16) throw Error(ErrorKind::InvalidArgument, "contour needs at least 16 nodes");
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "contour radius must be positive");
}

cplx ContourSpec::node(int j) const {
  double theta = 2.0 * std::numbers::pi * j / nodes;
  return center + radius * cplx(std::cos(theta), std::sin(theta));
}

void throw_pole_on_contour(const ContourSpec& spec, int node) {
  std::ostringstream os;
  os << "pole on contour: non-finite integrand at node " << node << " (lambda = " << spec.node(node)
     << "); try a different radius than " << spec.radius;
  throw Error(ErrorKind::PoleOnContour, os.str());
}

cplx contour_integral(const std::function<cplx(cplx)>& integrand, const ContourSpec& spec) {
  return contour_sum<cplx>(integrand, spec, cplx(0.0));
}

}  // namespace hforge
