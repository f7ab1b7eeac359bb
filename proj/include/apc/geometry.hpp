#ifndef APC_GEOMETRY_HPP
#define APC_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>

#include "apc/errors.hpp"

namespace apc {

/// Flat d-torus of equal circumferences L.
struct TorusGeometry {
  int d = 2;
  double L = 0.0;

  TorusGeometry() = default;
  TorusGeometry(int dim, double side) : d(dim), L(side) {
    if (d < 1) throw InvalidParameter("TorusGeometry: d must be >= 1");
    if (!(L > 0.0)) throw InvalidParameter("TorusGeometry: L must be > 0");
  }

  double volume() const { return std::pow(L, d); }
};

/// Minimal-image wrap of a single coordinate difference.
/// delta - L*int(2*delta/L), with int() truncating toward zero. Ties at
/// |delta| = L/2 follow the truncation sign: +L/2 maps to -L/2 and
/// -L/2 maps to +L/2. Never branched on a tolerance.
inline double wrap_component(double delta, double L) {
  return delta - L * std::trunc(2.0 * delta / L);
}

/// Minimal-image displacement x - y on the torus, written into out[0..d).
inline void torus_displacement(const double* x, const double* y,
                               const TorusGeometry& geom, double* out) {
  for (int j = 0; j < geom.d; ++j) out[j] = wrap_component(x[j] - y[j], geom.L);
}

inline Eigen::VectorXd torus_displacement(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y,
                                          const TorusGeometry& geom) {
  Eigen::VectorXd out(geom.d);
  torus_displacement(x.data(), y.data(), geom, out.data());
  return out;
}

inline double torus_distance(const double* x, const double* y,
                             const TorusGeometry& geom) {
  double s = 0.0;
  for (int j = 0; j < geom.d; ++j) {
    const double c = wrap_component(x[j] - y[j], geom.L);
    s += c * c;
  }
  return std::sqrt(s);
}

inline double torus_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const TorusGeometry& geom) {
  return torus_distance(x.data(), y.data(), geom);
}

/// Wraps a coordinate into the fundamental domain [0,L).
inline double wrap_into_domain(double c, double L) {
  double w = std::fmod(c, L);
  if (w < 0.0) w += L;
  return w;
}

}  // namespace apc

#endif  // APC_GEOMETRY_HPP
