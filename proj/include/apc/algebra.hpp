#ifndef APC_ALGEBRA_HPP
#define APC_ALGEBRA_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "apc/errors.hpp"
#include "apc/pattern.hpp"

namespace apc {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

/// Constant magnetic field as an antisymmetric d x d matrix; for d=2 this
/// is the single strength theta with B = [[0, theta], [-theta, 0]].
struct MagneticField {
  Eigen::MatrixXd B;

  MagneticField() = default;
  explicit MagneticField(Eigen::MatrixXd mat) : B(std::move(mat)) {
    if (B.rows() != B.cols())
      throw InvalidParameter("MagneticField: matrix must be square");
    if ((B + B.transpose()).cwiseAbs().maxCoeff() != 0.0)
      throw InvalidParameter("MagneticField: matrix must be antisymmetric");
  }

  static MagneticField zero(int d) {
    return MagneticField(Eigen::MatrixXd::Zero(d, d));
  }

  static MagneticField uniform2d(double theta) {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, theta, -theta, 0.0;
    return MagneticField(m);
  }

  int dim() const { return static_cast<int>(B.rows()); }

  double theta() const {
    if (dim() != 2) throw DimensionMismatch("MagneticField::theta: d != 2");
    return B(0, 1);
  }
};

/// Flux through the triangle <0, x, y>:
///   Gamma<0,x,y> = 1/2 sum_{j<k} B^{jk} (x_j y_k - x_k y_j).
inline double triangle_flux(const MagneticField& field, const double* x,
                            const double* y) {
  const int d = field.dim();
  double s = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      s += field.B(j, k) * (x[j] * y[k] - x[k] * y[j]);
  return 0.5 * s;
}

inline double triangle_flux(const MagneticField& field,
                            const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
  return triangle_flux(field, x.data(), y.data());
}

/// Magnetic 2-cocycle attached to composing (L,x) with (L-x,y):
///   sigma = exp(-i Gamma<0, x, x+y>).
inline Complex cocycle(const MagneticField& field, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y) {
  const Eigen::VectorXd xy = x + y;
  const double gamma = triangle_flux(field, x.data(), xy.data());
  return std::exp(Complex(0.0, -gamma));
}

/// Dense operator on l^2(pattern) in the canonical site basis.
struct OperatorMatrix {
  std::shared_ptr<const DelonePattern> pattern;
  MatrixXcd M;

  int size() const { return static_cast<int>(M.rows()); }
};

inline Complex trace_per_volume(const OperatorMatrix& op) {
  return op.M.trace() / static_cast<double>(op.size());
}

inline Complex trace_per_volume(const MatrixXcd& m) {
  return m.trace() / static_cast<double>(m.rows());
}

/// Finite-range operator kernel, the finite-volume avatar of an element of
/// C_c(G): a map from ordered site pairs (x,y) to complex amplitudes.
/// k(x,y) stands for f(L-x, y-x).
class CovariantKernel {
 public:
  CovariantKernel() = default;
  CovariantKernel(std::shared_ptr<const DelonePattern> pattern, double range,
                  bool hermitian = false)
      : pattern_(std::move(pattern)), range_(range), hermitian_(hermitian) {}

  const std::shared_ptr<const DelonePattern>& pattern() const {
    return pattern_;
  }
  double range() const { return range_; }
  bool hermitian_flag() const { return hermitian_; }
  void set_hermitian_flag(bool h) { hermitian_ = h; }

  void set(int i, int j, Complex v) {
    if (v == Complex(0.0, 0.0)) {
      entries_.erase(key(i, j));
    } else {
      entries_[key(i, j)] = v;
    }
  }

  Complex at(int i, int j) const {
    auto it = entries_.find(key(i, j));
    return it == entries_.end() ? Complex(0.0, 0.0) : it->second;
  }

  std::size_t nonzeros() const { return entries_.size(); }

  /// Ordered iteration (deterministic reduction order).
  template <typename F>
  void for_each(F&& f) const {
    const auto n = static_cast<std::uint64_t>(pattern_->size());
    for (const auto& [k, v] : entries_)
      f(static_cast<int>(k / n), static_cast<int>(k % n), v);
  }

  bool hermitian_consistent(double tol = 0.0) const {
    bool ok = true;
    for_each([&](int i, int j, Complex v) {
      if (std::abs(v - std::conj(at(j, i))) > tol) ok = false;
    });
    return ok;
  }

  double max_abs_difference(const CovariantKernel& other) const {
    double m = 0.0;
    for_each([&](int i, int j, Complex v) {
      m = std::max(m, std::abs(v - other.at(i, j)));
    });
    other.for_each([&](int i, int j, Complex v) {
      m = std::max(m, std::abs(v - at(i, j)));
    });
    return m;
  }

 private:
  std::uint64_t key(int i, int j) const {
    return static_cast<std::uint64_t>(i) *
               static_cast<std::uint64_t>(pattern_->size()) +
           static_cast<std::uint64_t>(j);
  }

  std::shared_ptr<const DelonePattern> pattern_;
  double range_ = 0.0;
  bool hermitian_ = false;
  std::map<std::uint64_t, Complex> entries_;
};

/// k(x,y) = delta_{x,y}; the unit of the twisted convolution algebra.
inline CovariantKernel unit_kernel(
    std::shared_ptr<const DelonePattern> pattern) {
  CovariantKernel u(pattern, 0.0, true);
  for (int i = 0; i < pattern->size(); ++i) u.set(i, i, Complex(1.0, 0.0));
  return u;
}

inline void require_same_pattern(const CovariantKernel& a,
                                 const CovariantKernel& b) {
  if (a.pattern() != b.pattern())
    throw PatternMismatch("kernels live on different patterns");
}

/// Twisted convolution at finite volume:
///   k(x,z) = sum_y k1(x,y) k2(y,z) exp(-i Gamma<0, y-x, z-x>)
/// with minimal-image displacements.
inline CovariantKernel convolve(const CovariantKernel& f1,
                                const CovariantKernel& f2,
                                const MagneticField& field) {
  require_same_pattern(f1, f2);
  const DelonePattern& pat = *f1.pattern();
  const TorusGeometry& geom = pat.geometry;

  // row index for f2
  std::vector<std::vector<std::pair<int, Complex>>> rows(pat.size());
  f2.for_each([&](int y, int z, Complex v) { rows[y].emplace_back(z, v); });

  CovariantKernel out(f1.pattern(), f1.range() + f2.range(), false);
  std::map<std::uint64_t, Complex> acc;  // deterministic order
  std::vector<double> dyx(geom.d), dzx(geom.d);
  f1.for_each([&](int x, int y, Complex v1) {
    torus_displacement(pat.point(y), pat.point(x), geom, dyx.data());
    for (const auto& [z, v2] : rows[y]) {
      torus_displacement(pat.point(z), pat.point(x), geom, dzx.data());
      const double gamma = triangle_flux(field, dyx.data(), dzx.data());
      const Complex phase = std::exp(Complex(0.0, -gamma));
      acc[static_cast<std::uint64_t>(x) * pat.size() + z] += v1 * v2 * phase;
    }
  });
  for (const auto& [k, v] : acc)
    out.set(static_cast<int>(k / pat.size()), static_cast<int>(k % pat.size()),
            v);
  return out;
}

/// k*(x,y) = conj(k(y,x)).
inline CovariantKernel involution(const CovariantKernel& f) {
  CovariantKernel out(f.pattern(), f.range(), f.hermitian_flag());
  f.for_each([&](int i, int j, Complex v) { out.set(j, i, std::conj(v)); });
  return out;
}

/// Canonical representation on l^2(pattern):
///   M[x,y] = exp(-i Gamma<0, y-x, -x>) k(x,y),
/// displacement y-x minimal-image, -x from the fundamental-domain
/// representative of x.
inline OperatorMatrix represent(const CovariantKernel& f,
                                const MagneticField& field) {
  const DelonePattern& pat = *f.pattern();
  if (field.dim() != pat.geometry.d)
    throw PatternMismatch("represent: field dimension != pattern dimension");
  OperatorMatrix op;
  op.pattern = f.pattern();
  op.M = MatrixXcd::Zero(pat.size(), pat.size());
  std::vector<double> dyx(pat.geometry.d), mx(pat.geometry.d);
  f.for_each([&](int x, int y, Complex v) {
    torus_displacement(pat.point(y), pat.point(x), pat.geometry, dyx.data());
    for (int j = 0; j < pat.geometry.d; ++j) mx[j] = -pat.points(x, j);
    const double gamma = triangle_flux(field, dyx.data(), mx.data());
    op.M(x, y) = std::exp(Complex(0.0, -gamma)) * v;
  });
  return op;
}

/// (d_j f)(x,y) = [torus_displacement(y,x)]_j * k(x,y) -- the finite-volume
/// derivation along axis j (1-based).
inline CovariantKernel derivation(const CovariantKernel& f, int axis) {
  const DelonePattern& pat = *f.pattern();
  if (axis < 1 || axis > pat.geometry.d)
    throw InvalidParameter("derivation: axis out of range");
  CovariantKernel out(f.pattern(), f.range(), false);
  std::vector<double> dyx(pat.geometry.d);
  f.for_each([&](int i, int j, Complex v) {
    torus_displacement(pat.point(j), pat.point(i), pat.geometry, dyx.data());
    out.set(i, j, dyx[axis - 1] * v);
  });
  return out;
}

/// Magnetic translation unitary T_a for a pattern point a (by index):
/// maps l^2(L) to l^2(L - a) with both patterns ordered identically, so
/// the matrix is phase-diagonal,
///   T_a[i,i] = exp(+i Gamma<0, -x-a, x>),  x = wrap(p_i - a);
/// this orientation makes the cross terms in T pi(f) T* cancel against the
/// representation phase at quantized flux.
inline OperatorMatrix magnetic_translation(const DelonePattern& pattern,
                                           int point_index,
                                           const MagneticField& field) {
  if (point_index < 0 || point_index >= pattern.size())
    throw NotALatticePoint("magnetic_translation: index out of range");
  const TorusGeometry& geom = pattern.geometry;
  OperatorMatrix op;
  op.pattern = std::make_shared<DelonePattern>(
      translate_pattern(pattern, pattern.point_vec(point_index)));
  op.M = MatrixXcd::Zero(pattern.size(), pattern.size());
  std::vector<double> x(geom.d), mxa(geom.d);
  for (int i = 0; i < pattern.size(); ++i) {
    for (int j = 0; j < geom.d; ++j) {
      x[j] = op.pattern->points(i, j);  // wrapped p_i - a
      mxa[j] = -x[j] - pattern.points(point_index, j);
    }
    const double gamma = triangle_flux(field, mxa.data(), x.data());
    op.M(i, i) = std::exp(Complex(0.0, gamma));
  }
  return op;
}

/// Sobolev norm ||f||_{r,p} = sum_{|alpha|<=r} T(|d^alpha f|^p)^{1/p},
/// with |f| computed through singular values of the represented matrix.
inline double sobolev_norm(const CovariantKernel& f, int r, int p,
                           const MagneticField& field) {
  if (r < 0 || p < 1) throw InvalidParameter("sobolev_norm: need r>=0, p>=1");
  const int d = f.pattern()->geometry.d;
  const double n = f.pattern()->size();

  double total = 0.0;
  // enumerate multi-indices alpha with |alpha| <= r
  std::vector<int> alpha(d, 0);
  const auto term = [&](const std::vector<int>& a) {
    CovariantKernel g = f;
    for (int j = 0; j < d; ++j)
      for (int rep = 0; rep < a[j]; ++rep) g = derivation(g, j + 1);
    const OperatorMatrix m = represent(g, field);
    Eigen::JacobiSVD<MatrixXcd> svd(m.M);
    double s = 0.0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      s += std::pow(svd.singularValues()[i], p);
    total += std::pow(s / n, 1.0 / p);
  };
  // iterate all alpha in N^d with sum <= r (lexicographic)
  while (true) {
    int sum = 0;
    for (int j = 0; j < d; ++j) sum += alpha[j];
    if (sum <= r) term(alpha);
    int j = d - 1;
    while (j >= 0) {
      if (++alpha[j] <= r) {
        int s2 = 0;
        for (int t = 0; t < d; ++t) s2 += alpha[t];
        if (s2 <= r) break;
      }
      alpha[j--] = 0;
    }
    if (j < 0) break;
  }
  return total;
}

}  // namespace apc

#endif  // APC_ALGEBRA_HPP
