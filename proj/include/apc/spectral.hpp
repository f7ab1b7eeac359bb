#ifndef APC_SPECTRAL_HPP
#define APC_SPECTRAL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <lapacke.h>
#include <vector>

#include "apc/algebra.hpp"
#include "apc/errors.hpp"
#include "apc/hamiltonian.hpp"

namespace apc {

struct SpectralData {
  Eigen::VectorXd eigenvalues;  // ascending
  MatrixXcd eigenvectors;       // orthonormal columns, empty if not requested
  std::shared_ptr<const DelonePattern> pattern;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

namespace detail {

/// LAPACK divide-and-conquer Hermitian eigensolver (zheevd). Eigen's
/// SelfAdjointEigenSolver is several times slower at the N=3600 scale the
/// sweeps need.
inline void zheevd_inplace(MatrixXcd& a, Eigen::VectorXd& w,
                           bool vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0)
    throw ConvergenceFailure("zheevd failed with info=" +
                             std::to_string(info));
}

}  // namespace detail

inline double hermiticity_residual(const MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Full spectral decomposition of a Hermitian operator.
inline SpectralData eigensolve(const OperatorMatrix& h,
                               bool with_vectors = true) {
  if (hermiticity_residual(h.M) > 1e-12)
    throw NotHermitian("eigensolve: matrix is not Hermitian to 1e-12");
  SpectralData out;
  out.pattern = h.pattern;
  MatrixXcd a = h.M;
  detail::zheevd_inplace(a, out.eigenvalues, with_vectors);
  if (with_vectors) out.eigenvectors = std::move(a);
  return out;
}

struct FermiProjector {
  OperatorMatrix P;
  double E_F = 0.0;
  int rank = 0;
  bool on_eigenvalue = false;  // |E_k - E_F| < 1e-12 for some k
};

/// P = sum_{E_k <= E_F} v_k v_k^dagger (interval closed on the right).
inline FermiProjector fermi_projector(const SpectralData& spec, double E_F) {
  if (spec.eigenvectors.size() == 0)
    throw InvalidParameter("fermi_projector: eigenvectors required");
  FermiProjector out;
  out.E_F = E_F;
  int rank = 0;
  for (int k = 0; k < spec.size(); ++k) {
    if (std::abs(spec.eigenvalues[k] - E_F) < 1e-12) out.on_eigenvalue = true;
    if (spec.eigenvalues[k] <= E_F) rank = k + 1;
  }
  out.rank = rank;
  out.P.pattern = spec.pattern;
  const auto occ = spec.eigenvectors.leftCols(rank);
  out.P.M.noalias() = occ * occ.adjoint();
  return out;
}

struct GapEntry {
  double low = 0.0;   // upper edge of the band below the gap
  double high = 0.0;  // lower edge of the band above
  double width = 0.0;
  int rank_below = 0;  // number of states below the gap
};

/// The k widest spacings of a sorted spectrum within [window_lo, window_hi].
inline std::vector<GapEntry> largest_gaps(const Eigen::VectorXd& eigenvalues,
                                          int k,
                                          double window_lo = -1e300,
                                          double window_hi = 1e300) {
  std::vector<GapEntry> gaps;
  for (int i = 0; i + 1 < eigenvalues.size(); ++i) {
    const double lo = eigenvalues[i], hi = eigenvalues[i + 1];
    if (lo < window_lo || hi > window_hi) continue;
    gaps.push_back({lo, hi, hi - lo, i + 1});
  }
  std::sort(gaps.begin(), gaps.end(),
            [](const GapEntry& a, const GapEntry& b) {
              return a.width > b.width;
            });
  if (static_cast<int>(gaps.size()) > k) gaps.resize(k);
  return gaps;
}

struct ButterflyColumn {
  int n = 0;
  double theta = 0.0;
  Eigen::VectorXd eigenvalues;
  std::vector<GapEntry> gaps;
};

struct ButterflyTable {
  std::vector<ButterflyColumn> columns;
};

/// One eigenvalue-only solve per flux index; per-column gap report with the
/// top_gaps widest spacings.
inline ButterflyTable spectrum_butterfly(
    std::shared_ptr<const DelonePattern> pattern, const HoppingRule& rule,
    const std::vector<int>& flux_indices, int top_gaps = 4) {
  ButterflyTable table;
  for (int n : flux_indices) {
    const FluxIndex flux{n};
    const OperatorMatrix h = build_hamiltonian(pattern, rule, flux);
    SpectralData spec = eigensolve(h, /*with_vectors=*/false);
    ButterflyColumn col;
    col.n = n;
    col.theta = flux.theta(pattern->geometry.L);
    col.eigenvalues = std::move(spec.eigenvalues);
    col.gaps = largest_gaps(col.eigenvalues, top_gaps);
    table.columns.push_back(std::move(col));
  }
  return table;
}

struct Histogram {
  std::vector<double> edges;   // bins+1 edges
  std::vector<double> counts;  // normalized to total mass 1
};

/// Normalized density of states over [min,max] of the spectrum.
inline Histogram dos(const SpectralData& spec, int bins) {
  if (bins < 1) throw InvalidParameter("dos: bins must be >= 1");
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0.0);
  if (spec.size() == 0) return h;
  const double lo = spec.eigenvalues.minCoeff();
  double hi = spec.eigenvalues.maxCoeff();
  if (hi == lo) hi = lo + 1.0;
  for (int b = 0; b <= bins; ++b)
    h.edges[b] = lo + (hi - lo) * b / static_cast<double>(bins);
  for (int k = 0; k < spec.size(); ++k) {
    int b = static_cast<int>((spec.eigenvalues[k] - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    h.counts[b] += 1.0;
  }
  for (double& c : h.counts) c /= spec.size();
  return h;
}

}  // namespace apc

#endif  // APC_SPECTRAL_HPP
