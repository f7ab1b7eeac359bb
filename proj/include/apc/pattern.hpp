#ifndef APC_PATTERN_HPP
#define APC_PATTERN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apc/errors.hpp"
#include "apc/geometry.hpp"
#include "apc/rng.hpp"

namespace apc {

enum class PatternKind { amorphous, periodic, custom };

inline const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::amorphous: return "amorphous";
    case PatternKind::periodic: return "periodic";
    default: return "custom";
  }
}

inline PatternKind pattern_kind_from_string(const std::string& s) {
  if (s == "amorphous") return PatternKind::amorphous;
  if (s == "periodic") return PatternKind::periodic;
  if (s == "custom") return PatternKind::custom;
  throw InvalidParameter("unknown pattern kind: " + s);
}

/// Finite point set on the flat d-torus. Immutable after construction.
/// Row-major so that points.row(i).data() is the contiguous coordinate
/// tuple of site i.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DelonePattern {
  TorusGeometry geometry;
  PointMatrix points;  // N x d, rows in [0,L)^d
  double d_min = 0.0;
  std::optional<double> d_max;
  std::uint64_t seed = 0;
  PatternKind kind = PatternKind::custom;

  int size() const { return static_cast<int>(points.rows()); }
  const double* point(int i) const { return points.row(i).data(); }
  Eigen::VectorXd point_vec(int i) const { return points.row(i).transpose(); }

  double distance(int i, int j) const {
    return torus_distance(point(i), point(j), geometry);
  }

  /// Minimum over distinct pairs of the torus distance. O(N^2).
  double min_pair_distance() const {
    const int n = size();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) best = std::min(best, distance(i, j));
    return best;
  }
};

// points are stored row-major per point only through .row(); keep the
// matrix itself row-major so point(i) is contiguous.
namespace detail {
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

/// Hard-core rejection sampler on the torus. Proposals are uniform in
/// [0,L)^d; a proposal is rejected when it comes within d_min of an
/// accepted point. When d_max is given the finished pattern is checked
/// for d_max-relative density; under strict_dmax a failing pattern is
/// discarded and the sampler re-runs with the seed advanced by one.
DelonePattern generate_pattern(const TorusGeometry& geometry, double d_min,
                               std::optional<double> d_max, std::uint64_t seed,
                               std::uint64_t max_attempts = 0,
                               bool strict_dmax = false);

/// The integer lattice {0,...,L-1}^d as an oracle pattern.
DelonePattern periodic_lattice(const TorusGeometry& geometry);

/// Returns the pattern L - a (points shifted by -a, wrapped into [0,L)^d),
/// preserving point order. If a is a pattern point the result contains the
/// origin, i.e. it is a transversal representative.
DelonePattern translate_pattern(const DelonePattern& pattern,
                                const Eigen::VectorXd& a);

struct DeloneReport {
  bool uniform_discrete = false;
  bool relatively_dense = false;
  /// Pairs violating r-uniform discreteness (torus distance < 2r).
  std::vector<std::pair<int, int>> pair_witnesses;
  /// Grid centers whose nearest pattern point is farther than R.
  std::vector<Eigen::VectorXd> center_witnesses;
  /// Largest nearest-point distance seen over the center grid.
  double farthest_point_estimate = 0.0;
};

/// Checks the two Delone conditions. Uniform discreteness is exact
/// (a radius-r ball holds two points iff some pair is closer than 2r);
/// relative density is estimated on a center grid of spacing <= R/8.
DeloneReport verify_delone(const DelonePattern& pattern, double r, double R);

/// Ensemble of independent patterns: sample(i) is a pure function of
/// (base_seed, i) and samples with distinct indices are independent.
struct PatternEnsemble {
  TorusGeometry geometry;
  double d_min = 0.0;
  std::optional<double> d_max;
  std::uint64_t base_seed = 0;
  int sample_count = 1;

  std::uint64_t seed_for(int index) const {
    return derive_seed(base_seed, static_cast<std::uint64_t>(index));
  }

  DelonePattern sample(int index) const {
    return generate_pattern(geometry, d_min, d_max, seed_for(index));
  }
};

// --- implementation ---

inline DelonePattern generate_pattern(const TorusGeometry& geometry,
                                      double d_min,
                                      std::optional<double> d_max,
                                      std::uint64_t seed,
                                      std::uint64_t max_attempts,
                                      bool strict_dmax) {
  if (d_min < 0.0 || d_min > 1.0)
    throw InvalidParameter(
        "generate_pattern: d_min must lie in [0,1] at unit density");
  if (d_max && !(*d_max > d_min))
    throw InvalidParameter("generate_pattern: d_max must exceed d_min");
  const double n_real = std::pow(geometry.L, geometry.d);
  const auto n_points = static_cast<std::uint64_t>(std::llround(n_real));
  if (std::abs(n_real - static_cast<double>(n_points)) > 1e-9)
    throw InvalidParameter("generate_pattern: L^d must be an integer");
  // d_min=0.83 at unit density sits just below the hard-disk saturation
  // density, so acceptance is slow near the end; the budget is generous and
  // neighbor queries go through a periodic cell grid to keep it cheap.
  if (max_attempts == 0) max_attempts = 100000 * n_points;

  // Cell grid: cell edge >= d_min, so candidates lie in the 3^d neighborhood.
  int cells_per_side = 1;
  if (d_min > 0.0)
    cells_per_side =
        std::max(1, static_cast<int>(std::floor(geometry.L / d_min)));
  std::int64_t n_cells = 1;
  for (int j = 0; j < geometry.d; ++j) n_cells *= cells_per_side;
  const auto cell_of = [&](const double* p) {
    std::int64_t c = 0;
    for (int j = 0; j < geometry.d; ++j) {
      int cj = static_cast<int>(p[j] / geometry.L * cells_per_side);
      cj = std::min(cj, cells_per_side - 1);
      c = c * cells_per_side + cj;
    }
    return c;
  };

  // Individual realizations can jam below N points (the jamming density
  // fluctuates around the target), so budget exhaustion restarts with an
  // advanced seed instead of failing outright.
  const int restarts_budget = 64;
  std::uint64_t run_seed = seed;
  for (int restart = 0; restart <= restarts_budget; ++restart, ++run_seed) {
    Xoshiro256pp rng(run_seed);
    PointMatrix pts(n_points, geometry.d);
    std::vector<std::vector<int>> grid(n_cells);
    std::uint64_t accepted = 0;
    std::uint64_t attempts = 0;
    std::vector<double> proposal(geometry.d);
    std::vector<int> cell_coord(geometry.d);
    bool jammed = false;
    while (accepted < n_points) {
      if (attempts >= max_attempts) {
        jammed = true;
        break;
      }
      ++attempts;
      for (int j = 0; j < geometry.d; ++j)
        proposal[j] = rng.uniform(geometry.L);
      bool ok = true;
      if (d_min > 0.0) {
        for (int j = 0; j < geometry.d; ++j) {
          cell_coord[j] = static_cast<int>(proposal[j] / geometry.L *
                                           cells_per_side);
          cell_coord[j] = std::min(cell_coord[j], cells_per_side - 1);
        }
        const int span = cells_per_side >= 3 ? 1 : cells_per_side / 2;
        const auto visit_dim = [&](auto&& self, int dim,
                                   std::int64_t acc) -> bool {
          if (dim == geometry.d) {
            for (int i : grid[acc])
              if (torus_distance(proposal.data(), pts.row(i).data(),
                                 geometry) < d_min)
                return false;
            return true;
          }
          for (int off = -span; off <= span; ++off) {
            const int cj =
                (cell_coord[dim] + off + cells_per_side) % cells_per_side;
            if (!self(self, dim + 1, acc * cells_per_side + cj)) return false;
          }
          return true;
        };
        if (cells_per_side < 3) {
          // too few cells to localize: brute force
          for (std::uint64_t i = 0; i < accepted; ++i)
            if (torus_distance(proposal.data(), pts.row(i).data(), geometry) <
                d_min) {
              ok = false;
              break;
            }
        } else {
          ok = visit_dim(visit_dim, 0, 0);
        }
      }
      if (!ok) continue;
      for (int j = 0; j < geometry.d; ++j) pts(accepted, j) = proposal[j];
      if (d_min > 0.0 && cells_per_side >= 3)
        grid[cell_of(pts.row(accepted).data())].push_back(
            static_cast<int>(accepted));
      ++accepted;
    }
    if (jammed) continue;  // advance seed, re-run

    DelonePattern pattern;
    pattern.geometry = geometry;
    pattern.points = std::move(pts);
    pattern.d_min = d_min;
    pattern.d_max = d_max;
    pattern.seed = seed;
    pattern.kind = PatternKind::amorphous;

    if (d_max && strict_dmax) {
      DeloneReport rep = verify_delone(pattern, d_min > 0 ? d_min / 2 : 1e-6,
                                       *d_max);
      if (!rep.relatively_dense) continue;  // advance seed, re-run
    }
    return pattern;
  }
  throw AttemptsExhausted(
      "generate_pattern: restart budget exhausted; d_min too large for unit "
      "density");
}

inline DelonePattern periodic_lattice(const TorusGeometry& geometry) {
  const double l_round = std::round(geometry.L);
  if (!(geometry.L > 0.0) || std::abs(geometry.L - l_round) > 1e-12)
    throw InvalidParameter("periodic_lattice: L must be a positive integer");
  const auto side = static_cast<std::int64_t>(l_round);
  std::int64_t n = 1;
  for (int j = 0; j < geometry.d; ++j) n *= side;

  DelonePattern pattern;
  pattern.geometry = geometry;
  pattern.points.resize(n, geometry.d);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t rest = idx;
    for (int j = geometry.d - 1; j >= 0; --j) {
      pattern.points(idx, j) = static_cast<double>(rest % side);
      rest /= side;
    }
  }
  pattern.d_min = 1.0;
  pattern.seed = 0;
  pattern.kind = PatternKind::periodic;
  return pattern;
}

inline DelonePattern translate_pattern(const DelonePattern& pattern,
                                       const Eigen::VectorXd& a) {
  if (a.size() != pattern.geometry.d)
    throw DimensionMismatch("translate_pattern: vector dimension mismatch");
  DelonePattern out = pattern;
  for (int i = 0; i < pattern.size(); ++i)
    for (int j = 0; j < pattern.geometry.d; ++j)
      out.points(i, j) =
          wrap_into_domain(pattern.points(i, j) - a[j], pattern.geometry.L);
  out.kind = PatternKind::custom;
  return out;
}

inline DeloneReport verify_delone(const DelonePattern& pattern, double r,
                                  double R) {
  if (!(r > 0.0) || !(R > 0.0))
    throw InvalidParameter("verify_delone: r and R must be positive");
  if (r >= R) throw InvalidParameter("verify_delone: require r < R");

  DeloneReport report;
  const int n = pattern.size();

  report.uniform_discrete = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (pattern.distance(i, j) < 2.0 * r) {
        report.uniform_discrete = false;
        report.pair_witnesses.emplace_back(i, j);
      }
    }
  }

  // Center grid of spacing <= R/8 per axis (coarse farthest-point probe).
  const TorusGeometry& geom = pattern.geometry;
  const int cells = std::max(1, static_cast<int>(std::ceil(geom.L / (R / 8))));
  const double h = geom.L / cells;
  report.relatively_dense = true;
  std::vector<double> center(geom.d, 0.0);
  std::vector<int> index(geom.d, 0);
  const std::int64_t total = [&] {
    std::int64_t t = 1;
    for (int j = 0; j < geom.d; ++j) t *= cells;
    return t;
  }();
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rest = flat;
    for (int j = geom.d - 1; j >= 0; --j) {
      index[j] = static_cast<int>(rest % cells);
      rest /= cells;
    }
    for (int j = 0; j < geom.d; ++j) center[j] = (index[j] + 0.5) * h;
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      nearest = std::min(
          nearest, torus_distance(center.data(), pattern.point(i), geom));
    report.farthest_point_estimate =
        std::max(report.farthest_point_estimate, nearest);
    if (nearest > R) {
      report.relatively_dense = false;
      report.center_witnesses.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(center.data(), geom.d));
    }
  }
  return report;
}

}  // namespace apc

#endif  // APC_PATTERN_HPP
