#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <memory>

#include "apc/errors.hpp"
#include "apc/hamiltonian.hpp"
#include "apc/pattern.hpp"
#include "apc/spectral.hpp"

using namespace apc;
using Catch::Approx;

namespace {

std::shared_ptr<const DelonePattern> amorphous(double L, std::uint64_t seed) {
  return std::make_shared<DelonePattern>(
      generate_pattern({2, L}, 0.83, std::nullopt, seed));
}

OperatorMatrix from_matrix(std::shared_ptr<const DelonePattern> pat,
                           MatrixXcd m) {
  OperatorMatrix op;
  op.pattern = std::move(pat);
  op.M = std::move(m);
  return op;
}

}  // namespace

TEST_CASE("eigensolve reproduces a known 2x2 spectrum") {
  auto pat = std::make_shared<DelonePattern>(periodic_lattice({1, 2.0}));
  MatrixXcd m(2, 2);
  m << Complex(1.0, 0.0), Complex(0.0, -2.0),  //
      Complex(0.0, 2.0), Complex(1.0, 0.0);
  const SpectralData spec = eigensolve(from_matrix(pat, m));
  REQUIRE(spec.size() == 2);
  CHECK(spec.eigenvalues[0] == Approx(-1.0));  // 1 -+ |2i|
  CHECK(spec.eigenvalues[1] == Approx(3.0));
  // eigenvector residuals
  for (int k = 0; k < 2; ++k) {
    const auto v = spec.eigenvectors.col(k);
    CHECK((m * v - spec.eigenvalues[k] * v).norm() < 1e-12);
  }
}

TEST_CASE("eigensolve rejects non-Hermitian input") {
  auto pat = std::make_shared<DelonePattern>(periodic_lattice({1, 2.0}));
  MatrixXcd m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(eigensolve(from_matrix(pat, m)), NotHermitian);
}

TEST_CASE("eigenvalues ascend and eigenvectors are orthonormal") {
  auto pat = amorphous(6.0, 12);
  const OperatorMatrix h =
      build_hamiltonian(pat, HoppingRule{}, FluxIndex{1});
  const SpectralData spec = eigensolve(h);
  for (int k = 0; k + 1 < spec.size(); ++k)
    CHECK(spec.eigenvalues[k] <= spec.eigenvalues[k + 1]);
  const MatrixXcd gram =
      spec.eigenvectors.adjoint() * spec.eigenvectors;
  CHECK((gram - MatrixXcd::Identity(spec.size(), spec.size()))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("fermi_projector is an orthogonal projector of the right rank") {
  auto pat = amorphous(6.0, 14);
  const OperatorMatrix h =
      build_hamiltonian(pat, HoppingRule{}, FluxIndex{2});
  const SpectralData spec = eigensolve(h);
  const double ef = 0.5 * (spec.eigenvalues[10] + spec.eigenvalues[11]);
  const FermiProjector proj = fermi_projector(spec, ef);
  CHECK(proj.rank == 11);
  CHECK_FALSE(proj.on_eigenvalue);
  CHECK((proj.P.M * proj.P.M - proj.P.M).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(hermiticity_residual(proj.P.M) < 1e-13);
  CHECK(proj.P.M.trace().real() == Approx(11.0).epsilon(1e-12));

  // E_F exactly on an eigenvalue is flagged and included (closed interval)
  const FermiProjector edge = fermi_projector(spec, spec.eigenvalues[10]);
  CHECK(edge.on_eigenvalue);
  CHECK(edge.rank >= 11);

  // below and above the whole spectrum
  CHECK(fermi_projector(spec, spec.eigenvalues[0] - 1.0).rank == 0);
  CHECK(fermi_projector(spec, spec.eigenvalues[spec.size() - 1] + 1.0).rank ==
        spec.size());
}

TEST_CASE("fermi_projector requires eigenvectors") {
  auto pat = amorphous(5.0, 16);
  const SpectralData spec =
      eigensolve(build_hamiltonian(pat, HoppingRule{}, 0.0), false);
  CHECK_THROWS_AS(fermi_projector(spec, 0.0), InvalidParameter);
}

TEST_CASE("largest_gaps ranks spacings") {
  Eigen::VectorXd e(5);
  e << 0.0, 0.1, 0.7, 0.8, 2.0;
  const auto gaps = largest_gaps(e, 2);
  REQUIRE(gaps.size() == 2);
  CHECK(gaps[0].width == Approx(1.2));
  CHECK(gaps[0].low == Approx(0.8));
  CHECK(gaps[0].rank_below == 4);
  CHECK(gaps[1].width == Approx(0.6));
  CHECK(gaps[1].rank_below == 2);
  // window restriction drops the outer gap
  const auto inner = largest_gaps(e, 5, 0.0, 1.0);
  REQUIRE(!inner.empty());
  CHECK(inner[0].width == Approx(0.6));
}

TEST_CASE("spectrum_butterfly is deterministic and matches eigensolve") {
  auto pat = amorphous(5.0, 18);
  const std::vector<int> flux = {0, 1, 2};
  const ButterflyTable t1 = spectrum_butterfly(pat, HoppingRule{}, flux, 2);
  const ButterflyTable t2 = spectrum_butterfly(pat, HoppingRule{}, flux, 2);
  REQUIRE(t1.columns.size() == 3);
  for (std::size_t c = 0; c < t1.columns.size(); ++c) {
    CHECK(t1.columns[c].eigenvalues == t2.columns[c].eigenvalues);
    CHECK(t1.columns[c].gaps.size() <= 2);
  }
  const SpectralData direct = eigensolve(
      build_hamiltonian(pat, HoppingRule{}, FluxIndex{1}), false);
  CHECK((t1.columns[1].eigenvalues - direct.eigenvalues)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("dos is a normalized histogram") {
  auto pat = amorphous(5.0, 20);
  const SpectralData spec =
      eigensolve(build_hamiltonian(pat, HoppingRule{}, 0.0), false);
  const Histogram h = dos(spec, 8);
  REQUIRE(h.edges.size() == 9);
  REQUIRE(h.counts.size() == 8);
  double mass = 0.0;
  for (double c : h.counts) {
    CHECK(c >= 0.0);
    mass += c;
  }
  CHECK(mass == Approx(1.0));
  CHECK(h.edges.front() == Approx(spec.eigenvalues.minCoeff()));
  CHECK(h.edges.back() == Approx(spec.eigenvalues.maxCoeff()));
  CHECK_THROWS_AS(dos(spec, 0), InvalidParameter);
}
