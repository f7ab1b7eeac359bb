#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

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

std::shared_ptr<const DelonePattern> chain(double L, std::uint64_t seed) {
  return std::make_shared<DelonePattern>(
      generate_pattern({1, L}, 0.5, std::nullopt, seed));
}

}  // namespace

TEST_CASE("flux quantization grid") {
  const double L = 20.0;
  CHECK(FluxIndex{0}.theta(L) == 0.0);
  CHECK(FluxIndex{3}.theta(L) == Approx(4.0 * std::numbers::pi * 3.0 / L));
  CHECK(FluxIndex::snap(1.5, L).n == 2);  // 4*pi*2/20 = 1.2566 nearest to 1.5
  CHECK(FluxIndex::snap(0.0, L).n == 0);
  CHECK(FluxIndex::is_quantized(FluxIndex{5}.theta(L), L));
  CHECK_FALSE(FluxIndex::is_quantized(1.5, L));
}

TEST_CASE("hopping rule profile") {
  HoppingRule rule;
  CHECK(rule.eval(0.0) == 1.0);
  CHECK(rule.eval(1.0) == Approx(std::exp(-3.0)));
  rule.range = 2.0;
  CHECK(rule.eval(2.5) == 0.0);
  rule.amplitude = [](double) { return 0.5; };
  CHECK(rule.eval(1.7) == 0.5);
  CHECK(rule.eval(2.5) == 0.0);  // cutoff still applies over the override
}

TEST_CASE("single-site pattern gives a 1x1 Hamiltonian") {
  auto pat = std::make_shared<DelonePattern>(periodic_lattice({2, 1.0}));
  HoppingRule rule;
  rule.range = 0.4;
  const OperatorMatrix h = build_hamiltonian(pat, rule, 0.0);
  REQUIRE(h.size() == 1);
  CHECK(h.M(0, 0) == Complex(1.0, 0.0));  // diagonal kept by default
  HoppingRule bare = rule;
  bare.include_diagonal = false;
  CHECK(build_hamiltonian(pat, bare, 0.0).M(0, 0) == Complex(0.0, 0.0));
}

TEST_CASE("zero flux gives a real symmetric matrix") {
  auto pat = amorphous(6.0, 2);
  const OperatorMatrix h = build_hamiltonian(pat, HoppingRule{}, 0.0);
  CHECK(h.M.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK((h.M - h.M.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hamiltonian is exactly Hermitian at any flux") {
  auto pat = amorphous(6.0, 4);
  const double theta = FluxIndex{2}.theta(pat->geometry.L);
  const OperatorMatrix h = build_hamiltonian(pat, HoppingRule{}, theta);
  CHECK(hermiticity_residual(h.M) == 0.0);
}

TEST_CASE("matrix elements follow the wedge-phase formula") {
  auto pat = amorphous(5.0, 6);
  const double theta = 0.9;
  const OperatorMatrix h = build_hamiltonian(pat, HoppingRule{}, theta);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      const double wedge = 0.5 * (pat->points(i, 0) * pat->points(j, 1) -
                                  pat->points(i, 1) * pat->points(j, 0));
      const Complex want =
          std::exp(Complex(0.0, theta * wedge)) *
          std::exp(-3.0 * pat->distance(i, j));
      CHECK(std::abs(h.M(i, j) - want) < 1e-15);
    }
}

TEST_CASE("flux indices n and n+L give gauge-equivalent spectra on the "
          "periodic lattice") {
  // theta differs by 4*pi, i.e. 2*pi flux per unit cell: a large gauge
  // transformation on integer coordinates.
  const double L = 5.0;
  auto pat = std::make_shared<DelonePattern>(periodic_lattice({2, L}));
  const auto e1 =
      eigensolve(build_hamiltonian(pat, HoppingRule{}, FluxIndex{2}), false);
  const auto e2 = eigensolve(
      build_hamiltonian(pat, HoppingRule{}, FluxIndex{2 + 5}), false);
  CHECK((e1.eigenvalues - e2.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("nonzero flux requires d = 2") {
  auto pat = chain(10.0, 3);
  CHECK_THROWS_AS(build_hamiltonian(pat, HoppingRule{}, 0.5),
                  DimensionMismatch);
  CHECK_NOTHROW(build_hamiltonian(pat, HoppingRule{}, 0.0));
}

TEST_CASE("range cutoff beyond L/2 is rejected on the torus") {
  auto pat = amorphous(6.0, 8);
  HoppingRule rule;
  rule.range = 3.5;
  CHECK_THROWS_AS(build_hamiltonian(pat, rule, 0.0), RangeTooLarge);
  CHECK_NOTHROW(build_hamiltonian(pat, rule, 0.0, /*open_boundary=*/true));
}

TEST_CASE("Gershgorin bound dominates the spectral radius") {
  auto pat = amorphous(6.0, 10);
  const OperatorMatrix h =
      build_hamiltonian(pat, HoppingRule{}, FluxIndex{1});
  const SpectralData spec = eigensolve(h, false);
  const double bound = gershgorin_bound(h);
  CHECK(spec.eigenvalues.cwiseAbs().maxCoeff() <= bound + 1e-12);
}

TEST_CASE("chiral split alternates sorted sites") {
  auto pat = chain(10.0, 5);
  const ChiralSplit split = chiral_split(*pat);
  REQUIRE(split.a_sites.size() == split.b_sites.size());
  REQUIRE(split.a_sites.size() + split.b_sites.size() ==
          static_cast<std::size_t>(pat->size()));
  // A sites interleave B sites in coordinate order
  for (std::size_t m = 0; m < split.a_sites.size(); ++m) {
    CHECK(pat->points(split.a_sites[m], 0) < pat->points(split.b_sites[m], 0));
    if (m + 1 < split.a_sites.size())
      CHECK(pat->points(split.b_sites[m], 0) <
            pat->points(split.a_sites[m + 1], 0));
  }
}

TEST_CASE("chiral chain anticommutes exactly with the sublattice parity") {
  auto pat = chain(10.0, 7);
  HoppingRule rule;
  rule.amplitude = [](double) { return 1.0; };
  const OperatorMatrix h = build_chiral_chain(pat, rule, 0.37);
  const Eigen::VectorXd parity = sublattice_parity(*pat);
  const MatrixXcd g = parity.asDiagonal();
  CHECK((g * h.M + h.M * g).cwiseAbs().maxCoeff() == 0.0);
  CHECK(hermiticity_residual(h.M) == 0.0);
}

TEST_CASE("chiral chain is gapless at delta = 0 and flat at |delta| = 1") {
  // even cell count so the k = pi mode sits on the momentum grid
  auto pat = std::make_shared<DelonePattern>(periodic_lattice({1, 12.0}));
  HoppingRule rule;
  rule.amplitude = [](double) { return 1.0; };
  const SpectralData gapless =
      eigensolve(build_chiral_chain(pat, rule, 0.0), false);
  CHECK(gapless.eigenvalues.cwiseAbs().minCoeff() < 1e-12);
  for (double delta : {1.0, -1.0}) {
    const SpectralData flat =
        eigensolve(build_chiral_chain(pat, rule, delta), false);
    // decoupled dimers: every eigenvalue at +-1 (bond weight (1+|d|)/2 = 1)
    CHECK(flat.eigenvalues.cwiseAbs().minCoeff() == Approx(1.0));
    CHECK(flat.eigenvalues.cwiseAbs().maxCoeff() == Approx(1.0));
  }
}

TEST_CASE("chiral chain rejects bad inputs") {
  HoppingRule rule;
  auto pat2d = amorphous(4.0, 9);
  CHECK_THROWS_AS(build_chiral_chain(pat2d, rule, 0.5), DimensionMismatch);
  auto odd = std::make_shared<DelonePattern>(periodic_lattice({1, 5.0}));
  CHECK_THROWS_AS(build_chiral_chain(odd, rule, 0.5), OddSiteCount);
  auto pat = std::make_shared<DelonePattern>(periodic_lattice({1, 10.0}));
  CHECK_THROWS_AS(build_chiral_chain(pat, rule, 1.5), InvalidParameter);
}
