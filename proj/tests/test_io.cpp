#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "apc/errors.hpp"
#include "apc/io.hpp"
#include "apc/pattern.hpp"

using namespace apc;

namespace {

std::shared_ptr<const DelonePattern> amorphous(double L, std::uint64_t seed) {
  return std::make_shared<DelonePattern>(
      generate_pattern({2, L}, 0.83, std::nullopt, seed));
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.0, 1.0 / 3.0, -2.718281828459045, 1e-300, 6.0221409e23,
                   0.8300000000000001}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("pattern round-trip is lossless") {
  const DelonePattern p = *amorphous(5.0, 31);
  std::stringstream ss;
  write_pattern(ss, p);
  const DelonePattern q = read_pattern(ss);
  REQUIRE(q.size() == p.size());
  CHECK(q.geometry.d == p.geometry.d);
  CHECK(q.geometry.L == p.geometry.L);
  CHECK(q.d_min == p.d_min);
  CHECK(q.seed == p.seed);
  CHECK(q.kind == p.kind);
  CHECK((q.points - p.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pattern_hash(q) == pattern_hash(p));
}

TEST_CASE("pattern reader rejects malformed input") {
  {
    std::stringstream ss("0.5 0.5\n");  // no header
    CHECK_THROWS_AS(read_pattern(ss), Error);
  }
  {
    std::stringstream ss("# L=4 d=2\n0.5\n");  // short row
    CHECK_THROWS_AS(read_pattern(ss), Error);
  }
  {
    std::stringstream ss("# L=4 d=2 bogus\n");  // token without '='
    CHECK_THROWS_AS(read_pattern(ss), Error);
  }
  {
    std::stringstream ss("# d=2\n");  // missing L
    CHECK_THROWS_AS(read_pattern(ss), Error);
  }
}

TEST_CASE("pattern hash distinguishes patterns") {
  CHECK(pattern_hash(*amorphous(5.0, 1)) != pattern_hash(*amorphous(5.0, 2)));
}

TEST_CASE("kernel round-trip is lossless") {
  auto pat = amorphous(5.0, 33);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CovariantKernel k(pat, 1.7, false);
  for (int t = 0; t < 60; ++t)
    k.set(static_cast<int>(rng() % pat->size()),
          static_cast<int>(rng() % pat->size()), Complex(u(rng), u(rng)));

  std::stringstream ss;
  write_kernel(ss, k);
  const CovariantKernel back = read_kernel(ss, pat);
  CHECK(back.range() == k.range());
  CHECK(back.hermitian_flag() == k.hermitian_flag());
  CHECK(back.nonzeros() == k.nonzeros());
  CHECK(back.max_abs_difference(k) == 0.0);
}

TEST_CASE("kernel reader rejects a different pattern") {
  auto pat = amorphous(5.0, 35);
  const CovariantKernel k = unit_kernel(pat);
  std::stringstream ss;
  write_kernel(ss, k);
  CHECK_THROWS_AS(read_kernel(ss, amorphous(5.0, 36)), PatternMismatch);
}

TEST_CASE("kernel reader rejects malformed input") {
  auto pat = amorphous(5.0, 37);
  const std::string head =
      "# pattern_hash=" + std::to_string(pattern_hash(*pat)) +
      " range=0 hermitian=1\n";
  {
    std::stringstream ss(head + "wrong,columns\n");
    CHECK_THROWS_AS(read_kernel(ss, pat), Error);
  }
  {
    std::stringstream ss(head + "x_index,y_index,re,im\n0,0,1.0\n");
    CHECK_THROWS_AS(read_kernel(ss, pat), Error);
  }
  {
    std::stringstream ss("x_index,y_index,re,im\n");  // missing hash header
    CHECK_THROWS_AS(read_kernel(ss, pat), Error);
  }
}

TEST_CASE("file-based round trip and CsvWriter output") {
  const std::string dir = "io_test_tmp";
  std::remove((dir + "_pattern.txt").c_str());
  const DelonePattern p = *amorphous(4.0, 39);
  write_pattern(dir + "_pattern.txt", p);
  const DelonePattern q = read_pattern(dir + "_pattern.txt");
  CHECK((q.points - p.points).cwiseAbs().maxCoeff() == 0.0);
  std::remove((dir + "_pattern.txt").c_str());

  {
    CsvWriter csv(dir + ".csv", "a,b");
    csv.row({"1", format_double(0.5)});
    csv.row({"2", format_double(-1.25)});
  }  // writer flushes on destruction
  {
    std::ifstream is(dir + ".csv");
    std::string all((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
    CHECK(all == "a,b\n1,0.5\n2,-1.25\n");
  }
  std::remove((dir + ".csv").c_str());
}
