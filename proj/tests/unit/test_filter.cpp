#include <doctest.h>

#include "acnet/filter.hpp"
#include "oracles.hpp"

#include <random>

using namespace acnet;

namespace {

PvalueMatrix pmatrix(const MatrixXd& p) {
  std::vector<std::string> names;
  for (Index i = 0; i < p.rows(); ++i) names.push_back("f" + std::to_string(i));
  return PvalueMatrix{1990, 1000, Labels(names), p};
}

}  // namespace

TEST_SUITE("filter") {

TEST_CASE("hand computed step-up") {
  const std::vector<double> p = {0.001, 0.02, 0.03, 0.04};
  const auto r = bh_reject(p, 0.05);
  CHECK(std::count(r.begin(), r.end(), 1) == 4);
  const std::vector<double> ones(10, 1.0);
  const auto none = bh_reject(ones, 0.05);
  CHECK(std::count(none.begin(), none.end(), 1) == 0);
  CHECK_THROWS_AS(bh_reject(p, 0.0), ValidationError);
  CHECK_THROWS_AS(bh_reject(p, 1.0), ValidationError);
}

TEST_CASE("ties share the cutoff") {
  const std::vector<double> p = {0.01, 0.02, 0.02, 0.9};
  const auto r = bh_reject(p, 0.05);
  CHECK(r == std::vector<char>{1, 1, 1, 0});
}

TEST_CASE("matches the counting oracle, including discrete p-value grids") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(1, 200);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = size(rng);
    std::vector<double> p(static_cast<std::size_t>(m));
    const bool grid = trial % 2 == 0;
    for (auto& v : p) v = grid ? (1 + std::floor(u(rng) * u(rng) * 50)) / 51.0 : std::pow(u(rng), 3);
    CHECK(bh_reject(p, 0.05) == oracle::bh_reject(p, 0.05));
  }
}

TEST_CASE("raising q never removes a rejection") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> p(150);
  for (auto& v : p) v = std::pow(u(rng), 4);
  auto prev = bh_reject(p, 0.01);
  for (double q : {0.02, 0.05, 0.1, 0.2}) {
    const auto cur = bh_reject(p, q);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(cur[i] >= prev[i]);
    prev = cur;
  }
}

TEST_CASE("finite-K floor can sit above the BH line") {
  MatrixXd p = MatrixXd::Ones(121, 121);
  p(3, 7) = 1.0 / 1001;
  const auto net = build_adjacency(pmatrix(p), {});
  CHECK(net.tested_pairs == 121 * 120);
  CHECK(net.edge_count() == 0);
}

TEST_CASE("diagonal and absent rows are excluded from the tested family") {
  MatrixXd p = MatrixXd::Constant(3, 3, 0.5);
  p(0, 0) = 1e-6;
  p(0, 1) = 1e-6;
  p(2, 1) = 1e-6;
  Vector<int> u(3);
  u << 4, 2, 0;
  const auto net = build_adjacency(pmatrix(p), u);
  CHECK(net.tested_pairs == 4);
  CHECK(net.c(0, 1) == 1);
  CHECK(net.c(0, 0) == 0);
  CHECK(net.c(2, 1) == 0);

  FilterOptions diag;
  diag.include_diagonal = true;
  const auto with = build_adjacency(pmatrix(p), u, diag);
  CHECK(with.tested_pairs == 6);
  CHECK(with.c(0, 0) == 1);
}

TEST_CASE("alternative corrections") {
  MatrixXd p = MatrixXd::Constant(3, 3, 0.04);
  p(0, 1) = 0.001;
  FilterOptions bonf;
  bonf.correction = Correction::Bonferroni;
  CHECK(build_adjacency(pmatrix(p), {}, bonf).edge_count() == 1);
  FilterOptions raw;
  raw.correction = Correction::Uncorrected;
  CHECK(build_adjacency(pmatrix(p), {}, raw).edge_count() == 6);
  CHECK(parse_correction("bh") == Correction::BenjaminiHochberg);
  CHECK_THROWS_AS(parse_correction("holm"), ValidationError);
}

TEST_CASE("pairwise interface returns sorted pairs") {
  const std::vector<PairPvalue> tests = {{2, 1, 0.001}, {0, 2, 0.002}, {1, 0, 0.9}};
  const auto out = bh_fdr(tests, 0.05);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == std::pair<Index, Index>(0, 2));
  CHECK(out[1] == std::pair<Index, Index>(2, 1));
}

}
