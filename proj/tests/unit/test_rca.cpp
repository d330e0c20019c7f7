#include <doctest.h>

#include "acnet/rca.hpp"

#include <random>

using namespace acnet;

TEST_SUITE("rca") {

TEST_CASE("two specialized regions") {
  MatrixXd w(2, 2);
  w << 4, 1, 1, 4;
  const Mask m = rca_mask(w);
  CHECK(m(0, 0) == 1);
  CHECK(m(0, 1) == 0);
  CHECK(m(1, 0) == 0);
  CHECK(m(1, 1) == 1);
}

TEST_CASE("ties at the global share are absences") {
  MatrixXd w(2, 2);
  w << 1, 1, 1, 1;
  CHECK(rca_mask(w).cast<int>().sum() == 0);
}

TEST_CASE("twice the global share is a presence") {
  MatrixXd w(3, 2);
  w << 2, 0, 1, 1, 1, 3;  // global share of field 0 is 0.5, region 0 has 1.0
  CHECK(rca_mask(w)(0, 0) == 1);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(rca_mask(MatrixXd::Zero(2, 2)), ValidationError);
  MatrixXd neg = MatrixXd::Ones(2, 2);
  neg(0, 1) = -1;
  CHECK_THROWS_AS(rca_mask(neg), ValidationError);
}

TEST_CASE("zero rows stay zero and share vectors sum to one") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd w = MatrixXd::NullaryExpr(6, 5, [&]() { return u(rng) < 0.4 ? 0.0 : u(rng); });
    w.row(2).setZero();
    if (w.sum() == 0) continue;
    const Mask m = rca_mask(w);
    CHECK(m.row(2).cast<int>().sum() == 0);
    const VectorXd global = w.colwise().sum().transpose() / w.sum();
    CHECK(global.sum() == doctest::Approx(1.0));
    // float scalar type works through the same template
    CHECK(rca_mask(w.cast<float>()).rows() == 6);
  }
}

TEST_CASE("binarize through labels") {
  OccurrenceMatrix w;
  w.year = 1999;
  w.entries[{"r1", "a"}] = 4;
  w.entries[{"r1", "b"}] = 1;
  w.entries[{"r2", "a"}] = 1;
  w.entries[{"r2", "b"}] = 4;
  const auto p = binarize_rca(w, Labels({"r1", "r2"}), Labels({"a", "b"}));
  CHECK(p.year == 1999);
  CHECK(p.m(0, 0) == 1);
  CHECK(p.m(1, 1) == 1);
  CHECK(p.m.cast<int>().sum() == 2);
}

}
