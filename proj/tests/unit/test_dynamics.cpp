#include <doctest.h>

#include "acnet/acs.hpp"
#include "acnet/dynamics.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace acnet;

TEST_SUITE("dynamics") {

TEST_CASE("empty network keeps any state") {
  const auto net = TechnologyNetwork::from_edges(3, {});
  const VectorXd y0 = (VectorXd(3) << 0.5, 2.0, 0.0).finished();
  const auto traj = simulate_linear(net, y0, 4.0);
  CHECK(traj.states.col(traj.samples() - 1) == y0);
}

TEST_CASE("a single link adds linearly to its receiver") {
  const auto net = TechnologyNetwork::from_edges(3, {{0, 1}});
  const VectorXd y0 = (VectorXd(3) << 2.0, 1.0, 3.0).finished();
  const auto traj = simulate_linear(net, y0, 5.0, 0.1);
  const VectorXd end = traj.states.col(traj.samples() - 1);
  CHECK(end(0) == doctest::Approx(2.0));
  CHECK(end(1) == doctest::Approx(1.0 + 2.0 * 5.0).epsilon(1e-12));
  CHECK(end(2) == doctest::Approx(3.0));
}

TEST_CASE("two-cycle follows cosh and sinh, growth rate 1") {
  const auto net = TechnologyNetwork::from_edges(2, {{0, 1}, {1, 0}});
  const VectorXd y0 = (VectorXd(2) << 1.0, 0.0).finished();
  const auto traj = simulate_linear(net, y0, 10.0);
  const double t = traj.t_end();
  CHECK(traj.states(0, traj.samples() - 1) == doctest::Approx(std::cosh(t)).epsilon(1e-8));
  CHECK(traj.states(1, traj.samples() - 1) == doctest::Approx(std::sinh(t)).epsilon(1e-8));
  const auto g = estimate_growth_rate(traj, 3.0);
  CHECK(g.rate(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g.kind[0] == GrowthKind::Exponential);
}

TEST_CASE("grid covers t_end exactly") {
  const auto traj = simulate_linear(TechnologyNetwork::from_edges(1, {}), VectorXd::Ones(1), 1.0, 0.3);
  CHECK(traj.samples() == 5);
  CHECK(traj.t_end() == doctest::Approx(1.0));
}

TEST_CASE("matches the matrix exponential on random graphs") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    TechnologyNetwork net;
    net.c = oracle::random_digraph(size(rng), 0.35, rng);
    VectorXd y0 = VectorXd::NullaryExpr(net.size(), [&]() { return u(rng); });
    const auto traj = simulate_linear(net, y0, 5.0);
    const VectorXd exact = oracle::expm(net.c.cast<double>().transpose(), 5.0) * y0;
    const VectorXd got = traj.states.col(traj.samples() - 1);
    for (Index i = 0; i < net.size(); ++i) CHECK(std::abs(got(i) - exact(i)) <= 1e-6 * std::max(1.0, std::abs(exact(i))));
    CHECK((traj.states.array() >= -1e-12).all());
  }
}

TEST_CASE("chain growth is polynomial, not exponential") {
  const auto net = TechnologyNetwork::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto traj = simulate_linear(net, VectorXd::Ones(4), 30.0);
  const auto g = estimate_growth_rate(traj, 10.0);
  CHECK(g.kind[0] == GrowthKind::SubExponential);  // constant
  CHECK(g.rate(0) == doctest::Approx(0.0));
  CHECK(g.kind[3] == GrowthKind::SubExponential);  // cubic
}

TEST_CASE("direction aligns with the PF vector") {
  const auto net = TechnologyNetwork::from_edges(5, {{0, 1}, {1, 2}, {2, 0}, {0, 2}, {2, 3}, {3, 4}});
  const auto pf = pf_eigen(net);
  const auto traj = simulate_linear(net, VectorXd::Ones(5), 40.0);
  const VectorXd y = traj.states.col(traj.samples() - 1);
  const double cosine = y.dot(pf.vector) / (y.norm() * pf.vector.norm());
  CHECK(cosine >= 1 - 1e-6);
}

TEST_CASE("overflow guard stops with the partial trajectory") {
  const auto net = TechnologyNetwork::from_edges(3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}, {0, 0}});
  try {
    simulate_linear(net, VectorXd::Ones(3), 1000.0, 0.05);
    FAIL("expected a blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time() < 1000.0);
    CHECK(e.partial().samples() >= 2);
    CHECK(e.partial().states.col(e.partial().samples() - 1).maxCoeff() > kActivityOverflow);
  }
}

TEST_CASE("input validation") {
  const auto net = TechnologyNetwork::from_edges(2, {});
  CHECK_THROWS_AS(simulate_linear(net, VectorXd::Ones(2), 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(simulate_linear(net, VectorXd::Ones(3), 1.0), ValidationError);
  CHECK_THROWS_AS(simulate_linear(net, -VectorXd::Ones(2), 1.0), ValidationError);
  const auto traj = simulate_linear(net, VectorXd::Ones(2), 0.02);
  CHECK_THROWS_AS(estimate_growth_rate(traj, 0.02), ValidationError);
}

}
