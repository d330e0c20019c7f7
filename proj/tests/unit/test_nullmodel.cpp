#include <doctest.h>

#include "acnet/nullmodel.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace acnet;

namespace {

AssistMatrix observed(const Mask& a, const Mask& b, int year = 2000) {
  std::vector<std::string> regions, fields;
  for (Index r = 0; r < a.rows(); ++r) regions.push_back("r" + std::to_string(r));
  for (Index i = 0; i < a.cols(); ++i) fields.push_back("f" + std::to_string(i));
  return assist_matrix(PresenceMatrix{year, Labels(regions), Labels(fields), a},
                       PresenceMatrix{year + 1, Labels(regions), Labels(fields), b});
}

Mask circulant(Index n, Index k) {
  Mask m = Mask::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index s = 0; s < k; ++s) m(r, (r + s) % n) = 1;
  }
  return m;
}

}  // namespace

TEST_SUITE("nullmodel") {

TEST_CASE("fixed points on small matrices") {
  const auto zero = fit_bicm(Mask::Zero(3, 4));
  CHECK(zero.p.cwiseAbs().maxCoeff() == 0.0);

  const auto eye = fit_bicm(Mask::Identity(2, 2));
  CHECK((eye.p.array() - 0.5).abs().maxCoeff() < 1e-8);
  CHECK(eye.p.rowwise().sum().isApprox(VectorXd::Ones(2), 1e-8));

  Mask m = Mask::Zero(3, 4);
  m.row(0).setOnes();
  m(1, 1) = 1;
  m(2, 2) = 1;
  const auto sat = fit_bicm(m);
  CHECK((sat.p.row(0).array() == 1.0).all());
}

TEST_CASE("fitted expectations reproduce both degree sequences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Mask m = oracle::random_digraph(30, 0.15, rng).topLeftCorner(30, 12);
    const auto fit = fit_bicm(m);
    CHECK((fit.p.rowwise().sum() - m.cast<double>().rowwise().sum()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((fit.p.colwise().sum() - m.cast<double>().colwise().sum()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fit.residual <= 1e-8);
    CHECK((fit.p.array() >= 0).all());
    CHECK((fit.p.array() <= 1).all());
  }
}

TEST_CASE("sampling extremes and entrywise frequency") {
  const auto none = fit_bicm(Mask::Zero(4, 4));
  Rng rng(1);
  CHECK(sample_null_matrix(none, rng).cast<int>().sum() == 0);
  const auto all = fit_bicm(Mask::Ones(4, 4));
  CHECK(sample_null_matrix(all, rng).cast<int>().sum() == 16);

  Mask m = Mask::Zero(5, 4);
  m << 1, 0, 0, 1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1;
  const auto fit = fit_bicm(m);
  constexpr int kDraws = 10000;
  MatrixXd freq = MatrixXd::Zero(5, 4);
  for (int k = 0; k < kDraws; ++k) freq += sample_null_matrix(fit, rng).cast<double>();
  freq /= kDraws;
  for (Index r = 0; r < 5; ++r) {
    for (Index i = 0; i < 4; ++i) {
      const double p = fit.p(r, i), se = std::sqrt(p * (1 - p) / kDraws);
      CHECK(std::abs(freq(r, i) - p) <= 3 * se + 1e-12);
    }
  }
}

TEST_CASE("null assist mean matches exhaustive enumeration at uniform p on 4 x 4") {
  const auto fit = fit_bicm(circulant(4, 2));  // every degree 2 -> p = 1/2 everywhere
  REQUIRE((fit.p.array() - 0.5).abs().maxCoeff() < 1e-8);

  // B = L^T R with L = M_t D_u^-1 and R = D_d^-1 M_next drawn independently,
  // so E[B] = E[L]^T E[R]; each factor is an average over all 2^16 matrices.
  MatrixXd el = MatrixXd::Zero(4, 4), er = MatrixXd::Zero(4, 4);
  for (unsigned bits = 0; bits < (1u << 16); ++bits) {
    Mask m(4, 4);
    for (int k = 0; k < 16; ++k) m(k / 4, k % 4) = (bits >> k) & 1u;
    const Vector<int> u = ubiquity(m), d = diversification(m);
    for (Index r = 0; r < 4; ++r) {
      for (Index i = 0; i < 4; ++i) {
        if (!m(r, i)) continue;
        el(r, i) += 1.0 / u(i);
        er(r, i) += 1.0 / d(r);
      }
    }
  }
  const MatrixXd expected = (el / 65536.0).transpose() * (er / 65536.0);

  NullEnsembleOptions opt;
  opt.replicates = 20000;
  opt.master_seed = 99;
  const auto ens = null_assist_ensemble(fit, fit, opt);
  MatrixXd mean = MatrixXd::Zero(4, 4);
  for (const auto& b : ens) mean += b;
  mean /= static_cast<double>(ens.size());
  // B entries lie in [0, 1]; the standard error of a 20000-sample mean is below 0.0036.
  CHECK((mean - expected).cwiseAbs().maxCoeff() < 0.011);
}

TEST_CASE("hand counted p-values") {
  const Mask a = Mask::Identity(2, 2);
  AssistMatrix obs = observed(a, a);
  obs.b << 0.25, 0.0, 0.5, 0.0;
  std::vector<MatrixXd> ens;
  for (double v : {0.1, 0.2, 0.3, 0.4}) ens.push_back((MatrixXd(2, 2) << v, 0.0, 0.0, 0.0).finished());
  const auto p = empirical_pvalues(obs, ens);
  CHECK(p.p(0, 0) == doctest::Approx(0.6));
  CHECK(p.p(0, 1) == doctest::Approx(1.0));   // 0 against all-zero nulls: ties count
  CHECK(p.p(1, 0) == doctest::Approx(0.2));   // above every null value: 1 / (K + 1)
  CHECK(p.replicates == 4);
}

TEST_CASE("streaming p-values equal the stored-ensemble ones and ignore the worker count") {
  std::mt19937_64 rng(4);
  const Mask a = oracle::random_digraph(40, 0.2, rng).topLeftCorner(40, 10);
  const Mask b = oracle::random_digraph(40, 0.2, rng).topLeftCorner(40, 10);
  const AssistMatrix obs = observed(a, b);
  const auto ft = fit_bicm(a), fn = fit_bicm(b);
  NullEnsembleOptions opt;
  opt.replicates = 64;
  opt.master_seed = 2024;
  opt.base_year = 2000;
  const auto stored = empirical_pvalues(obs, null_assist_ensemble(ft, fn, opt));
  std::vector<ReplicateSummary> s1, s3;
  opt.workers = 1;
  const auto one = null_pvalues(obs, ft, fn, opt, &s1);
  opt.workers = 3;
  const auto three = null_pvalues(obs, ft, fn, opt, &s3);
  CHECK(one.p == stored.p);
  CHECK(three.p == one.p);
  REQUIRE(s1.size() == 64);
  CHECK(s1[17].mean_weight == s3[17].mean_weight);
  CHECK(s1[17].presences_t == s3[17].presences_t);

  opt.master_seed = 2025;
  CHECK(null_pvalues(obs, ft, fn, opt).p != one.p);
}

TEST_CASE("replicates are keyed, not sequential") {
  const auto fit = fit_bicm(circulant(6, 3));
  NullEnsembleOptions opt;
  opt.master_seed = 5;
  opt.base_year = 1990;
  const MatrixXd r3 = null_assist_replicate(fit, fit, opt, 3);
  opt.replicates = 10;
  const auto ens = null_assist_ensemble(fit, fit, opt);
  CHECK(ens[3] == r3);
  CHECK_THROWS_AS(null_pvalues(observed(circulant(6, 3), circulant(6, 3)), fit, fit, NullEnsembleOptions{.replicates = 0}),
                  ValidationError);
}

}
