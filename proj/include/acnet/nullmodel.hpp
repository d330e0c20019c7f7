#pragma once

#include "acnet/assist.hpp"
#include "acnet/core.hpp"
#include "acnet/rng.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace acnet {

// Fitted bipartite configuration model: independent links with
// p(r, i) = x_r y_i / (1 + x_r y_i) whose expected row and column sums match
// the observed diversification and ubiquity.
struct BicmParameters {
  VectorXd x;            // region multipliers; 0 for empty rows, +inf for full rows
  VectorXd y;            // field multipliers; 0 for empty columns, +inf for full columns
  MatrixXd p;            // region x field link probabilities
  double residual = 0;   // max absolute expected-degree error
  int iterations = 0;
  Matrix<std::uint64_t> threshold;  // cached bernoulli_threshold(p)
};

struct BicmOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  double damping = 0.5;  // weight kept on the previous iterate
};

// Throws ConvergenceError carrying the residual when the fixed point is not
// reached within max_iter.
BicmParameters fit_bicm(const Mask& m, const BicmOptions& options = {});

// Independent Bernoulli(p) draw of every entry.
Mask sample_null_matrix(const BicmParameters& params, Rng& rng);

struct NullEnsembleOptions {
  int replicates = 1000;
  std::uint64_t master_seed = 0;
  int base_year = 0;
  int lag = 1;
  unsigned workers = 1;
};

// Replicate k draws M_t from substream (seed, base_year, lag, k, 0) and
// M_{t+lag} from (seed, base_year, lag, k, 1), so results do not depend on
// the order or thread in which replicates run.
MatrixXd null_assist_replicate(const BicmParameters& params_t, const BicmParameters& params_next,
                               const NullEnsembleOptions& options, int k);

// Streams the K null assist matrices to `visit`; calls may be concurrent.
void for_each_null_assist(const BicmParameters& params_t, const BicmParameters& params_next,
                          const NullEnsembleOptions& options,
                          const std::function<void(int, const MatrixXd&)>& visit);

std::vector<MatrixXd> null_assist_ensemble(const BicmParameters& params_t,
                                           const BicmParameters& params_next,
                                           const NullEnsembleOptions& options);

// Upper-tail Monte Carlo p-values with add-one smoothing:
//   p(i, j) = (1 + #{k : B_k(i, j) >= B(i, j)}) / (K + 1).
struct PvalueMatrix {
  int base_year = 0;
  int replicates = 0;
  Labels fields;
  MatrixXd p;
};

PvalueMatrix empirical_pvalues(const AssistMatrix& observed, const std::vector<MatrixXd>& ensemble);

struct ReplicateSummary {
  int replicate = 0;
  double mean_weight = 0;
  int nonzero_links = 0;
  int presences_t = 0;
  int presences_next = 0;
};

// Streaming version: never holds the ensemble in memory. Exceedance counts are
// integers, so the reduction is exact for any worker count. When `summaries`
// is non-null it receives one row per replicate, ordered by replicate index.
PvalueMatrix null_pvalues(const AssistMatrix& observed, const BicmParameters& params_t,
                          const BicmParameters& params_next, const NullEnsembleOptions& options,
                          std::vector<ReplicateSummary>* summaries = nullptr);

}  // namespace acnet
