#include "acnet/nullmodel.hpp"

#include "acnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace acnet {

namespace {

// Null weights within this distance of the observed weight count as ties.
// Assist weights are sums of at most #regions terms bounded by 1, so distinct
// rationals that agree to 1e-13 are rounding artifacts of the same value.
constexpr double kTieTolerance = 1e-13;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DegreeClass {
  int degree = 0;
  int count = 0;
};

// Solves the reduced problem on rows/columns grouped by degree. Nodes with the
// same degree share a multiplier at the unique maximum-entropy solution.
void solve_grouped(const std::vector<DegreeClass>& rows, const std::vector<DegreeClass>& cols,
                   const BicmOptions& options, std::vector<double>& x, std::vector<double>& y,
                   double& residual, int& iterations) {
  const std::size_t A = rows.size(), B = cols.size();
  double links = 0;
  for (const auto& r : rows) links += static_cast<double>(r.degree) * r.count;
  const double scale = std::sqrt(links);
  x.assign(A, 0.0);
  y.assign(B, 0.0);
  for (std::size_t a = 0; a < A; ++a) x[a] = rows[a].degree / scale;
  for (std::size_t b = 0; b < B; ++b) y[b] = cols[b].degree / scale;

  auto compute_residual = [&] {
    double res = 0;
    for (std::size_t a = 0; a < A; ++a) {
      double s = 0;
      for (std::size_t b = 0; b < B; ++b) s += cols[b].count * (x[a] * y[b] / (1.0 + x[a] * y[b]));
      res = std::max(res, std::abs(s - rows[a].degree));
    }
    for (std::size_t b = 0; b < B; ++b) {
      double s = 0;
      for (std::size_t a = 0; a < A; ++a) s += rows[a].count * (x[a] * y[b] / (1.0 + x[a] * y[b]));
      res = std::max(res, std::abs(s - cols[b].degree));
    }
    return res;
  };

  residual = compute_residual();
  iterations = 0;
  const double keep = options.damping;
  while (residual > options.tol) {
    if (iterations >= options.max_iter) {
      throw ConvergenceError("BiCM fixed point did not converge", iterations, residual);
    }
    for (std::size_t a = 0; a < A; ++a) {
      double denom = 0;
      for (std::size_t b = 0; b < B; ++b) denom += cols[b].count * y[b] / (1.0 + x[a] * y[b]);
      x[a] = keep * x[a] + (1.0 - keep) * (rows[a].degree / denom);
    }
    for (std::size_t b = 0; b < B; ++b) {
      double denom = 0;
      for (std::size_t a = 0; a < A; ++a) denom += rows[a].count * x[a] / (1.0 + x[a] * y[b]);
      y[b] = keep * y[b] + (1.0 - keep) * (cols[b].degree / denom);
    }
    ++iterations;
    residual = compute_residual();
    if (!std::isfinite(residual)) {
      throw ConvergenceError("BiCM fixed point diverged", iterations, residual);
    }
  }
}

}  // namespace

BicmParameters fit_bicm(const Mask& m, const BicmOptions& options) {
  const Index R = m.rows(), F = m.cols();
  const Vector<int> d = diversification(m);
  const Vector<int> u = ubiquity(m);

  BicmParameters out;
  out.x = VectorXd::Constant(R, std::numeric_limits<double>::quiet_NaN());
  out.y = VectorXd::Constant(F, std::numeric_limits<double>::quiet_NaN());
  out.p = MatrixXd::Constant(R, F, std::numeric_limits<double>::quiet_NaN());

  // Peel rows/columns whose remaining degree is 0 or equal to the number of
  // free partners: their links are forced to 0 or 1.
  std::vector<char> row_free(R, 1), col_free(F, 1);
  std::vector<int> dr(d.data(), d.data() + R), du(u.data(), u.data() + F);
  Index free_rows = R, free_cols = F;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Index r = 0; r < R; ++r) {
      if (!row_free[r]) continue;
      if (dr[r] != 0 && dr[r] != free_cols) continue;
      const bool full = dr[r] != 0;
      for (Index i = 0; i < F; ++i) {
        if (!col_free[i]) continue;
        out.p(r, i) = full ? 1.0 : 0.0;
        if (full) --du[i];
      }
      out.x(r) = full ? kInf : 0.0;
      row_free[r] = 0;
      --free_rows;
      changed = true;
    }
    for (Index i = 0; i < F; ++i) {
      if (!col_free[i]) continue;
      if (du[i] != 0 && du[i] != free_rows) continue;
      const bool full = du[i] != 0;
      for (Index r = 0; r < R; ++r) {
        if (!row_free[r]) continue;
        out.p(r, i) = full ? 1.0 : 0.0;
        if (full) --dr[r];
      }
      out.y(i) = full ? kInf : 0.0;
      col_free[i] = 0;
      --free_cols;
      changed = true;
    }
  }

  if (free_rows > 0 && free_cols > 0) {
    std::map<int, std::size_t> row_class, col_class;
    std::vector<DegreeClass> rows, cols;
    for (Index r = 0; r < R; ++r) {
      if (!row_free[r]) continue;
      auto [it, inserted] = row_class.emplace(dr[r], rows.size());
      if (inserted) rows.push_back({dr[r], 0});
      ++rows[it->second].count;
    }
    for (Index i = 0; i < F; ++i) {
      if (!col_free[i]) continue;
      auto [it, inserted] = col_class.emplace(du[i], cols.size());
      if (inserted) cols.push_back({du[i], 0});
      ++cols[it->second].count;
    }

    std::vector<double> gx, gy;
    solve_grouped(rows, cols, options, gx, gy, out.residual, out.iterations);

    for (Index r = 0; r < R; ++r) {
      if (row_free[r]) out.x(r) = gx[row_class.at(dr[r])];
    }
    for (Index i = 0; i < F; ++i) {
      if (col_free[i]) out.y(i) = gy[col_class.at(du[i])];
    }
    for (Index r = 0; r < R; ++r) {
      if (!row_free[r]) continue;
      for (Index i = 0; i < F; ++i) {
        if (!col_free[i]) continue;
        const double xy = out.x(r) * out.y(i);
        out.p(r, i) = xy / (1.0 + xy);
      }
    }
  }

  // Free rows whose partner columns all got peeled keep a NaN multiplier;
  // their probabilities are fully determined, so report them as fixed.
  for (Index r = 0; r < R; ++r) {
    if (std::isnan(out.x(r))) out.x(r) = 0.0;
  }
  for (Index i = 0; i < F; ++i) {
    if (std::isnan(out.y(i))) out.y(i) = 0.0;
  }

  out.residual = std::max((out.p.rowwise().sum() - d.cast<double>()).cwiseAbs().maxCoeff(),
                          (out.p.colwise().sum().transpose() - u.cast<double>()).cwiseAbs().maxCoeff());
  if (R == 0 || F == 0) out.residual = 0;
  out.threshold = out.p.unaryExpr([](double p) { return bernoulli_threshold(p); });
  return out;
}

Mask sample_null_matrix(const BicmParameters& params, Rng& rng) {
  const Index R = params.threshold.rows(), F = params.threshold.cols();
  Mask m(R, F);
  for (Index i = 0; i < F; ++i) {
    for (Index r = 0; r < R; ++r) m(r, i) = bernoulli(rng, params.threshold(r, i)) ? 1 : 0;
  }
  return m;
}

namespace {

void sample_pair(const BicmParameters& params_t, const BicmParameters& params_next,
                 const NullEnsembleOptions& options, int k, Mask& m_t, Mask& m_next) {
  Rng rng_t = substream(options.master_seed, {options.base_year, options.lag, k, 0});
  Rng rng_next = substream(options.master_seed, {options.base_year, options.lag, k, 1});
  m_t = sample_null_matrix(params_t, rng_t);
  m_next = sample_null_matrix(params_next, rng_next);
}

void check_ensemble(const BicmParameters& params_t, const BicmParameters& params_next,
                    const NullEnsembleOptions& options) {
  if (options.replicates < 1) throw ValidationError("null ensemble needs at least one replicate");
  if (params_t.p.rows() != params_next.p.rows() || params_t.p.cols() != params_next.p.cols()) {
    throw ValidationError("null ensemble: parameter shapes differ between years");
  }
}

}  // namespace

MatrixXd null_assist_replicate(const BicmParameters& params_t, const BicmParameters& params_next,
                               const NullEnsembleOptions& options, int k) {
  Mask m_t, m_next;
  sample_pair(params_t, params_next, options, k, m_t, m_next);
  return assist_weights(m_t, m_next);
}

void for_each_null_assist(const BicmParameters& params_t, const BicmParameters& params_next,
                          const NullEnsembleOptions& options,
                          const std::function<void(int, const MatrixXd&)>& visit) {
  check_ensemble(params_t, params_next, options);
  parallel_for(static_cast<std::size_t>(options.replicates), options.workers, [&](std::size_t k) {
    const MatrixXd b = null_assist_replicate(params_t, params_next, options, static_cast<int>(k));
    visit(static_cast<int>(k), b);
  });
}

std::vector<MatrixXd> null_assist_ensemble(const BicmParameters& params_t,
                                           const BicmParameters& params_next,
                                           const NullEnsembleOptions& options) {
  std::vector<MatrixXd> out(static_cast<std::size_t>(std::max(0, options.replicates)));
  for_each_null_assist(params_t, params_next, options,
                       [&](int k, const MatrixXd& b) { out[static_cast<std::size_t>(k)] = b; });
  return out;
}

PvalueMatrix empirical_pvalues(const AssistMatrix& observed, const std::vector<MatrixXd>& ensemble) {
  if (ensemble.empty()) throw ValidationError("empirical_pvalues: empty ensemble");
  Matrix<int> exceed = Matrix<int>::Zero(observed.b.rows(), observed.b.cols());
  for (const auto& b : ensemble) {
    if (b.rows() != observed.b.rows() || b.cols() != observed.b.cols()) {
      throw ValidationError("empirical_pvalues: null matrix has a different field index set");
    }
    exceed += (b.array() >= observed.b.array() - kTieTolerance).cast<int>().matrix();
  }
  PvalueMatrix out;
  out.base_year = observed.base_year;
  out.replicates = static_cast<int>(ensemble.size());
  out.fields = observed.fields;
  out.p = (exceed.cast<double>().array() + 1.0) / (static_cast<double>(ensemble.size()) + 1.0);
  return out;
}

PvalueMatrix null_pvalues(const AssistMatrix& observed, const BicmParameters& params_t,
                          const BicmParameters& params_next, const NullEnsembleOptions& options,
                          std::vector<ReplicateSummary>* summaries) {
  check_ensemble(params_t, params_next, options);
  const Index N = observed.b.rows();
  if (params_t.p.cols() != N) throw ValidationError("null_pvalues: field count mismatch");

  const std::size_t K = static_cast<std::size_t>(options.replicates);
  const std::size_t blocks = std::min<std::size_t>(std::max(1u, options.workers), K);
  std::vector<Matrix<int>> counts(blocks, Matrix<int>::Zero(N, N));
  if (summaries) summaries->assign(K, ReplicateSummary{});
  const auto threshold = (observed.b.array() - kTieTolerance).eval();

  parallel_for(blocks, options.workers, [&](std::size_t blk) {
    const std::size_t begin = blk * K / blocks, end = (blk + 1) * K / blocks;
    Mask m_t, m_next;
    for (std::size_t k = begin; k < end; ++k) {
      sample_pair(params_t, params_next, options, static_cast<int>(k), m_t, m_next);
      const MatrixXd b = assist_weights(m_t, m_next);
      counts[blk] += (b.array() >= threshold).cast<int>().matrix();
      if (summaries) {
        auto& s = (*summaries)[k];
        s.replicate = static_cast<int>(k);
        s.mean_weight = N > 0 ? b.mean() : 0.0;
        s.nonzero_links = static_cast<int>((b.array() > 0).count());
        s.presences_t = m_t.cast<int>().sum();
        s.presences_next = m_next.cast<int>().sum();
      }
    }
  });

  Matrix<int> exceed = Matrix<int>::Zero(N, N);
  for (const auto& c : counts) exceed += c;

  PvalueMatrix out;
  out.base_year = observed.base_year;
  out.replicates = options.replicates;
  out.fields = observed.fields;
  out.p = (exceed.cast<double>().array() + 1.0) / (static_cast<double>(K) + 1.0);
  return out;
}

}  // namespace acnet
