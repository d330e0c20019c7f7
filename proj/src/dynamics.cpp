#include "acnet/dynamics.hpp"

#include <cmath>

namespace acnet {

Trajectory simulate_linear(const TechnologyNetwork& net, const VectorXd& y0, double t_end, double dt) {
  const Index n = net.size();
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(t_end >= 0.0)) throw ValidationError("t_end must be nonnegative");
  if (y0.size() != n) throw ValidationError("initial state has the wrong length");
  if ((y0.array() < 0.0).any()) throw ValidationError("initial state must be nonnegative");

  const MatrixXd a = net.c.cast<double>().transpose();
  const auto steps = static_cast<Index>(std::ceil(t_end / dt - 1e-9));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.resize(n, steps + 1);
  traj.times.push_back(0.0);
  traj.states.col(0) = y0;

  VectorXd y = y0;
  for (Index k = 1; k <= steps; ++k) {
    y = rk4_step(a, y, h);
    const double t = static_cast<double>(k) * h;
    traj.times.push_back(t);
    traj.states.col(k) = y;
    if (!y.allFinite() || (n > 0 && y.maxCoeff() > kActivityOverflow)) {
      Trajectory partial;
      partial.times = traj.times;
      partial.states = traj.states.leftCols(k + 1);
      throw BlowUpError(t, std::move(partial));
    }
  }
  return traj;
}

namespace {

double ls_slope(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = static_cast<double>(t.size());
  double st = 0, sv = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    st += t[k];
    sv += v[k];
  }
  const double mt = st / n, mv = sv / n;
  double num = 0, den = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    num += (t[k] - mt) * (v[k] - mv);
    den += (t[k] - mt) * (t[k] - mt);
  }
  return num / den;
}

}  // namespace

GrowthEstimate estimate_growth_rate(const Trajectory& trajectory, double window, const GrowthOptions& options) {
  const double t_end = trajectory.t_end();
  if (!(window > 0.0) || window > t_end + 1e-12) {
    throw ValidationError("growth window must be positive and within the trajectory");
  }
  std::vector<Index> cols;
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    if (trajectory.times[k] >= t_end - window - 1e-12) cols.push_back(static_cast<Index>(k));
  }
  if (cols.size() < 4) throw ValidationError("growth window holds fewer than 4 samples");

  const Index n = trajectory.states.rows();
  GrowthEstimate out;
  out.rate = VectorXd::Zero(n);
  out.kind.assign(static_cast<std::size_t>(n), GrowthKind::SubExponential);

  const std::size_t half = cols.size() / 2;
  for (Index i = 0; i < n; ++i) {
    std::vector<double> t, logy;
    bool below = false;
    for (Index k : cols) {
      const double y = trajectory.states(i, k);
      if (!(y > options.floor)) {
        below = true;
        break;
      }
      t.push_back(trajectory.times[static_cast<std::size_t>(k)]);
      logy.push_back(std::log(y));
    }
    if (below) {
      out.kind[i] = GrowthKind::BelowFloor;
      continue;
    }
    const double rate = ls_slope(t, logy);
    out.rate(i) = rate;
    if (!(rate > options.min_rate)) continue;

    const std::vector<double> t1(t.begin(), t.begin() + half), l1(logy.begin(), logy.begin() + half);
    const std::vector<double> t2(t.begin() + half, t.end()), l2(logy.begin() + half, logy.end());
    const double early = ls_slope(t1, l1), late = ls_slope(t2, l2);
    if (std::abs(late - early) <= options.max_slope_drift * std::abs(rate)) {
      out.kind[i] = GrowthKind::Exponential;
    }
  }
  return out;
}

}  // namespace acnet
