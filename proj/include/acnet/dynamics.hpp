#pragma once

#include "acnet/core.hpp"
#include "acnet/filter.hpp"

#include <vector>

namespace acnet {

// Activity trajectory sampled on a uniform grid: times[k] and states.col(k).
struct Trajectory {
  std::vector<double> times;
  MatrixXd states;  // fields x samples

  Index samples() const { return states.cols(); }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
};

// Raised when max y exceeds the overflow guard; carries the trajectory up to
// and including the first offending sample.
class BlowUpError : public ComputeError {
 public:
  BlowUpError(double time, Trajectory partial)
      : ComputeError("activity exceeded 1e300 at t=" + std::to_string(time)),
        time_(time),
        partial_(std::move(partial)) {}
  double time() const { return time_; }
  const Trajectory& partial() const { return partial_; }

 private:
  double time_;
  Trajectory partial_;
};

inline constexpr double kActivityOverflow = 1e300;

// One classical fourth-order Runge-Kutta step of dy/dt = A y.
template <typename DerivedA, typename DerivedY>
auto rk4_step(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedY>& y,
              typename DerivedY::Scalar h) {
  using V = Vector<typename DerivedY::Scalar>;
  const V k1 = a * y;
  const V k2 = a * (y + (h / 2) * k1);
  const V k3 = a * (y + (h / 2) * k2);
  const V k4 = a * (y + h * k3);
  return V(y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4));
}

// Integrates the linear catalytic dynamics in which every link i -> j feeds
// the receiver: dy_j/dt = sum_i C(i, j) y_i, i.e. dy/dt = C^T y. Uses
// fixed-step RK4 with ceil(t_end / dt) equal steps, sampling every step.
// Throws ValidationError for dt <= 0, t_end < 0 or negative y0, and
// BlowUpError past the overflow guard.
Trajectory simulate_linear(const TechnologyNetwork& net, const VectorXd& y0, double t_end, double dt = 1e-2);

enum class GrowthKind { Exponential, SubExponential, BelowFloor };

struct GrowthEstimate {
  VectorXd rate;                // least-squares slope of log y over the window
  std::vector<GrowthKind> kind;
};

struct GrowthOptions {
  double floor = 1e-300;        // y at or below this anywhere in the window -> BelowFloor
  double min_rate = 1e-8;       // slopes below this are SubExponential
  double max_slope_drift = 0.05;  // relative change between half-window slopes
};

// Fits log y_i against t over samples with t >= t_end - window. A field is
// Exponential when its slope exceeds min_rate and the slopes fitted on the two
// halves of the window agree within max_slope_drift (polynomial growth t^k has
// a slope k/t that decays across the window). Throws ValidationError when the
// window holds fewer than 4 samples or exceeds the trajectory.
GrowthEstimate estimate_growth_rate(const Trajectory& trajectory, double window, const GrowthOptions& options = {});

}  // namespace acnet
