#pragma once

#include "acnet/core.hpp"
#include "acnet/rca.hpp"

namespace acnet {

// d_r: number of fields present in region r (row sums).
template <typename Derived>
Eigen::Matrix<int, Derived::RowsAtCompileTime, 1> diversification(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<int>().rowwise().sum();
}

// u_i: number of regions presenting field i (column sums).
template <typename Derived>
Eigen::Matrix<int, Derived::ColsAtCompileTime, 1> ubiquity(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<int>().colwise().sum().transpose();
}

// Lagged assist weights
//   B(i, j) = 1/u_i(t) * sum_r M(r, i; t) M(r, j; t+lag) / d_r(t+lag)
// computed as (M_t D_u^-1)^T (D_d^-1 M_{t+lag}). Regions with d_r = 0 and
// fields with u_i = 0 contribute zero, so B is sub-stochastic.
template <typename Scalar = double, typename DerivedT, typename DerivedN>
auto assist_weights(const Eigen::MatrixBase<DerivedT>& m_t, const Eigen::MatrixBase<DerivedN>& m_next) {
  constexpr int kRows = DerivedT::RowsAtCompileTime, kFields = DerivedT::ColsAtCompileTime;
  using Result = Eigen::Matrix<Scalar, kFields, kFields>;
  if (m_t.rows() != m_next.rows() || m_t.cols() != m_next.cols()) {
    throw ValidationError("assist: presence matrices have different shapes");
  }
  const auto u = ubiquity(m_t);
  const auto d = diversification(m_next);
  const Eigen::Matrix<Scalar, kFields, 1> inv_u =
      u.unaryExpr([](int x) { return x > 0 ? Scalar(1) / Scalar(x) : Scalar(0); });
  const Eigen::Matrix<Scalar, kRows, 1> inv_d =
      d.unaryExpr([](int x) { return x > 0 ? Scalar(1) / Scalar(x) : Scalar(0); });
  const Eigen::Matrix<Scalar, kRows, kFields> left = m_t.template cast<Scalar>() * inv_u.asDiagonal();
  const Eigen::Matrix<Scalar, kRows, kFields> right = inv_d.asDiagonal() * m_next.template cast<Scalar>();
  return Result(left.transpose() * right);
}

struct AssistMatrix {
  int base_year = 0;
  int lag = 1;
  Labels fields;
  Labels regions;
  MatrixXd b;            // field x field
  Vector<int> d_next;    // diversification at base_year + lag, over regions
  Vector<int> u;         // ubiquity at base_year, over fields
};

// Throws ValidationError when the two matrices do not share region and field labels.
AssistMatrix assist_matrix(const PresenceMatrix& m_t, const PresenceMatrix& m_next);

}  // namespace acnet
