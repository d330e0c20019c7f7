#pragma once

#include "acnet/core.hpp"
#include "acnet/ingest.hpp"

namespace acnet {

// Binary region x field presence matrix M(t).
struct PresenceMatrix {
  int year = 0;
  Labels regions;
  Labels fields;
  Mask m;

  bool operator==(const PresenceMatrix& o) const {
    return year == o.year && regions == o.regions && fields == o.fields && m == o.m;
  }
};

// Revealed-comparative-advantage mask: entry (r, i) is 1 iff
//   w(r, i) / sum_j w(r, j)  >  sum_s w(s, i) / sum_{s, j} w(s, j)
// with a strict inequality, so ties are absences. Rows with zero total stay
// all-zero. Throws ValidationError on negative entries or an all-zero input.
template <typename Derived>
Mask rca_mask(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  if ((w.array() < Scalar(0)).any()) throw ValidationError("occurrence weights must be nonnegative");
  const Scalar total = w.sum();
  if (!(total > Scalar(0))) throw ValidationError("RCA undefined for an all-zero occurrence matrix");

  const Vector<Scalar> row_total = w.rowwise().sum();
  const Vector<Scalar> global_share = w.colwise().sum().transpose() / total;

  Mask m = Mask::Zero(w.rows(), w.cols());
  for (Index r = 0; r < w.rows(); ++r) {
    if (!(row_total(r) > Scalar(0))) continue;
    for (Index i = 0; i < w.cols(); ++i) {
      m(r, i) = (w(r, i) / row_total(r) > global_share(i)) ? 1 : 0;
    }
  }
  return m;
}

PresenceMatrix binarize_rca(const OccurrenceMatrix& w, const Labels& regions, const Labels& fields);

}  // namespace acnet
