#include "acnet/rca.hpp"

namespace acnet {

PresenceMatrix binarize_rca(const OccurrenceMatrix& w, const Labels& regions, const Labels& fields) {
  PresenceMatrix out;
  out.year = w.year;
  out.regions = regions;
  out.fields = fields;
  out.m = rca_mask(to_dense(w, regions, fields));
  return out;
}

}  // namespace acnet
