#include "acnet/assist.hpp"

namespace acnet {

AssistMatrix assist_matrix(const PresenceMatrix& m_t, const PresenceMatrix& m_next) {
  if (!(m_t.regions == m_next.regions) || !(m_t.fields == m_next.fields)) {
    throw ValidationError("assist: presence matrices use different region or field index sets");
  }
  AssistMatrix out;
  out.base_year = m_t.year;
  out.lag = m_next.year - m_t.year;
  out.fields = m_t.fields;
  out.regions = m_t.regions;
  out.b = assist_weights(m_t.m, m_next.m);
  out.d_next = diversification(m_next.m);
  out.u = ubiquity(m_t.m);
  return out;
}

}  // namespace acnet
