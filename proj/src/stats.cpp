#include "acnet/stats.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace acnet {

// ---------------------------------------------------------------- fitness

int field_fitness(std::span<const EventRecord> records, int year, const std::string& field) {
  std::set<std::string> families;
  for (const auto& r : records) {
    if (r.year == year && r.code == field) families.insert(r.family_id);
  }
  return static_cast<int>(families.size());
}

VectorXd fitness_vector(std::span<const EventRecord> records, int year, const Labels& fields) {
  std::vector<std::set<std::string>> families(static_cast<std::size_t>(fields.size()));
  for (const auto& r : records) {
    if (r.year != year || !fields.contains(r.code)) continue;
    families[static_cast<std::size_t>(fields.index_of(r.code))].insert(r.family_id);
  }
  VectorXd out(fields.size());
  for (Index i = 0; i < fields.size(); ++i) out(i) = static_cast<double>(families[static_cast<std::size_t>(i)].size());
  return out;
}

VectorXd split_fitness_vector(const OccurrenceMatrix& w, const Labels& fields) {
  VectorXd out = VectorXd::Zero(fields.size());
  for (const auto& [key, weight] : w.entries) {
    if (fields.contains(key.second)) out(fields.index_of(key.second)) += weight;
  }
  return out;
}

const SubsetFitness& FitnessRow::at(const std::string& subset) const {
  for (const auto& s : subsets) {
    if (s.subset == subset) return s;
  }
  throw ValidationError("unknown fitness subset: " + subset);
}

FitnessRow subset_fitness(const AcsDecomposition& decomp, const VectorXd& fitness) {
  const Index n = decomp.fields.size();
  if (fitness.size() != n) throw ValidationError("fitness vector does not match the decomposition's fields");

  FitnessRow row;
  row.year = decomp.year;
  row.network_total = fitness.sum();

  auto summarize = [&](const std::string& name, const std::vector<Index>& members) {
    SubsetFitness s;
    s.subset = name;
    s.nodes = members.size();
    for (Index i : members) s.total += fitness(i);
    if (!members.empty()) s.average = s.total / static_cast<double>(members.size());
    s.share_of_total = row.network_total > 0 ? s.total / row.network_total : 0.0;
    s.share_of_nodes = n > 0 ? static_cast<double>(members.size()) / static_cast<double>(n) : 0.0;
    row.subsets.push_back(std::move(s));
  };

  std::vector<Index> acs = decomp.core;
  acs.insert(acs.end(), decomp.periphery.begin(), decomp.periphery.end());
  std::sort(acs.begin(), acs.end());

  summarize("core", decomp.core);
  summarize("periphery", decomp.periphery);
  summarize("acs", acs);
  summarize("rest", decomp.outside);
  return row;
}

// ---------------------------------------------------------------- variety

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Polynomial in z stored as log-coefficients; -inf marks a zero coefficient.
using LogPoly = std::vector<double>;

double log_binom(int m, int x) {
  return std::lgamma(m + 1.0) - std::lgamma(x + 1.0) - std::lgamma(m - x + 1.0);
}

LogPoly section_poly(int m, double theta, int cap) {
  const int deg = std::min(m, cap);
  LogPoly p(static_cast<std::size_t>(deg) + 1);
  for (int x = 0; x <= deg; ++x) p[static_cast<std::size_t>(x)] = log_binom(m, x) + x * theta;
  return p;
}

// Product truncated to degree `cap`, each coefficient by log-sum-exp.
LogPoly multiply(const LogPoly& a, const LogPoly& b, int cap) {
  const int da = static_cast<int>(a.size()) - 1, db = static_cast<int>(b.size()) - 1;
  const int deg = std::min(da + db, cap);
  LogPoly out(static_cast<std::size_t>(deg) + 1, kNegInf);
  for (int z = 0; z <= deg; ++z) {
    const int lo = std::max(0, z - db), hi = std::min(z, da);
    double peak = kNegInf;
    for (int x = lo; x <= hi; ++x) peak = std::max(peak, a[static_cast<std::size_t>(x)] + b[static_cast<std::size_t>(z - x)]);
    if (peak == kNegInf) continue;
    double sum = 0.0;
    for (int x = lo; x <= hi; ++x) sum += std::exp(a[static_cast<std::size_t>(x)] + b[static_cast<std::size_t>(z - x)] - peak);
    out[static_cast<std::size_t>(z)] = peak + std::log(sum);
  }
  return out;
}

double coeff(const LogPoly& p, int z) {
  return z >= 0 && z < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(z)] : kNegInf;
}

void check_feasible(std::span<const int> counts, std::span<const int> sizes, int n) {
  if (counts.size() != sizes.size()) throw ValidationError("counts and sizes differ in length");
  long total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (sizes[k] < 0) throw ValidationError("negative section size");
    if (counts[k] < 0 || counts[k] > sizes[k]) throw ValidationError("section count outside [0, size]");
    total += counts[k];
  }
  if (total != n) throw ValidationError("section counts do not sum to n");
}

// Log-likelihood plus the mean of each X_k under the given log-odds.
struct Moments {
  double loglik = 0.0;
  VectorXd mean;
};

Moments moments(std::span<const int> counts, std::span<const int> sizes, const std::vector<double>& theta, int n) {
  const std::size_t c = sizes.size();
  std::vector<LogPoly> polys(c);
  for (std::size_t k = 0; k < c; ++k) polys[k] = section_poly(sizes[k], theta[k], n);

  std::vector<LogPoly> prefix(c + 1), suffix(c + 1);
  prefix[0] = {0.0};
  for (std::size_t k = 0; k < c; ++k) prefix[k + 1] = multiply(prefix[k], polys[k], n);
  suffix[c] = {0.0};
  for (std::size_t k = c; k-- > 0;) suffix[k] = multiply(polys[k], suffix[k + 1], n);

  const double log_p0 = coeff(prefix[c], n);
  Moments out;
  out.mean = VectorXd::Zero(static_cast<Index>(c));
  out.loglik = -log_p0;
  for (std::size_t k = 0; k < c; ++k) {
    out.loglik += polys[k][static_cast<std::size_t>(counts[k])];
    const LogPoly rest = multiply(prefix[k], suffix[k + 1], n);
    double m = 0.0;
    for (int x = 1; x < static_cast<int>(polys[k].size()); ++x) {
      const double r = coeff(rest, n - x);
      if (r != kNegInf) m += x * std::exp(polys[k][static_cast<std::size_t>(x)] + r - log_p0);
    }
    out.mean(static_cast<Index>(k)) = m;
  }
  return out;
}

}  // namespace

double fnc_log_normalizer(std::span<const int> sizes, std::span<const double> log_odds, int n) {
  if (sizes.size() != log_odds.size()) throw ValidationError("sizes and odds differ in length");
  if (n < 0) throw ValidationError("draw count must be nonnegative");
  LogPoly acc{0.0};
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] < 0) throw ValidationError("negative section size");
    acc = multiply(acc, section_poly(sizes[k], log_odds[k], n), n);
  }
  const double out = coeff(acc, n);
  if (out == kNegInf) throw ValidationError("draw count exceeds total size");
  return out;
}

double fnc_log_likelihood(std::span<const int> counts, std::span<const int> sizes, std::span<const double> log_odds) {
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  check_feasible(counts, sizes, n);
  if (log_odds.size() != sizes.size()) throw ValidationError("sizes and odds differ in length");
  double ll = -fnc_log_normalizer(sizes, log_odds, n);
  for (std::size_t k = 0; k < counts.size(); ++k) ll += log_binom(sizes[k], counts[k]) + counts[k] * log_odds[k];
  return ll;
}

bool NoncentralFit::any_clamped() const {
  return std::any_of(clamped.begin(), clamped.end(), [](char c) { return c != 0; });
}

NoncentralFit fit_noncentral_weights(std::span<const int> counts, std::span<const int> sizes, int n) {
  check_feasible(counts, sizes, n);
  const std::size_t c = sizes.size();
  const double lo = std::log(kOddsMin), hi = std::log(kOddsMax);

  // Parameters: log-odds of every nonempty section except the first one.
  std::vector<std::size_t> free_idx;
  bool have_ref = false;
  for (std::size_t k = 0; k < c; ++k) {
    if (sizes[k] == 0) continue;
    if (!have_ref) {
      have_ref = true;
      continue;
    }
    free_idx.push_back(k);
  }
  const Index p = static_cast<Index>(free_idx.size());

  std::vector<double> theta(c, 0.0);
  auto eval = [&](const std::vector<double>& th) { return moments(counts, sizes, th, n); };

  NoncentralFit fit;
  Moments cur = eval(theta);
  constexpr double kBoundEps = 1e-12;
  constexpr double kFdStep = 1e-5;

  for (int it = 1; it <= 500 && p > 0; ++it) {
    fit.iterations = it;
    VectorXd g(p);
    for (Index a = 0; a < p; ++a) {
      const std::size_t k = free_idx[static_cast<std::size_t>(a)];
      g(a) = counts[k] - cur.mean(static_cast<Index>(k));
    }
    std::vector<Index> active;
    for (Index a = 0; a < p; ++a) {
      const double th = theta[free_idx[static_cast<std::size_t>(a)]];
      const bool pinned = (th <= lo + kBoundEps && g(a) < 0) || (th >= hi - kBoundEps && g(a) > 0);
      if (!pinned) active.push_back(a);
    }
    if (active.empty()) break;
    const Index f = static_cast<Index>(active.size());
    VectorXd gf(f);
    for (Index a = 0; a < f; ++a) gf(a) = g(active[static_cast<std::size_t>(a)]);
    if (gf.cwiseAbs().maxCoeff() < 1e-13) break;

    // Fisher information = Cov(X), the derivative of the mean in log-odds.
    MatrixXd h(f, f);
    for (Index b = 0; b < f; ++b) {
      const std::size_t kb = free_idx[static_cast<std::size_t>(active[static_cast<std::size_t>(b)])];
      std::vector<double> up = theta, dn = theta;
      up[kb] += kFdStep;
      dn[kb] -= kFdStep;
      const VectorXd mu = eval(up).mean, md = eval(dn).mean;
      for (Index a = 0; a < f; ++a) {
        const auto ka = static_cast<Index>(free_idx[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])]);
        h(a, b) = (mu(ka) - md(ka)) / (2 * kFdStep);
      }
    }
    h = (0.5 * (h + h.transpose())).eval();
    h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
    const VectorXd step = h.ldlt().solve(gf);

    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial = theta;
    Moments next;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      trial = theta;
      for (Index a = 0; a < f; ++a) {
        const std::size_t k = free_idx[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
        trial[k] = std::clamp(theta[k] + alpha * step(a), lo, hi);
      }
      next = eval(trial);
      if (next.loglik >= cur.loglik) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double gain = next.loglik - cur.loglik;
    theta = trial;
    cur = std::move(next);
    if (gain < 1e-12) break;
  }

  fit.log_likelihood = cur.loglik;
  fit.omega.resize(static_cast<Index>(c));
  fit.clamped.assign(c, 0);
  for (std::size_t k = 0; k < c; ++k) {
    fit.omega(static_cast<Index>(k)) = std::exp(theta[k]);
    fit.clamped[k] = (theta[k] <= lo + 1e-9 || theta[k] >= hi - 1e-9) ? 1 : 0;
  }
  return fit;
}

double chi_square_critical_5pct(int df) {
  if (df < 1) throw ValidationError("chi-square needs df >= 1");
  if (df == kVarietyDf8Sections) return kVarietyCritical7;
  return boost::math::quantile(boost::math::chi_squared(df), 0.95);
}

VarietyTestResult variety_llr(std::span<const int> counts, std::span<const int> sizes, int n) {
  check_feasible(counts, sizes, n);
  VarietyTestResult out;
  out.counts.assign(counts.begin(), counts.end());
  out.sizes.assign(sizes.begin(), sizes.end());
  out.n = n;
  const int nonempty = static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](int m) { return m > 0; }));
  out.df = std::max(0, nonempty - 1);
  out.critical_value = out.df > 0 ? chi_square_critical_5pct(out.df) : 0.0;
  out.omega = VectorXd::Ones(static_cast<Index>(sizes.size()));
  if (n == 0 || out.df == 0) return out;

  out.applicable = true;
  const NoncentralFit fit = fit_noncentral_weights(counts, sizes, n);
  out.omega = fit.omega;
  out.clamped = fit.any_clamped();
  out.log_likelihood_alt = fit.log_likelihood;
  const std::vector<double> zero(sizes.size(), 0.0);
  out.log_likelihood_null = fnc_log_likelihood(counts, sizes, zero);
  out.statistic = std::max(0.0, 2.0 * (out.log_likelihood_alt - out.log_likelihood_null));
  out.significant = out.statistic > out.critical_value;
  return out;
}

namespace {

std::vector<std::string> sections_of_fields(const Labels& fields, const CodeHierarchy& hierarchy) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(fields.size()));
  for (const auto& code : fields.names()) {
    if (!hierarchy.contains(code)) throw ValidationError("field does not map to a section: " + code);
    out.push_back(hierarchy.section_of(code));
  }
  return out;
}

}  // namespace

VarietyTestResult variety_test(const AcsDecomposition& decomp, const CodeHierarchy& hierarchy) {
  const auto field_section = sections_of_fields(decomp.fields, hierarchy);
  const auto sections = hierarchy.sections();
  std::map<std::string, std::size_t> slot;
  for (std::size_t s = 0; s < sections.size(); ++s) slot[sections[s]] = s;

  std::vector<int> counts(sections.size(), 0), sizes(sections.size(), 0);
  for (std::size_t i = 0; i < field_section.size(); ++i) {
    const std::size_t s = slot.at(field_section[i]);
    ++sizes[s];
    if (decomp.roles[i] != NodeRole::Outside) ++counts[s];
  }
  VarietyTestResult out = variety_llr(counts, sizes, static_cast<int>(decomp.acs_size()));
  out.year = decomp.year;
  out.sections = sections;
  return out;
}

// ---------------------------------------------------------------- sections

MixingRow section_mixing(const TechnologyNetwork& net, const CodeHierarchy& hierarchy) {
  const auto sec = sections_of_fields(net.fields, hierarchy);
  MixingRow row;
  row.year = net.year;
  for (Index j = 0; j < net.size(); ++j) {
    for (Index i = 0; i < net.size(); ++i) {
      if (!net.c(i, j)) continue;
      if (sec[static_cast<std::size_t>(i)] == sec[static_cast<std::size_t>(j)]) ++row.within;
      else ++row.between;
    }
  }
  return row;
}

OrderedAdjacency ordered_adjacency(const TechnologyNetwork& net, const CodeHierarchy& hierarchy) {
  const auto sec = sections_of_fields(net.fields, hierarchy);
  const Index n = net.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Section first so blocks stay contiguous even for codes that do not start
  // with their section's name; for IPC codes this is plain code order.
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto& sa = sec[static_cast<std::size_t>(a)];
    const auto& sb = sec[static_cast<std::size_t>(b)];
    return sa != sb ? sa < sb : net.fields[a] < net.fields[b];
  });

  OrderedAdjacency out;
  out.year = net.year;
  out.grid.resize(n, n);
  for (Index r = 0; r < n; ++r) {
    out.codes.push_back(net.fields[order[static_cast<std::size_t>(r)]]);
    for (Index s = 0; s < n; ++s) out.grid(r, s) = net.c(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(s)]);
  }
  for (Index r = 0; r < n; ++r) {
    const auto& s = sec[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    if (out.blocks.empty() || out.blocks.back().section != s) out.blocks.push_back({s, r, r});
    out.blocks.back().end = r + 1;
  }
  return out;
}

std::vector<SectionOccupancy> section_occupancy(const AcsDecomposition& decomp, const CodeHierarchy& hierarchy) {
  const auto field_section = sections_of_fields(decomp.fields, hierarchy);
  std::vector<SectionOccupancy> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& s : hierarchy.sections()) {
    slot[s] = out.size();
    SectionOccupancy row;
    row.section = s;
    out.push_back(std::move(row));
  }
  int acs_total = 0, outside_total = 0;
  for (std::size_t i = 0; i < field_section.size(); ++i) {
    auto& row = out[slot.at(field_section[i])];
    ++row.size;
    if (decomp.roles[i] != NodeRole::Outside) {
      ++row.in_acs;
      ++acs_total;
    } else {
      ++row.outside_acs;
      ++outside_total;
    }
  }
  for (auto& row : out) {
    if (acs_total > 0) row.share_in_acs = static_cast<double>(row.in_acs) / acs_total;
    if (outside_total > 0) row.share_outside_acs = static_cast<double>(row.outside_acs) / outside_total;
    if (row.size > 0) row.fraction_in_acs = static_cast<double>(row.in_acs) / row.size;
  }
  return out;
}

}  // namespace acnet
