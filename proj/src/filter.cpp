#include "acnet/filter.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace acnet {

TechnologyNetwork TechnologyNetwork::from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  TechnologyNetwork net;
  std::vector<std::string> names;
  for (Index i = 0; i < n; ++i) names.push_back(std::to_string(i));
  net.fields = Labels(std::move(names));
  net.c = Mask::Zero(n, n);
  for (const auto& [s, t] : edges) {
    if (s < 0 || s >= n || t < 0 || t >= n) throw ValidationError("edge endpoint out of range");
    net.c(s, t) = 1;
  }
  return net;
}

std::vector<char> bh_reject(std::span<const double> pvalues, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("FDR level q must lie in (0, 1)");
  const std::size_t m = pvalues.size();
  std::vector<char> reject(m, 0);
  if (m == 0) return reject;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

  std::size_t k_max = 0;  // 1-based rank of the last rejection, 0 for none
  for (std::size_t k = m; k >= 1; --k) {
    if (pvalues[order[k - 1]] <= static_cast<double>(k) * q / static_cast<double>(m)) {
      k_max = k;
      break;
    }
  }
  if (k_max == 0) return reject;
  // Ties with p_(k) share its rank.
  const double cutoff = pvalues[order[k_max - 1]];
  for (std::size_t i = 0; i < m; ++i) reject[i] = pvalues[i] <= cutoff ? 1 : 0;
  return reject;
}

std::vector<std::pair<Index, Index>> bh_fdr(std::span<const PairPvalue> tests, double q) {
  std::vector<double> p(tests.size());
  for (std::size_t i = 0; i < tests.size(); ++i) p[i] = tests[i].p;
  const auto reject = bh_reject(p, q);
  std::vector<std::pair<Index, Index>> out;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    if (reject[i]) out.emplace_back(tests[i].source, tests[i].target);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Correction parse_correction(const std::string& name) {
  if (name == "bh") return Correction::BenjaminiHochberg;
  if (name == "bonferroni") return Correction::Bonferroni;
  if (name == "none") return Correction::Uncorrected;
  throw ValidationError("unknown correction '" + name + "' (expected bh, bonferroni or none)");
}

std::string to_string(Correction c) {
  switch (c) {
    case Correction::BenjaminiHochberg: return "bh";
    case Correction::Bonferroni: return "bonferroni";
    case Correction::Uncorrected: return "none";
  }
  return "unknown";
}

TechnologyNetwork build_adjacency(const PvalueMatrix& pvalues, const Vector<int>& ubiquity,
                                  const FilterOptions& options) {
  if (!(options.q > 0.0 && options.q < 1.0)) throw ValidationError("FDR level q must lie in (0, 1)");
  const Index n = pvalues.p.rows();
  if (pvalues.p.cols() != n) throw ValidationError("p-value matrix must be square");
  if (ubiquity.size() != 0 && ubiquity.size() != n) throw ValidationError("ubiquity length mismatch");

  std::vector<PairPvalue> tests;
  for (Index i = 0; i < n; ++i) {
    if (ubiquity.size() != 0 && ubiquity(i) == 0) continue;
    for (Index j = 0; j < n; ++j) {
      if (i == j && !options.include_diagonal) continue;
      tests.push_back({i, j, pvalues.p(i, j)});
    }
  }

  TechnologyNetwork net;
  net.year = pvalues.base_year;
  net.fields = pvalues.fields;
  net.c = Mask::Zero(n, n);
  net.q = options.q;
  net.include_diagonal = options.include_diagonal;
  net.tested_pairs = static_cast<int>(tests.size());

  const double m = static_cast<double>(tests.size());
  switch (options.correction) {
    case Correction::BenjaminiHochberg:
      for (const auto& [s, t] : bh_fdr(tests, options.q)) net.c(s, t) = 1;
      break;
    case Correction::Bonferroni:
      for (const auto& t : tests) net.c(t.source, t.target) = t.p <= options.q / m ? 1 : 0;
      break;
    case Correction::Uncorrected:
      for (const auto& t : tests) net.c(t.source, t.target) = t.p <= options.q ? 1 : 0;
      break;
  }
  return net;
}

}  // namespace acnet
