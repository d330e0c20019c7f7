#pragma once

#include "acnet/core.hpp"
#include "acnet/nullmodel.hpp"

#include <span>
#include <utility>
#include <vector>

namespace acnet {

// Binary directed network of fields: c(i, j) = 1 means a link from source i to
// receiver j.
struct TechnologyNetwork {
  int year = 0;
  Labels fields;
  Mask c;
  double q = 0.05;
  bool include_diagonal = false;
  int tested_pairs = 0;

  Index size() const { return c.rows(); }
  int edge_count() const { return c.cast<int>().sum(); }

  // Convenience for tests and tools: n anonymous fields "0".."n-1".
  static TechnologyNetwork from_edges(Index n, const std::vector<std::pair<Index, Index>>& edges);
};

// Benjamini-Hochberg step-up: with p sorted ascending, find the largest k such
// that p_(k) <= k q / m and reject every hypothesis with p <= p_(k). Returns a
// flag per input p-value. Throws ValidationError unless 0 < q < 1.
std::vector<char> bh_reject(std::span<const double> pvalues, double q);

struct PairPvalue {
  Index source = 0;
  Index target = 0;
  double p = 1.0;
};

// Significant pairs, sorted lexicographically by (source, target).
std::vector<std::pair<Index, Index>> bh_fdr(std::span<const PairPvalue> tests, double q);

enum class Correction { BenjaminiHochberg, Bonferroni, Uncorrected };

Correction parse_correction(const std::string& name);
std::string to_string(Correction c);

struct FilterOptions {
  double q = 0.05;
  bool include_diagonal = false;
  Correction correction = Correction::BenjaminiHochberg;
};

// Tests every (i, j) with u_i(t) > 0 (and i != j unless include_diagonal).
// Passing an empty `ubiquity` tests all rows.
TechnologyNetwork build_adjacency(const PvalueMatrix& pvalues, const Vector<int>& ubiquity,
                                  const FilterOptions& options = {});

}  // namespace acnet
