#pragma once

#include "acnet/acs.hpp"
#include "acnet/core.hpp"
#include "acnet/hierarchy.hpp"
#include "acnet/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acnet {

// ---------------------------------------------------------------- fitness

// Number of distinct families active in `year` whose codes include `field`.
int field_fitness(std::span<const EventRecord> records, int year, const std::string& field);

// field_fitness for every label at once.
VectorXd fitness_vector(std::span<const EventRecord> records, int year, const Labels& fields);

// Weight-split alternative: column sums of the year's occurrence matrix.
VectorXd split_fitness_vector(const OccurrenceMatrix& w, const Labels& fields);

struct SubsetFitness {
  std::string subset;              // core, periphery, acs, rest
  std::size_t nodes = 0;
  double total = 0.0;
  std::optional<double> average;   // absent for empty subsets
  double share_of_total = 0.0;
  double share_of_nodes = 0.0;
};

struct FitnessRow {
  int year = 0;
  double network_total = 0.0;
  std::vector<SubsetFitness> subsets;

  const SubsetFitness& at(const std::string& subset) const;
};

FitnessRow subset_fitness(const AcsDecomposition& decomp, const VectorXd& fitness);

// ---------------------------------------------------------------- variety

// Multivariate Fisher noncentral hypergeometric distribution over sections:
//   P(x) = prod_k C(m_k, x_k) w_k^x_k / P0,
// where P0 is the z^n coefficient of prod_k sum_x C(m_k, x) w_k^x z^x. All
// arithmetic runs in log space so large odds and sizes do not overflow.
double fnc_log_normalizer(std::span<const int> sizes, std::span<const double> log_odds, int n);
double fnc_log_likelihood(std::span<const int> counts, std::span<const int> sizes,
                          std::span<const double> log_odds);

inline constexpr double kOddsMin = 1e-6;
inline constexpr double kOddsMax = 1e6;

struct NoncentralFit {
  VectorXd omega;              // one per section, omega of the reference section is 1
  double log_likelihood = 0.0;
  std::vector<char> clamped;   // odds pinned at kOddsMin or kOddsMax
  int iterations = 0;

  bool any_clamped() const;
};

// Maximum-likelihood odds with the first nonempty section as reference.
// Projected Newton on the concave log-likelihood in log-odds, box-constrained
// to [kOddsMin, kOddsMax]; stops when the log-likelihood gain drops below
// 1e-10. Throws ValidationError for infeasible counts.
NoncentralFit fit_noncentral_weights(std::span<const int> counts, std::span<const int> sizes, int n);

// 5% critical value of chi-square with 7 degrees of freedom (eight sections
// minus the reference).
inline constexpr double kVarietyCritical7 = 14.07;
inline constexpr int kVarietyDf8Sections = 7;

struct VarietyTestResult {
  int year = 0;
  std::vector<std::string> sections;
  std::vector<int> counts;
  std::vector<int> sizes;
  int n = 0;
  bool applicable = false;       // false when the ACS is empty
  VectorXd omega;
  double log_likelihood_alt = 0.0;
  double log_likelihood_null = 0.0;
  double statistic = 0.0;        // G = 2 (l(omega_hat) - l(1))
  int df = 0;
  double critical_value = 0.0;
  bool significant = false;
  bool clamped = false;
};

// 5% chi-square critical value; exactly kVarietyCritical7 for df = 7.
double chi_square_critical_5pct(int df);

VarietyTestResult variety_llr(std::span<const int> counts, std::span<const int> sizes, int n);

// Per-section counts of the decomposition's ACS members (core and periphery).
VarietyTestResult variety_test(const AcsDecomposition& decomp, const CodeHierarchy& hierarchy);

// ---------------------------------------------------------------- sections

struct MixingRow {
  int year = 0;
  int within = 0;
  int between = 0;
  int total() const { return within + between; }
};

struct SectionBlock {
  std::string section;
  Index begin = 0;  // first row/column in the ordered grid
  Index end = 0;    // one past the last
};

// Adjacency with rows and columns sorted by code, so sections are contiguous.
struct OrderedAdjacency {
  int year = 0;
  std::vector<std::string> codes;
  Mask grid;
  std::vector<SectionBlock> blocks;
};

// Throws ValidationError when a field does not map to a section.
MixingRow section_mixing(const TechnologyNetwork& net, const CodeHierarchy& hierarchy);
OrderedAdjacency ordered_adjacency(const TechnologyNetwork& net, const CodeHierarchy& hierarchy);

struct SectionOccupancy {
  std::string section;
  int size = 0;
  int in_acs = 0;
  int outside_acs = 0;
  std::optional<double> share_in_acs;       // in_acs / |ACS|
  std::optional<double> share_outside_acs;  // outside_acs / |not ACS|
  std::optional<double> fraction_in_acs;    // in_acs / size
};

std::vector<SectionOccupancy> section_occupancy(const AcsDecomposition& decomp, const CodeHierarchy& hierarchy);

}  // namespace acnet
