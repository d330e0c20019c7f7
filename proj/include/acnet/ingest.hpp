#pragma once

#include "acnet/core.hpp"
#include "acnet/hierarchy.hpp"

#include <compare>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace acnet {

// One (family, year, region, code) attribution. `code` is already resolved to
// the configured granularity.
struct EventRecord {
  std::string family_id;
  int year = 0;
  std::string region_id;
  std::string code;

  auto operator<=>(const EventRecord&) const = default;
};

// Lookup table region_id -> country. Regions are taken as-is; this only lets
// callers validate identifiers or aggregate to country level.
class RegionTable {
 public:
  static RegionTable read(std::istream& in, char delimiter = ',');
  void add(const std::string& region, const std::string& country);
  bool contains(const std::string& region) const { return country_.count(region) != 0; }
  const std::string& country_of(const std::string& region) const;
  std::size_t size() const { return country_.size(); }

 private:
  std::map<std::string, std::string> country_;
};

enum class RegionLevel { Region, Country };

struct IngestOptions {
  Level granularity = Level::Class;
  int year_min = 1980;
  int year_max = 2011;
  char delimiter = ',';
  const RegionTable* regions = nullptr;  // optional
  RegionLevel region_level = RegionLevel::Region;
};

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParseReport {
  std::vector<EventRecord> records;  // sorted and deduplicated
  std::vector<LineIssue> malformed;  // structurally broken lines
  std::vector<LineIssue> rejected;   // well-formed but out of range / unknown code / unknown region
  std::size_t duplicates_collapsed = 0;

  std::size_t error_count() const { return malformed.size() + rejected.size(); }
};

// Parses delimiter-separated text with a header naming the columns
// family_id, year, region_id, code (any order, extra columns ignored).
ParseReport parse_events(std::istream& in, const CodeHierarchy& hierarchy, const IngestOptions& options);

struct WeightedCell {
  std::string region_id;
  std::string field;
  double weight = 0.0;

  bool operator==(const WeightedCell&) const = default;
};

// Splits one family-year's unit weight evenly over its unique (region, field)
// pairs. All records must share family_id and year.
std::vector<WeightedCell> split_family_weights(std::span<const EventRecord> family_records);

// Sparse nonnegative region x field weight matrix for one year.
struct OccurrenceMatrix {
  int year = 0;
  std::map<std::pair<std::string, std::string>, double> entries;  // (region, field) -> weight
  std::size_t family_count = 0;

  double total() const;
  bool operator==(const OccurrenceMatrix&) const = default;
};

OccurrenceMatrix build_occurrence_matrix(std::span<const EventRecord> records, int year);

// One matrix per year in [year_min, year_max]; years without records are empty.
std::map<int, OccurrenceMatrix> build_occurrence_matrices(std::span<const EventRecord> records,
                                                          int year_min, int year_max);

MatrixXd to_dense(const OccurrenceMatrix& w, const Labels& regions, const Labels& fields);

// Region labels appearing anywhere in the records, sorted.
Labels collect_regions(std::span<const EventRecord> records);

}  // namespace acnet
