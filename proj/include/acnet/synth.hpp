#pragma once

#include "acnet/core.hpp"
#include "acnet/hierarchy.hpp"
#include "acnet/ingest.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace acnet {

struct SynthConfig {
  int n_regions = 200;
  int n_fields = 30;
  int n_sections = 5;
  int year_start = 1980;
  int n_years = 25;
  double p_base = 0.02;
  double beta = 20.0;
  std::vector<std::pair<int, int>> pairs;  // planted catalytic links source -> target (field indices)
  double families_per_presence = 1.0;      // mean; each presence emits 1 + Poisson(mean - 1)
  std::uint64_t seed = 1;

  int year_end() const { return year_start + n_years - 1; }

  // Throws ValidationError for out-of-range values or pairs naming unknown fields.
  void validate() const;
};

// Planted directed cycle f[0] -> f[1] -> ... -> f[0].
std::vector<std::pair<int, int>> planted_cycle(const std::vector<int>& fields);

struct SynthData {
  SynthConfig config;
  CodeHierarchy hierarchy;   // sections "A", "B", ...; fields like "A01"
  Labels fields;
  Labels regions;
  std::vector<EventRecord> events;                         // sorted
  std::vector<std::pair<std::string, std::string>> truth;  // planted links as codes
  std::vector<Mask> presences;                             // generating presence matrix per year
};

// Field i belongs to section floor(i * n_sections / n_fields), so sections are
// contiguous blocks whose sizes differ by at most one.
std::vector<std::string> synth_field_codes(int n_fields, int n_sections);

// Markov presence process: field j is present in region r at year t+1 with
// probability min(1, p_base * beta) if some planted source of j was present in
// r at t, and p_base otherwise. Deterministic in the config.
SynthData generate_events(const SynthConfig& config);

// "key=value" lines, readable back by read_synth_config.
void write_synth_config(std::ostream& out, const SynthConfig& config);
SynthConfig read_synth_config(std::istream& in);

}  // namespace acnet
