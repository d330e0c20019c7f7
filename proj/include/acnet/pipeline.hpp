#pragma once

#include "acnet/filter.hpp"
#include "acnet/hierarchy.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace acnet {

enum class FitnessMode { Count, Split };

FitnessMode parse_fitness_mode(const std::string& name);
std::string to_string(FitnessMode mode);

struct RunConfig {
  std::filesystem::path events;
  std::filesystem::path hierarchy;  // empty: derive an IPC tree from the event codes
  std::filesystem::path regions;    // optional region -> country table
  std::filesystem::path out_dir = "acnet_out";
  int year_min = 1980;
  int year_max = 2011;
  int lag = 1;
  Level granularity = Level::Class;
  int replicates = 1000;
  double q = 0.05;
  Correction correction = Correction::BenjaminiHochberg;
  bool include_diagonal = false;
  std::uint64_t seed = 1;
  FitnessMode fitness = FitnessMode::Count;
  bool dump_replicates = false;
  char delimiter = ',';
  unsigned workers = 1;  // never recorded: results do not depend on it

  // Throws ValidationError for an empty year range, no year pair, K < 1 or q outside (0, 1).
  void validate() const;
};

// SHA-256 of a file's bytes as lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

// IPC tree (section, class, subclass) over every code in the event file's
// "code" column.
CodeHierarchy derive_ipc_hierarchy(std::istream& events, char delimiter = ',');

struct RunSummary {
  std::filesystem::path manifest;
  std::vector<int> years;  // base years processed
  std::size_t artifacts = 0;
};

// Runs every year pair (t, t + lag) with t + lag <= year_max through
// occurrence, RCA, assist, null model, filter, decomposition and statistics,
// writing artifacts under out_dir and a manifest.json with the full config,
// versions, seeds and per-artifact checksums. On failure the manifest records
// status "incomplete" with the failing stage and year before rethrowing.
RunSummary run_pipeline(const RunConfig& config);

}  // namespace acnet
