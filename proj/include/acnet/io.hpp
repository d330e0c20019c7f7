#pragma once

#include "acnet/acs.hpp"
#include "acnet/assist.hpp"
#include "acnet/dynamics.hpp"
#include "acnet/filter.hpp"
#include "acnet/ingest.hpp"
#include "acnet/nullmodel.hpp"
#include "acnet/rca.hpp"
#include "acnet/stats.hpp"

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

// Plain-text artifact formats. Every writer emits its header line; numbers use
// the shortest round-trip representation, so reading back is exact.
namespace acnet {

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

// family_id,year,region_id,code
void write_events(std::ostream& out, std::span<const EventRecord> events);

// One label per line.
void write_labels(std::ostream& out, const Labels& labels);
Labels read_labels(std::istream& in);

// year,region,field,weight sorted by (region, field) within each year.
void write_occurrence_header(std::ostream& out);
void write_occurrence(std::ostream& out, const OccurrenceMatrix& w);
std::map<int, OccurrenceMatrix> read_occurrence(std::istream& in);

// year,region,field for presences only.
void write_presence_header(std::ostream& out);
void write_presence(std::ostream& out, const PresenceMatrix& m);
std::map<int, PresenceMatrix> read_presence(std::istream& in, const Labels& regions, const Labels& fields);

// Dense field x field matrix: "# key=value" metadata lines, a header
// "field,<code>,...", then one "<code>,v,..." row per field.
struct DenseTable {
  std::map<std::string, std::string> meta;
  Labels labels;
  MatrixXd values;

  int meta_int(const std::string& key) const;
};
void write_dense(std::ostream& out, const Labels& labels, const MatrixXd& values,
                 const std::vector<std::pair<std::string, std::string>>& meta);
DenseTable read_dense(std::istream& in);

// Assist matrix plus its "kind,label,value" sidecar with d (per region, at
// t + lag) and u (per field, at t).
void write_assist(std::ostream& out, const AssistMatrix& b);
void write_assist_sidecar(std::ostream& out, const AssistMatrix& b);
AssistMatrix read_assist(std::istream& matrix, std::istream& sidecar);
// Just the u rows of a sidecar, in the order of `fields`.
Vector<int> read_ubiquity(std::istream& sidecar, const Labels& fields);

void write_pvalues(std::ostream& out, const PvalueMatrix& p);
PvalueMatrix read_pvalues(std::istream& in);

// replicate,mean_weight,nonzero_links,presences_t,presences_next
void write_replicate_summaries(std::ostream& out, std::span<const ReplicateSummary> rows);

// year,source_field,target_field ordered by (source, target) code.
void write_edges_header(std::ostream& out);
void write_edges(std::ostream& out, const TechnologyNetwork& net);
// One network per year found in the file over the given field axis.
std::map<int, TechnologyNetwork> read_edges(std::istream& in, const Labels& fields);

// year,field,label with label in {core, periphery, outside}.
void write_decomposition_header(std::ostream& out);
void write_decomposition(std::ostream& out, const AcsDecomposition& d);
// year,lambda1,core,periphery,acs,n_acs
void write_acs_summary_header(std::ostream& out);
void write_acs_summary(std::ostream& out, const AcsDecomposition& d);

// t,field,y
void write_trajectory(std::ostream& out, const Trajectory& traj, const Labels& fields);

// Tidy rows year,subset_or_section,metric,value. Absent values are omitted.
void write_stats_header(std::ostream& out);
void write_fitness_rows(std::ostream& out, const FitnessRow& row);
void write_variety_rows(std::ostream& out, const VarietyTestResult& v);
void write_mixing_rows(std::ostream& out, const MixingRow& m);
void write_occupancy_rows(std::ostream& out, int year, std::span<const SectionOccupancy> rows);

// Heatmap grid: header of codes, then one 0/1 row per code; sidecar
// section,begin,end with half-open row ranges.
void write_heatmap(std::ostream& out, const OrderedAdjacency& adj);
void write_heatmap_sections(std::ostream& out, const OrderedAdjacency& adj);

}  // namespace acnet
