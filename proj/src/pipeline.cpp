#include "acnet/pipeline.hpp"

#include "acnet/acs.hpp"
#include "acnet/assist.hpp"
#include "acnet/ingest.hpp"
#include "acnet/io.hpp"
#include "acnet/nullmodel.hpp"
#include "acnet/rca.hpp"
#include "acnet/stats.hpp"
#include "text.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <Eigen/Core>

#include <array>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>

namespace acnet {

namespace fs = std::filesystem;
using json = nlohmann::json;

FitnessMode parse_fitness_mode(const std::string& name) {
  if (name == "count") return FitnessMode::Count;
  if (name == "split") return FitnessMode::Split;
  throw ValidationError("fitness mode must be count or split, got '" + name + "'");
}

std::string to_string(FitnessMode mode) { return mode == FitnessMode::Count ? "count" : "split"; }

void RunConfig::validate() const {
  if (events.empty()) throw ValidationError("no event file given");
  if (year_min > year_max) throw ValidationError("empty year range");
  if (lag < 1) throw ValidationError("lag must be at least 1");
  if (year_min + lag > year_max) throw ValidationError("year range holds no (t, t+lag) pair");
  if (replicates < 1) throw ValidationError("replicates must be at least 1");
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must lie in (0, 1)");
  if (granularity == Level::Section) throw ValidationError("granularity must be class or subclass");
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw ComputeError("sha256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

CodeHierarchy derive_ipc_hierarchy(std::istream& events, char delimiter) {
  std::string line;
  int col = -1;
  std::set<std::string> codes;
  while (std::getline(events, line)) {
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, delimiter);
    if (col < 0) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (text::trim(cols[c]) == "code") col = static_cast<int>(c);
      }
      if (col < 0) throw ValidationError("event file header lacks a 'code' column");
      continue;
    }
    if (static_cast<int>(cols.size()) <= col) continue;
    auto code = text::normalize_code(cols[static_cast<std::size_t>(col)]);
    if (!code.empty()) codes.insert(std::move(code));
  }
  return CodeHierarchy::from_ipc_codes({codes.begin(), codes.end()});
}

namespace {

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

json config_json(const RunConfig& c) {
  json j;
  j["events"] = c.events.generic_string();
  j["hierarchy"] = c.hierarchy.empty() ? "derived-ipc" : c.hierarchy.generic_string();
  j["regions"] = c.regions.generic_string();
  j["year_min"] = c.year_min;
  j["year_max"] = c.year_max;
  j["lag"] = c.lag;
  j["granularity"] = to_string(c.granularity);
  j["replicates"] = c.replicates;
  j["q"] = c.q;
  j["correction"] = to_string(c.correction);
  j["include_diagonal"] = c.include_diagonal;
  j["seed"] = c.seed;
  j["fitness"] = to_string(c.fitness);
  j["dump_replicates"] = c.dump_replicates;
  j["delimiter"] = std::string(1, c.delimiter);
  j["rca_inequality"] = "strict";
  j["pvalue"] = "add-one upper tail, ties within 1e-13 count as exceedances";
  j["bicm"] = {{"tol", BicmOptions{}.tol}, {"max_iter", BicmOptions{}.max_iter}, {"damping", BicmOptions{}.damping}};
  j["perron_frobenius"] = {{"tol", PfOptions{}.tol}, {"max_iter", PfOptions{}.max_iter}};
  return j;
}

// Artifacts written so far, relative to out_dir in creation order.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path root) : root_(std::move(root)) {}

  std::ofstream open(const std::string& rel) {
    paths_.insert(rel);
    return open_output(root_ / rel);
  }

  json checksums() const {
    json j = json::object();
    for (const auto& rel : paths_) {
      if (fs::exists(root_ / rel)) j[rel] = sha256_file(root_ / rel);
    }
    return j;
  }
  std::size_t size() const { return paths_.size(); }

 private:
  fs::path root_;
  std::set<std::string> paths_;
};

void write_manifest(const fs::path& path, const json& manifest) {
  std::ofstream out = open_output(path);
  out << manifest.dump(2) << '\n';
}

}  // namespace

RunSummary run_pipeline(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  ArtifactSet artifacts(config.out_dir);

  json manifest;
  manifest["tool"] = "acnet";
  manifest["versions"] = {{"acnet", ACNET_VERSION}, {"eigen", eigen_version()}};
  manifest["config"] = config_json(config);
  manifest["seeds"] = {{"master", config.seed},
                       {"null_substream_key", "(master, base_year, lag, replicate, 0 for t | 1 for t+lag)"}};

  std::string stage = "ingest";
  std::optional<int> stage_year;
  RunSummary summary;
  summary.manifest = config.out_dir / "manifest.json";

  try {
    CodeHierarchy hierarchy;
    if (config.hierarchy.empty()) {
      auto in = open_input(config.events);
      hierarchy = derive_ipc_hierarchy(in, config.delimiter);
    } else {
      auto in = open_input(config.hierarchy);
      hierarchy = CodeHierarchy::read(in);
    }
    hierarchy.validate();

    std::optional<RegionTable> regions_table;
    if (!config.regions.empty()) {
      auto in = open_input(config.regions);
      regions_table = RegionTable::read(in);
    }

    IngestOptions iopt;
    iopt.granularity = config.granularity;
    iopt.year_min = config.year_min;
    iopt.year_max = config.year_max;
    iopt.delimiter = config.delimiter;
    iopt.regions = regions_table ? &*regions_table : nullptr;
    ParseReport report;
    {
      auto in = open_input(config.events);
      report = parse_events(in, hierarchy, iopt);
    }
    manifest["ingest"] = {{"records", report.records.size()},
                          {"malformed_lines", report.malformed.size()},
                          {"rejected_lines", report.rejected.size()},
                          {"duplicates_collapsed", report.duplicates_collapsed}};
    {
      auto out = artifacts.open("ingest_issues.csv");
      out << "line,kind,message\n";
      for (const auto& i : report.malformed) out << i.line << ",malformed," << i.message << '\n';
      for (const auto& i : report.rejected) out << i.line << ",rejected," << i.message << '\n';
    }

    const Labels fields(hierarchy.codes_at(config.granularity));
    const Labels regions = collect_regions(report.records);
    if (fields.empty()) throw ValidationError("hierarchy has no codes at the requested granularity");
    if (regions.empty()) throw ValidationError("no events in the year range");
    {
      auto out = artifacts.open("fields.txt");
      write_labels(out, fields);
    }
    {
      auto out = artifacts.open("regions.txt");
      write_labels(out, regions);
    }
    {
      auto out = artifacts.open("hierarchy.csv");
      hierarchy.write(out);
    }

    stage = "occurrence";
    const auto occurrence = build_occurrence_matrices(report.records, config.year_min, config.year_max);
    {
      auto out = artifacts.open("occurrence.csv");
      write_occurrence_header(out);
      for (const auto& [year, w] : occurrence) write_occurrence(out, w);
    }

    stage = "rca";
    std::map<int, PresenceMatrix> presence;
    {
      auto out = artifacts.open("presence.csv");
      write_presence_header(out);
      for (const auto& [year, w] : occurrence) {
        stage_year = year;
        presence.emplace(year, binarize_rca(w, regions, fields));
        write_presence(out, presence.at(year));
      }
    }

    auto edges_out = artifacts.open("edges.csv");
    write_edges_header(edges_out);
    auto decomp_out = artifacts.open("decomposition.csv");
    write_decomposition_header(decomp_out);
    auto summary_out = artifacts.open("acs_summary.csv");
    write_acs_summary_header(summary_out);
    auto stats_out = artifacts.open("stats.csv");
    write_stats_header(stats_out);

    std::map<int, BicmParameters> bicm;
    auto fitted = [&](int year) -> const BicmParameters& {
      auto it = bicm.find(year);
      if (it == bicm.end()) it = bicm.emplace(year, fit_bicm(presence.at(year).m)).first;
      return it->second;
    };

    char name[64];
    for (int t = config.year_min; t + config.lag <= config.year_max; ++t) {
      stage_year = t;
      stage = "assist";
      const AssistMatrix b = assist_matrix(presence.at(t), presence.at(t + config.lag));
      std::snprintf(name, sizeof name, "assist/assist_%d.csv", t);
      {
        auto out = artifacts.open(name);
        write_assist(out, b);
      }
      std::snprintf(name, sizeof name, "assist/assist_%d_du.csv", t);
      {
        auto out = artifacts.open(name);
        write_assist_sidecar(out, b);
      }

      stage = "nulls";
      NullEnsembleOptions nopt;
      nopt.replicates = config.replicates;
      nopt.master_seed = config.seed;
      nopt.base_year = t;
      nopt.lag = config.lag;
      nopt.workers = config.workers;
      std::vector<ReplicateSummary> reps;
      const PvalueMatrix p = null_pvalues(b, fitted(t), fitted(t + config.lag), nopt,
                                          config.dump_replicates ? &reps : nullptr);
      std::snprintf(name, sizeof name, "pvalues/pvalues_%d.csv", t);
      {
        auto out = artifacts.open(name);
        write_pvalues(out, p);
      }
      if (config.dump_replicates) {
        std::snprintf(name, sizeof name, "pvalues/replicates_%d.csv", t);
        auto out = artifacts.open(name);
        write_replicate_summaries(out, reps);
      }
      bicm.erase(t);

      stage = "filter";
      FilterOptions fopt;
      fopt.q = config.q;
      fopt.include_diagonal = config.include_diagonal;
      fopt.correction = config.correction;
      const TechnologyNetwork net = build_adjacency(p, b.u, fopt);
      write_edges(edges_out, net);

      stage = "acs";
      const AcsDecomposition d = decompose(net);
      write_decomposition(decomp_out, d);
      write_acs_summary(summary_out, d);

      stage = "stats";
      const VectorXd fitness = config.fitness == FitnessMode::Count
                                   ? fitness_vector(report.records, t, fields)
                                   : split_fitness_vector(occurrence.at(t), fields);
      write_fitness_rows(stats_out, subset_fitness(d, fitness));
      write_variety_rows(stats_out, variety_test(d, hierarchy));
      write_mixing_rows(stats_out, section_mixing(net, hierarchy));
      const auto occ = section_occupancy(d, hierarchy);
      write_occupancy_rows(stats_out, t, occ);
      const auto adj = ordered_adjacency(net, hierarchy);
      std::snprintf(name, sizeof name, "heatmap/adjacency_%d.csv", t);
      {
        auto out = artifacts.open(name);
        write_heatmap(out, adj);
      }
      std::snprintf(name, sizeof name, "heatmap/adjacency_%d_sections.csv", t);
      {
        auto out = artifacts.open(name);
        write_heatmap_sections(out, adj);
      }
      summary.years.push_back(t);
    }
    edges_out.close();
    decomp_out.close();
    summary_out.close();
    stats_out.close();
  } catch (const Error& e) {
    manifest["status"] = "incomplete";
    manifest["failure"] = {{"stage", stage}, {"message", e.what()}};
    if (stage_year) manifest["failure"]["year"] = *stage_year;
    manifest["years_completed"] = summary.years;
    manifest["artifacts"] = artifacts.checksums();
    write_manifest(summary.manifest, manifest);
    throw;
  }

  manifest["status"] = "complete";
  manifest["years_completed"] = summary.years;
  manifest["artifacts"] = artifacts.checksums();
  summary.artifacts = artifacts.size();
  write_manifest(summary.manifest, manifest);
  return summary;
}

}  // namespace acnet
