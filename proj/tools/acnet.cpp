// acnet: command-line front end. Every stage reads and writes the plain-text
// artifacts of the library, so a run can be resumed or inspected stage by stage.

#include "acnet/acs.hpp"
#include "acnet/assist.hpp"
#include "acnet/dynamics.hpp"
#include "acnet/filter.hpp"
#include "acnet/hierarchy.hpp"
#include "acnet/ingest.hpp"
#include "acnet/io.hpp"
#include "acnet/nullmodel.hpp"
#include "acnet/parallel.hpp"
#include "acnet/pipeline.hpp"
#include "acnet/rca.hpp"
#include "acnet/stats.hpp"
#include "acnet/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace acnet;

namespace {

// Registers --some-name with an underscore alias so config files may use
// either spelling.
template <typename T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
  std::string alias = name;
  for (auto& ch : alias) {
    if (ch == '-') ch = '_';
  }
  const std::string names = alias == name ? "--" + name : "--" + name + ",--" + alias;
  return app->add_option(names, var, desc)->capture_default_str();
}

CodeHierarchy load_hierarchy(const fs::path& hierarchy, const fs::path& events) {
  if (!hierarchy.empty()) {
    auto in = open_input(hierarchy);
    return CodeHierarchy::read(in);
  }
  if (events.empty()) throw ValidationError("need --hierarchy or --events to derive one");
  auto in = open_input(events);
  return derive_ipc_hierarchy(in);
}

Labels load_labels(const fs::path& path) {
  auto in = open_input(path);
  return read_labels(in);
}

std::map<int, PresenceMatrix> load_presence(const fs::path& path, const Labels& regions, const Labels& fields) {
  auto in = open_input(path);
  return read_presence(in, regions, fields);
}

const PresenceMatrix& presence_at(const std::map<int, PresenceMatrix>& all, int year) {
  auto it = all.find(year);
  if (it == all.end()) throw ValidationError("no presence rows for year " + std::to_string(year));
  return it->second;
}

TechnologyNetwork load_network(const fs::path& edges, const Labels& fields, int year) {
  auto in = open_input(edges);
  auto nets = read_edges(in, fields);
  auto it = nets.find(year);
  if (it != nets.end()) return it->second;
  TechnologyNetwork empty;  // a year with no significant links
  empty.year = year;
  empty.fields = fields;
  empty.c = Mask::Zero(fields.size(), fields.size());
  return empty;
}

std::string year_file(const std::string& stem, int year) { return stem + "_" + std::to_string(year) + ".csv"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autocatalytic structure in temporal technology networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ACNET_VERSION));

  // synth
  SynthConfig sc;
  fs::path synth_out = "synth";
  std::vector<int> cycle;
  std::vector<std::string> pair_specs;
  auto* synth = app.add_subcommand("synth", "Generate synthetic events with planted catalytic links");
  synth->set_config("--config", "", "key=value config file");
  flag(synth, "n-regions", sc.n_regions, "Regions");
  flag(synth, "n-fields", sc.n_fields, "Fields");
  flag(synth, "n-sections", sc.n_sections, "Sections (contiguous field blocks)");
  flag(synth, "year-start", sc.year_start, "First year");
  flag(synth, "n-years", sc.n_years, "Number of years");
  flag(synth, "p-base", sc.p_base, "Baseline presence probability");
  flag(synth, "beta", sc.beta, "Boost factor for planted links");
  flag(synth, "families", sc.families_per_presence, "Mean families per presence (>= 1)");
  flag(synth, "seed", sc.seed, "Master seed");
  flag(synth, "cycle", cycle, "Plant a directed cycle over these field indices")->delimiter(',');
  flag(synth, "pair", pair_specs, "Plant a link 'source>target' (field indices); repeatable");
  flag(synth, "out", synth_out, "Output directory");

  // ingest
  fs::path events, hierarchy_path, region_table, out_dir = ".";
  std::string granularity = "class";
  int year_min = 1980, year_max = 2011;
  auto* ingest = app.add_subcommand("ingest", "Parse events into occurrence matrices");
  ingest->set_config("--config", "", "key=value config file");
  flag(ingest, "events", events, "Event file")->required();
  flag(ingest, "hierarchy", hierarchy_path, "Code hierarchy (code,parent); default derives IPC levels");
  flag(ingest, "region-table", region_table, "Optional region_id,country table");
  flag(ingest, "granularity", granularity, "class or subclass");
  flag(ingest, "year-min", year_min, "First year");
  flag(ingest, "year-max", year_max, "Last year");
  flag(ingest, "out", out_dir, "Output directory");

  // rca
  fs::path occurrence_path, regions_path, fields_path, out_file;
  auto* rca = app.add_subcommand("rca", "Binarize occurrence matrices by revealed comparative advantage");
  flag(rca, "occurrence", occurrence_path, "occurrence.csv")->required();
  flag(rca, "regions", regions_path, "regions.txt")->required();
  flag(rca, "fields", fields_path, "fields.txt")->required();
  flag(rca, "out", out_file, "Output presence file")->required();

  // assist
  fs::path presence_path;
  int year = 0, lag = 1;
  auto* assist = app.add_subcommand("assist", "Lagged assist matrix for one base year");
  flag(assist, "presence", presence_path, "presence.csv")->required();
  flag(assist, "regions", regions_path, "regions.txt")->required();
  flag(assist, "fields", fields_path, "fields.txt")->required();
  flag(assist, "year", year, "Base year t")->required();
  flag(assist, "lag", lag, "Lag");
  flag(assist, "out", out_dir, "Output directory");

  // nulls
  int replicates = 1000;
  std::uint64_t seed = 1;
  unsigned workers = default_workers();
  fs::path replicate_out;
  auto* nulls = app.add_subcommand("nulls", "Monte Carlo p-values under the bipartite configuration model");
  nulls->set_config("--config", "", "key=value config file");
  flag(nulls, "presence", presence_path, "presence.csv")->required();
  flag(nulls, "regions", regions_path, "regions.txt")->required();
  flag(nulls, "fields", fields_path, "fields.txt")->required();
  flag(nulls, "year", year, "Base year t")->required();
  flag(nulls, "lag", lag, "Lag");
  flag(nulls, "replicates", replicates, "Null replicates K");
  flag(nulls, "seed", seed, "Master seed");
  flag(nulls, "out", out_file, "Output p-value matrix")->required();
  flag(nulls, "replicate-summaries", replicate_out, "Optional per-replicate summary file");

  // filter
  fs::path pvalues_path, sidecar_path;
  double q = 0.05;
  bool diagonal = false;
  std::string correction = "bh";
  auto* filter = app.add_subcommand("filter", "Significant links from a p-value matrix");
  flag(filter, "pvalues", pvalues_path, "p-value matrix")->required();
  flag(filter, "sidecar", sidecar_path, "Assist d/u sidecar; rows with u = 0 are untested");
  flag(filter, "q", q, "FDR level");
  flag(filter, "correction", correction, "bh, bonferroni or none");
  filter->add_flag("--diagonal", diagonal, "Test self-links");
  flag(filter, "out", out_file, "Output edge list")->required();

  // acs
  fs::path edges_path;
  auto* acs = app.add_subcommand("acs", "Core, periphery and Perron-Frobenius summary per year");
  flag(acs, "edges", edges_path, "edges.csv")->required();
  flag(acs, "fields", fields_path, "fields.txt")->required();
  flag(acs, "out", out_dir, "Output directory");

  // dynamics
  double t_end = 30.0, dt = 1e-2, window = 5.0;
  auto* dynamics = app.add_subcommand("dynamics", "Integrate dy/dt = C^T y on one year's network");
  flag(dynamics, "edges", edges_path, "edges.csv")->required();
  flag(dynamics, "fields", fields_path, "fields.txt")->required();
  flag(dynamics, "year", year, "Network year")->required();
  flag(dynamics, "t-end", t_end, "Integration horizon");
  flag(dynamics, "dt", dt, "Maximum step");
  flag(dynamics, "window", window, "Trailing window for growth rates");
  flag(dynamics, "out", out_file, "Output trajectory")->required();

  // stats
  std::string fitness_mode = "count";
  auto* stats = app.add_subcommand("stats", "Fitness, variety and mixing statistics");
  flag(stats, "edges", edges_path, "edges.csv")->required();
  flag(stats, "fields", fields_path, "fields.txt")->required();
  flag(stats, "events", events, "Event file")->required();
  flag(stats, "hierarchy", hierarchy_path, "Code hierarchy; default derives IPC levels");
  flag(stats, "granularity", granularity, "class or subclass");
  flag(stats, "fitness", fitness_mode, "count or split");
  flag(stats, "year-min", year_min, "First network year");
  flag(stats, "year-max", year_max, "Last network year");
  flag(stats, "out", out_dir, "Output directory");

  // pipeline
  RunConfig rc;
  rc.workers = default_workers();
  std::string rc_granularity = "class", rc_correction = "bh", rc_fitness = "count";
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage over a year range");
  pipeline->set_config("--config", "", "key=value config file");
  flag(pipeline, "events", rc.events, "Event file")->required();
  flag(pipeline, "hierarchy", rc.hierarchy, "Code hierarchy; default derives IPC levels");
  flag(pipeline, "region-table", rc.regions, "Optional region_id,country table");
  flag(pipeline, "out", rc.out_dir, "Output directory");
  flag(pipeline, "year-min", rc.year_min, "First year");
  flag(pipeline, "year-max", rc.year_max, "Last year");
  flag(pipeline, "lag", rc.lag, "Lag delta");
  flag(pipeline, "granularity", rc_granularity, "class or subclass");
  flag(pipeline, "replicates", rc.replicates, "Null replicates K");
  flag(pipeline, "q", rc.q, "FDR level");
  flag(pipeline, "correction", rc_correction, "bh, bonferroni or none");
  pipeline->add_flag("--diagonal", rc.include_diagonal, "Test self-links");
  flag(pipeline, "seed", rc.seed, "Master seed");
  flag(pipeline, "fitness", rc_fitness, "count or split");
  pipeline->add_flag("--dump-replicates", rc.dump_replicates, "Write per-replicate null summaries");
  flag(pipeline, "workers", rc.workers, "Worker threads (ACNET_WORKERS also works)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      for (const auto& s : pair_specs) {
        const auto gt = s.find('>');
        if (gt == std::string::npos) throw ValidationError("pair must look like 'source>target'");
        sc.pairs.emplace_back(std::stoi(s.substr(0, gt)), std::stoi(s.substr(gt + 1)));
      }
      if (!cycle.empty()) {
        const auto c = planted_cycle(cycle);
        sc.pairs.insert(sc.pairs.end(), c.begin(), c.end());
      }
      const SynthData data = generate_events(sc);
      {
        auto out = open_output(synth_out / "events.csv");
        write_events(out, data.events);
      }
      {
        auto out = open_output(synth_out / "hierarchy.csv");
        data.hierarchy.write(out);
      }
      {
        auto out = open_output(synth_out / "truth.csv");
        out << "source_field,target_field\n";
        for (const auto& [s, t] : data.truth) out << s << ',' << t << '\n';
      }
      {
        auto out = open_output(synth_out / "synth_config.txt");
        write_synth_config(out, sc);
      }
      std::cout << data.events.size() << " events, " << data.truth.size() << " planted links -> " << synth_out.string()
                << '\n';
    } else if (*ingest) {
      const CodeHierarchy h = load_hierarchy(hierarchy_path, events);
      std::optional<RegionTable> table;
      if (!region_table.empty()) {
        auto in = open_input(region_table);
        table = RegionTable::read(in);
      }
      IngestOptions opt;
      opt.granularity = parse_level(granularity);
      opt.year_min = year_min;
      opt.year_max = year_max;
      opt.regions = table ? &*table : nullptr;
      auto in = open_input(events);
      const ParseReport report = parse_events(in, h, opt);
      const Labels fields(h.codes_at(opt.granularity));
      {
        auto out = open_output(out_dir / "fields.txt");
        write_labels(out, fields);
      }
      {
        auto out = open_output(out_dir / "regions.txt");
        write_labels(out, collect_regions(report.records));
      }
      {
        auto out = open_output(out_dir / "occurrence.csv");
        write_occurrence_header(out);
        for (const auto& [y, w] : build_occurrence_matrices(report.records, year_min, year_max)) write_occurrence(out, w);
      }
      for (const auto& i : report.malformed) std::cerr << "line " << i.line << ": malformed: " << i.message << '\n';
      for (const auto& i : report.rejected) std::cerr << "line " << i.line << ": rejected: " << i.message << '\n';
      std::cout << report.records.size() << " records, " << report.error_count() << " skipped lines\n";
    } else if (*rca) {
      const Labels regions = load_labels(regions_path), fields = load_labels(fields_path);
      auto in = open_input(occurrence_path);
      const auto occ = read_occurrence(in);
      auto out = open_output(out_file);
      write_presence_header(out);
      for (const auto& [y, w] : occ) write_presence(out, binarize_rca(w, regions, fields));
    } else if (*assist) {
      const Labels regions = load_labels(regions_path), fields = load_labels(fields_path);
      const auto pres = load_presence(presence_path, regions, fields);
      const AssistMatrix b = assist_matrix(presence_at(pres, year), presence_at(pres, year + lag));
      auto out = open_output(out_dir / year_file("assist", year));
      write_assist(out, b);
      auto side = open_output(out_dir / (("assist_" + std::to_string(year)) + "_du.csv"));
      write_assist_sidecar(side, b);
    } else if (*nulls) {
      const Labels regions = load_labels(regions_path), fields = load_labels(fields_path);
      const auto pres = load_presence(presence_path, regions, fields);
      const PresenceMatrix& m_t = presence_at(pres, year);
      const PresenceMatrix& m_n = presence_at(pres, year + lag);
      const AssistMatrix b = assist_matrix(m_t, m_n);
      NullEnsembleOptions opt;
      opt.replicates = replicates;
      opt.master_seed = seed;
      opt.base_year = year;
      opt.lag = lag;
      opt.workers = workers;
      std::vector<ReplicateSummary> reps;
      const PvalueMatrix p =
          null_pvalues(b, fit_bicm(m_t.m), fit_bicm(m_n.m), opt, replicate_out.empty() ? nullptr : &reps);
      auto out = open_output(out_file);
      write_pvalues(out, p);
      if (!replicate_out.empty()) {
        auto r = open_output(replicate_out);
        write_replicate_summaries(r, reps);
      }
    } else if (*filter) {
      auto in = open_input(pvalues_path);
      const PvalueMatrix p = read_pvalues(in);
      Vector<int> u;
      if (!sidecar_path.empty()) {
        auto side = open_input(sidecar_path);
        u = read_ubiquity(side, p.fields);
      }
      FilterOptions opt;
      opt.q = q;
      opt.include_diagonal = diagonal;
      opt.correction = parse_correction(correction);
      const TechnologyNetwork net = build_adjacency(p, u, opt);
      auto out = open_output(out_file);
      write_edges_header(out);
      write_edges(out, net);
      std::cout << net.edge_count() << " links of " << net.tested_pairs << " tested pairs\n";
    } else if (*acs) {
      const Labels fields = load_labels(fields_path);
      auto in = open_input(edges_path);
      const auto nets = read_edges(in, fields);
      auto dec = open_output(out_dir / "decomposition.csv");
      auto sum = open_output(out_dir / "acs_summary.csv");
      write_decomposition_header(dec);
      write_acs_summary_header(sum);
      for (const auto& [y, net] : nets) {
        const AcsDecomposition d = decompose(net);
        write_decomposition(dec, d);
        write_acs_summary(sum, d);
      }
    } else if (*dynamics) {
      const Labels fields = load_labels(fields_path);
      const TechnologyNetwork net = load_network(edges_path, fields, year);
      const VectorXd y0 = VectorXd::Ones(fields.size());
      Trajectory traj;
      int status = 0;
      try {
        traj = simulate_linear(net, y0, t_end, dt);
      } catch (const BlowUpError& e) {
        std::cerr << e.what() << "; writing the partial trajectory\n";
        traj = e.partial();
        status = 2;
      }
      auto out = open_output(out_file);
      write_trajectory(out, traj, fields);
      if (status == 0 && traj.t_end() > 0) {
        const GrowthEstimate g = estimate_growth_rate(traj, std::min(window, traj.t_end()));
        const PerronFrobenius pf = pf_eigen(net);
        std::cout << "lambda1 " << pf.lambda1 << '\n';
        for (Index i = 0; i < fields.size(); ++i) {
          if (g.kind[static_cast<std::size_t>(i)] == GrowthKind::Exponential) {
            std::cout << fields[i] << " growth rate " << g.rate(i) << '\n';
          }
        }
      }
      return status;
    } else if (*stats) {
      const CodeHierarchy h = load_hierarchy(hierarchy_path, events);
      const Labels fields = load_labels(fields_path);
      IngestOptions opt;
      opt.granularity = parse_level(granularity);
      opt.year_min = year_min;
      opt.year_max = year_max;
      auto in = open_input(events);
      const ParseReport report = parse_events(in, h, opt);
      const FitnessMode mode = parse_fitness_mode(fitness_mode);
      const auto occ = build_occurrence_matrices(report.records, year_min, year_max);
      auto out = open_output(out_dir / "stats.csv");
      write_stats_header(out);
      for (int y = year_min; y <= year_max; ++y) {
        const TechnologyNetwork net = load_network(edges_path, fields, y);
        const AcsDecomposition d = decompose(net);
        const VectorXd fit = mode == FitnessMode::Count ? fitness_vector(report.records, y, fields)
                                                        : split_fitness_vector(occ.at(y), fields);
        write_fitness_rows(out, subset_fitness(d, fit));
        write_variety_rows(out, variety_test(d, h));
        write_mixing_rows(out, section_mixing(net, h));
        write_occupancy_rows(out, y, section_occupancy(d, h));
        const auto adj = ordered_adjacency(net, h);
        auto hm = open_output(out_dir / "heatmap" / year_file("adjacency", y));
        write_heatmap(hm, adj);
        auto hs = open_output(out_dir / "heatmap" / (("adjacency_" + std::to_string(y)) + "_sections.csv"));
        write_heatmap_sections(hs, adj);
      }
    } else if (*pipeline) {
      rc.granularity = parse_level(rc_granularity);
      rc.correction = parse_correction(rc_correction);
      rc.fitness = parse_fitness_mode(rc_fitness);
      const RunSummary s = run_pipeline(rc);
      std::cout << s.years.size() << " year pairs, " << s.artifacts << " artifacts, manifest " << s.manifest.string()
                << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ComputeError& e) {
    std::cerr << "compute error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
