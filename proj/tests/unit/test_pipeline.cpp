#include <doctest.h>

#include "acnet/io.hpp"
#include "acnet/pipeline.hpp"
#include "acnet/synth.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace acnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* base = std::getenv("ACNET_TEST_TMP");
  fs::path dir = fs::path(base ? base : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig small_run(const fs::path& dir) {
  SynthConfig sc;
  sc.n_regions = 60;
  sc.n_fields = 12;
  sc.n_years = 4;
  sc.p_base = 0.1;
  sc.beta = 6;
  sc.pairs = planted_cycle({0, 4, 8});
  const auto data = generate_events(sc);
  {
    auto out = open_output(dir / "events.csv");
    write_events(out, data.events);
  }
  RunConfig cfg;
  cfg.events = dir / "events.csv";
  cfg.out_dir = dir / "out";
  cfg.year_min = sc.year_start;
  cfg.year_max = sc.year_end();
  cfg.replicates = 30;
  return cfg;
}

nlohmann::json manifest(const fs::path& out) {
  std::ifstream in(out / "manifest.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("small synthetic run writes every artifact with checksums") {
  const auto dir = scratch("pipeline_small");
  const auto cfg = small_run(dir);
  const auto summary = run_pipeline(cfg);
  CHECK(summary.years == std::vector<int>{1980, 1981, 1982});
  const auto m = manifest(cfg.out_dir);
  CHECK(m["status"] == "complete");
  CHECK(m["config"]["replicates"] == 30);
  CHECK(m["years_completed"].size() == 3);
  for (const auto& [name, sum] : m["artifacts"].items()) {
    REQUIRE(fs::exists(cfg.out_dir / name));
    CHECK(sha256_file(cfg.out_dir / name) == sum.get<std::string>());
  }
  for (const char* f : {"edges.csv", "decomposition.csv", "acs_summary.csv", "stats.csv", "pvalues/pvalues_1980.csv",
                        "assist/assist_1981.csv", "heatmap/adjacency_1982.csv"}) {
    CHECK(fs::exists(cfg.out_dir / f));
  }
  CHECK_FALSE(m["config"].contains("workers"));
}

TEST_CASE("reruns are byte identical") {
  const auto dir = scratch("pipeline_rerun");
  auto cfg = small_run(dir);
  run_pipeline(cfg);
  const auto first = manifest(cfg.out_dir)["artifacts"];
  cfg.workers = 3;
  run_pipeline(cfg);
  CHECK(manifest(cfg.out_dir)["artifacts"] == first);
}

TEST_CASE("configuration errors") {
  RunConfig cfg;
  cfg.events = "unused.csv";
  cfg.year_min = 2000;
  cfg.year_max = 1999;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.year_max = 2000;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);  // no (t, t + lag) pair
  cfg.year_max = 2005;
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.replicates = 10;
  cfg.q = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("failures leave an incomplete manifest") {
  const auto dir = scratch("pipeline_fail");
  auto cfg = small_run(dir);
  cfg.hierarchy = dir / "missing_hierarchy.csv";
  CHECK_THROWS(run_pipeline(cfg));
  const auto m = manifest(cfg.out_dir);
  CHECK(m["status"] == "incomplete");
  CHECK(m["failure"]["stage"].is_string());
}

}
