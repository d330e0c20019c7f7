#include <doctest.h>

#include "acnet/ingest.hpp"

#include <random>
#include <sstream>

using namespace acnet;

namespace {

CodeHierarchy tree() { return CodeHierarchy::from_ipc_codes({"H01L", "H01M", "H02J", "A01B", "G06F"}); }

EventRecord rec(std::string f, int y, std::string r, std::string c) { return {std::move(f), y, std::move(r), std::move(c)}; }

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("events parse by header name and collapse duplicates") {
  std::istringstream in(
      "year,code,family_id,region_id,extra\n"
      "1990,H01L 21/02,F1,R1,x\n"
      "1990,H01L 21/04,F1,R1,x\n"   // same class after resolution -> duplicate
      "1990,A01B,F2,R2,x\n"
      "bad line\n"
      "1975,A01B,F3,R2,x\n"
      "1990,Z99Q,F4,R2,x\n");
  IngestOptions opt;
  const auto rep = parse_events(in, tree(), opt);
  REQUIRE(rep.records.size() == 2);
  CHECK(rep.records[0].code == "H01");
  CHECK(rep.records[1].code == "A01");
  CHECK(rep.duplicates_collapsed == 1);
  CHECK(rep.malformed.size() == 1);
  CHECK(rep.rejected.size() == 2);
  CHECK(rep.malformed[0].line == 5);
}

TEST_CASE("missing header columns are a validation error") {
  std::istringstream in("family,year,region_id,code\n");
  CHECK_THROWS_AS(parse_events(in, tree(), IngestOptions{}), ValidationError);
}

TEST_CASE("family weight is split evenly over unique region-field pairs") {
  const std::vector<EventRecord> f = {rec("F", 1990, "r1", "i"), rec("F", 1990, "r1", "j"), rec("F", 1990, "r2", "i"),
                                      rec("F", 1990, "r1", "i")};
  const auto cells = split_family_weights(f);
  REQUIRE(cells.size() == 3);
  double total = 0;
  for (const auto& c : cells) {
    CHECK(c.weight == doctest::Approx(1.0 / 3));
    total += c.weight;
  }
  CHECK(total == doctest::Approx(1.0));
  const std::vector<EventRecord> mixed = {rec("F", 1990, "r1", "i"), rec("G", 1990, "r1", "i")};
  CHECK_THROWS_AS(split_family_weights(mixed), ValidationError);
}

TEST_CASE("hand-summed occurrence shares") {
  const std::vector<EventRecord> rs = {rec("F1", 2000, "r1", "i"), rec("F1", 2000, "r1", "j"), rec("F2", 2000, "r1", "i")};
  const auto w = build_occurrence_matrix(rs, 2000);
  CHECK(w.entries.at({"r1", "i"}) == doctest::Approx(1.5));
  CHECK(w.entries.at({"r1", "j"}) == doctest::Approx(0.5));
  CHECK(w.family_count == 2);
}

TEST_CASE("occurrence mass equals the family count") {
  std::mt19937_64 rng(11);
  std::vector<EventRecord> rs;
  std::uniform_int_distribution<int> pick(0, 4);
  for (int f = 0; f < 200; ++f) {
    const int n = 1 + pick(rng);
    for (int k = 0; k < n; ++k) {
      rs.push_back(rec("F" + std::to_string(f), 1990 + f % 3, "r" + std::to_string(pick(rng)), "c" + std::to_string(pick(rng))));
    }
  }
  std::size_t families = 0;
  for (int y = 1990; y <= 1992; ++y) {
    const auto w = build_occurrence_matrix(rs, y);
    CHECK(w.total() == doctest::Approx(static_cast<double>(w.family_count)).epsilon(1e-12));
    families += w.family_count;
  }
  CHECK(families == 200);
}

// Aggregating subclass weights to their class is NOT in general the same as
// splitting at class level: a family with H01L, H01M and H02J puts 2/3 on H01
// through subclasses but 1/2 when split over classes. What does hold: equal
// total mass, equal support, and equality when no family carries two
// subclasses of one class.
TEST_CASE("granularity: aggregated subclass weights versus class weights") {
  const auto h = tree();
  const std::vector<std::pair<std::string, std::string>> raw = {
      {"F1", "H01L"}, {"F1", "H01M"}, {"F1", "H02J"}, {"F2", "A01B"}, {"F2", "H01L"}, {"F3", "G06F"}};
  auto build = [&](Level level, const std::vector<std::pair<std::string, std::string>>& src) {
    std::vector<EventRecord> rs;
    for (const auto& [f, c] : src) rs.push_back(rec(f, 2000, "r", *h.resolve(c, level)));
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    return build_occurrence_matrix(rs, 2000);
  };
  auto aggregate = [&](const OccurrenceMatrix& sub) {
    std::map<std::string, double> out;
    for (const auto& [k, w] : sub.entries) out[*h.ancestor_at(k.second, Level::Class)] += w;
    return out;
  };
  auto direct = [&](const OccurrenceMatrix& cls) {
    std::map<std::string, double> out;
    for (const auto& [k, w] : cls.entries) out[k.second] += w;
    return out;
  };

  const auto agg = aggregate(build(Level::Subclass, raw));
  const auto cls = direct(build(Level::Class, raw));
  CHECK(agg.at("H01") == doctest::Approx(2.0 / 3 + 1.0 / 2));
  CHECK(cls.at("H01") == doctest::Approx(1.0 / 2 + 1.0 / 2));
  double ta = 0, tc = 0;
  for (const auto& [k, v] : agg) ta += v;
  for (const auto& [k, v] : cls) tc += v;
  CHECK(ta == doctest::Approx(tc));
  CHECK(agg.size() == cls.size());

  const std::vector<std::pair<std::string, std::string>> one_per_class = {
      {"F1", "H01L"}, {"F1", "H02J"}, {"F2", "A01B"}, {"F2", "H01M"}, {"F3", "G06F"}};
  const auto agg2 = aggregate(build(Level::Subclass, one_per_class));
  const auto cls2 = direct(build(Level::Class, one_per_class));
  for (const auto& [k, v] : cls2) CHECK(agg2.at(k) == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("region table validates and maps to countries") {
  std::istringstream t("region_id,country\nR1,IT\nR2,IT\nR3,FR\n");
  const auto table = RegionTable::read(t);
  std::istringstream in("family_id,year,region_id,code\nF1,1990,R1,A01B\nF2,1990,R9,A01B\nF3,1990,R3,A01B\n");
  IngestOptions opt;
  opt.regions = &table;
  opt.region_level = RegionLevel::Country;
  const auto rep = parse_events(in, tree(), opt);
  REQUIRE(rep.records.size() == 2);
  CHECK(rep.records[0].region_id == "IT");
  CHECK(rep.records[1].region_id == "FR");
  CHECK(rep.rejected.size() == 1);
}

TEST_CASE("dense view lines up with labels") {
  const std::vector<EventRecord> rs = {rec("F1", 2000, "r2", "b"), rec("F2", 2000, "r1", "a")};
  const auto w = build_occurrence_matrix(rs, 2000);
  const Labels regions = collect_regions(rs);
  const auto d = to_dense(w, regions, Labels({"a", "b"}));
  CHECK(d(0, 0) == 1.0);
  CHECK(d(1, 1) == 1.0);
  CHECK(d.sum() == 2.0);
}

}
