#include <doctest.h>

#include "acnet/io.hpp"

#include <random>
#include <sstream>

using namespace acnet;

TEST_SUITE("io") {

TEST_CASE("labels and occurrence round trip") {
  const Labels l({"A01", "B02", "H01"});
  std::stringstream s;
  write_labels(s, l);
  CHECK(read_labels(s) == l);

  OccurrenceMatrix w;
  w.year = 1999;
  w.entries[{"R1", "A01"}] = 1.0 / 3;
  w.entries[{"R2", "H01"}] = 0.1;
  OccurrenceMatrix v = w;
  v.year = 2000;
  std::stringstream o;
  write_occurrence_header(o);
  write_occurrence(o, w);
  write_occurrence(o, v);
  const auto back = read_occurrence(o);
  REQUIRE(back.size() == 2);
  CHECK(back.at(1999).entries == w.entries);  // shortest round-trip digits are exact
  CHECK(back.at(2000).year == 2000);
}

TEST_CASE("presence round trip") {
  std::mt19937_64 rng(2);
  const Labels regions({"r0", "r1", "r2", "r3"}), fields({"a", "b", "c"});
  PresenceMatrix m{1990, regions, fields, Mask::Zero(4, 3)};
  for (Index r = 0; r < 4; ++r) {
    for (Index i = 0; i < 3; ++i) m.m(r, i) = static_cast<std::uint8_t>(rng() % 2);
  }
  std::stringstream s;
  write_presence_header(s);
  write_presence(s, m);
  const auto back = read_presence(s, regions, fields);
  CHECK(back.at(1990) == m);
}

TEST_CASE("assist matrix with sidecar") {
  AssistMatrix b;
  b.base_year = 2001;
  b.lag = 2;
  b.fields = Labels({"a", "b"});
  b.regions = Labels({"r0", "r1", "r2"});
  b.b = (MatrixXd(2, 2) << 0.25, 1.0 / 7, 0.0, 3e-17).finished();
  b.d_next = (Vector<int>(3) << 1, 0, 2).finished();
  b.u = (Vector<int>(2) << 3, 1).finished();
  std::stringstream mat, side;
  write_assist(mat, b);
  write_assist_sidecar(side, b);
  const std::string side_text = side.str();
  const auto back = read_assist(mat, side);
  CHECK(back.base_year == 2001);
  CHECK(back.lag == 2);
  CHECK((back.b.array() == b.b.array()).all());
  CHECK(back.d_next == b.d_next);
  CHECK(back.u == b.u);
  std::istringstream again(side_text);
  CHECK(read_ubiquity(again, Labels({"b", "a"})) == (Vector<int>(2) << 1, 3).finished());
}

TEST_CASE("p-values round trip") {
  PvalueMatrix p{1985, 200, Labels({"x", "y"}), (MatrixXd(2, 2) << 1.0, 1.0 / 201, 0.5, 1.0).finished()};
  std::stringstream s;
  write_pvalues(s, p);
  const auto back = read_pvalues(s);
  CHECK(back.base_year == 1985);
  CHECK(back.replicates == 200);
  CHECK(back.fields == p.fields);
  CHECK((back.p.array() == p.p.array()).all());
}

TEST_CASE("edges round trip per year and in code order") {
  const Labels f({"c", "a", "b"});
  TechnologyNetwork n1 = TechnologyNetwork::from_edges(3, {{0, 1}, {2, 1}, {1, 0}});
  n1.year = 1990;
  n1.fields = f;
  TechnologyNetwork n2 = TechnologyNetwork::from_edges(3, {});
  n2.year = 1991;
  n2.fields = f;
  std::stringstream s;
  write_edges_header(s);
  write_edges(s, n1);
  write_edges(s, n2);
  const std::string text = s.str();
  CHECK(text == "year,source_field,target_field\n1990,a,c\n1990,b,a\n1990,c,a\n");
  const auto back = read_edges(s, f);
  CHECK(back.at(1990).c == n1.c);
  CHECK(back.count(1991) == 0);  // empty years leave no rows
}

TEST_CASE("malformed input is a validation error") {
  std::istringstream bad_pv("# base_year=1990\nfield,a\na,oops\n");
  CHECK_THROWS_AS(read_pvalues(bad_pv), ValidationError);
  std::istringstream bad_edges("year,source_field,target_field\n1990,a,zz\n");
  CHECK_THROWS_AS(read_edges(bad_edges, Labels({"a"})), ValidationError);
  CHECK_THROWS_AS(open_input("/nonexistent/acnet/file.csv"), std::exception);
}

}
