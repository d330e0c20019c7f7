#include "acnet/io.hpp"

#include "text.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>

namespace acnet {

namespace fs = std::filesystem;
using text::format_double;

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

namespace {

// Calls row(cols, line_no) for each data line after checking the header.
void read_rows(std::istream& in, const std::string& header,
               const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!seen_header) {
      if (t != header) throw ValidationError("line " + std::to_string(line_no) + ": expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    auto cols = text::split(t, ',');
    for (auto& c : cols) c = text::trim(c);
    row(cols, line_no);
  }
  if (!seen_header) throw ValidationError("missing header '" + header + "'");
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  throw ValidationError("line " + std::to_string(line_no) + ": " + what);
}

int to_int(const std::string& s, std::size_t line_no) {
  int v = 0;
  if (!text::parse_int(s, v)) bad_line(line_no, "not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s, std::size_t line_no) {
  double v = 0;
  if (!text::parse_double(s, v)) bad_line(line_no, "not a number: '" + s + "'");
  return v;
}

void expect_cols(const std::vector<std::string>& cols, std::size_t n, std::size_t line_no) {
  if (cols.size() != n) bad_line(line_no, "expected " + std::to_string(n) + " columns");
}

void tidy(std::ostream& out, int year, const std::string& subset, const std::string& metric, double value) {
  out << year << ',' << subset << ',' << metric << ',' << format_double(value) << '\n';
}

}  // namespace

void write_events(std::ostream& out, std::span<const EventRecord> events) {
  out << "family_id,year,region_id,code\n";
  for (const auto& e : events) out << e.family_id << ',' << e.year << ',' << e.region_id << ',' << e.code << '\n';
}

void write_labels(std::ostream& out, const Labels& labels) {
  for (const auto& l : labels.names()) out << l << '\n';
}

Labels read_labels(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty()) names.push_back(std::move(t));
  }
  return Labels(std::move(names));
}

void write_occurrence_header(std::ostream& out) { out << "year,region,field,weight\n"; }

void write_occurrence(std::ostream& out, const OccurrenceMatrix& w) {
  for (const auto& [key, weight] : w.entries) {
    out << w.year << ',' << key.first << ',' << key.second << ',' << format_double(weight) << '\n';
  }
}

std::map<int, OccurrenceMatrix> read_occurrence(std::istream& in) {
  std::map<int, OccurrenceMatrix> out;
  read_rows(in, "year,region,field,weight", [&](const auto& cols, std::size_t ln) {
    expect_cols(cols, 4, ln);
    const int year = to_int(cols[0], ln);
    auto& w = out[year];
    w.year = year;
    w.entries[{cols[1], cols[2]}] += to_double(cols[3], ln);
  });
  return out;
}

void write_presence_header(std::ostream& out) { out << "year,region,field\n"; }

void write_presence(std::ostream& out, const PresenceMatrix& m) {
  for (Index r = 0; r < m.m.rows(); ++r) {
    for (Index i = 0; i < m.m.cols(); ++i) {
      if (m.m(r, i)) out << m.year << ',' << m.regions[r] << ',' << m.fields[i] << '\n';
    }
  }
}

std::map<int, PresenceMatrix> read_presence(std::istream& in, const Labels& regions, const Labels& fields) {
  std::map<int, PresenceMatrix> out;
  read_rows(in, "year,region,field", [&](const auto& cols, std::size_t ln) {
    expect_cols(cols, 3, ln);
    const int year = to_int(cols[0], ln);
    auto [it, fresh] = out.try_emplace(year);
    if (fresh) it->second = PresenceMatrix{year, regions, fields, Mask::Zero(regions.size(), fields.size())};
    it->second.m(regions.index_of(cols[1]), fields.index_of(cols[2])) = 1;
  });
  return out;
}

int DenseTable::meta_int(const std::string& key) const {
  auto it = meta.find(key);
  int v = 0;
  if (it == meta.end() || !text::parse_int(it->second, v)) throw ValidationError("dense table lacks integer '" + key + "'");
  return v;
}

void write_dense(std::ostream& out, const Labels& labels, const MatrixXd& values,
                 const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  out << "field";
  for (const auto& l : labels.names()) out << ',' << l;
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    out << labels[i];
    for (Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
    out << '\n';
  }
}

DenseTable read_dense(std::istream& in) {
  DenseTable t;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto s = text::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto body = text::trim(s.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[text::trim(body.substr(0, eq))] = text::trim(body.substr(eq + 1));
      continue;
    }
    auto cols = text::split(s, ',');
    if (!header) {
      if (text::trim(cols[0]) != "field") bad_line(line_no, "expected dense header starting with 'field'");
      std::vector<std::string> names;
      for (std::size_t c = 1; c < cols.size(); ++c) names.push_back(text::trim(cols[c]));
      t.labels = Labels(std::move(names));
      header = true;
      continue;
    }
    if (static_cast<Index>(cols.size()) != t.labels.size() + 1) bad_line(line_no, "row width does not match header");
    row_labels.push_back(text::trim(cols[0]));
    std::vector<double> vals;
    for (std::size_t c = 1; c < cols.size(); ++c) vals.push_back(to_double(cols[c], line_no));
    rows.push_back(std::move(vals));
  }
  if (!header) throw ValidationError("dense table has no header");
  if (row_labels != t.labels.names()) throw ValidationError("dense table row labels differ from the header");
  const Index n = t.labels.size();
  t.values.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) t.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return t;
}

void write_assist(std::ostream& out, const AssistMatrix& b) {
  write_dense(out, b.fields, b.b, {{"base_year", std::to_string(b.base_year)}, {"lag", std::to_string(b.lag)}});
}

void write_assist_sidecar(std::ostream& out, const AssistMatrix& b) {
  out << "kind,label,value\n";
  for (Index r = 0; r < b.regions.size(); ++r) out << "d," << b.regions[r] << ',' << b.d_next(r) << '\n';
  for (Index i = 0; i < b.fields.size(); ++i) out << "u," << b.fields[i] << ',' << b.u(i) << '\n';
}

namespace {

struct Sidecar {
  std::vector<std::string> regions;
  std::vector<int> d;
  std::map<std::string, int> u;
};

Sidecar read_sidecar(std::istream& in) {
  Sidecar s;
  read_rows(in, "kind,label,value", [&](const auto& cols, std::size_t ln) {
    expect_cols(cols, 3, ln);
    const int v = to_int(cols[2], ln);
    if (cols[0] == "d") {
      s.regions.push_back(cols[1]);
      s.d.push_back(v);
    } else if (cols[0] == "u") {
      s.u[cols[1]] = v;
    } else {
      bad_line(ln, "kind must be d or u");
    }
  });
  return s;
}

Vector<int> ubiquity_in_order(const Sidecar& s, const Labels& fields) {
  Vector<int> u(fields.size());
  for (Index i = 0; i < fields.size(); ++i) {
    auto it = s.u.find(fields[i]);
    if (it == s.u.end()) throw ValidationError("sidecar lacks u for " + fields[i]);
    u(i) = it->second;
  }
  return u;
}

}  // namespace

AssistMatrix read_assist(std::istream& matrix, std::istream& sidecar) {
  const DenseTable t = read_dense(matrix);
  const Sidecar s = read_sidecar(sidecar);
  AssistMatrix b;
  b.base_year = t.meta_int("base_year");
  b.lag = t.meta_int("lag");
  b.fields = t.labels;
  b.b = t.values;
  b.regions = Labels(s.regions);
  b.d_next = Eigen::Map<const Vector<int>>(s.d.data(), static_cast<Index>(s.d.size()));
  b.u = ubiquity_in_order(s, b.fields);
  return b;
}

Vector<int> read_ubiquity(std::istream& sidecar, const Labels& fields) {
  return ubiquity_in_order(read_sidecar(sidecar), fields);
}

void write_pvalues(std::ostream& out, const PvalueMatrix& p) {
  write_dense(out, p.fields, p.p, {{"base_year", std::to_string(p.base_year)}, {"replicates", std::to_string(p.replicates)}});
}

PvalueMatrix read_pvalues(std::istream& in) {
  const DenseTable t = read_dense(in);
  return PvalueMatrix{t.meta_int("base_year"), t.meta_int("replicates"), t.labels, t.values};
}

void write_replicate_summaries(std::ostream& out, std::span<const ReplicateSummary> rows) {
  out << "replicate,mean_weight,nonzero_links,presences_t,presences_next\n";
  for (const auto& r : rows) {
    out << r.replicate << ',' << format_double(r.mean_weight) << ',' << r.nonzero_links << ',' << r.presences_t << ','
        << r.presences_next << '\n';
  }
}

void write_edges_header(std::ostream& out) { out << "year,source_field,target_field\n"; }

void write_edges(std::ostream& out, const TechnologyNetwork& net) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (Index i = 0; i < net.size(); ++i) {
    for (Index j = 0; j < net.size(); ++j) {
      if (net.c(i, j)) edges.emplace_back(net.fields[i], net.fields[j]);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [s, t] : edges) out << net.year << ',' << s << ',' << t << '\n';
}

std::map<int, TechnologyNetwork> read_edges(std::istream& in, const Labels& fields) {
  std::map<int, TechnologyNetwork> out;
  read_rows(in, "year,source_field,target_field", [&](const auto& cols, std::size_t ln) {
    expect_cols(cols, 3, ln);
    const int year = to_int(cols[0], ln);
    auto [it, fresh] = out.try_emplace(year);
    if (fresh) {
      it->second.year = year;
      it->second.fields = fields;
      it->second.c = Mask::Zero(fields.size(), fields.size());
    }
    it->second.c(fields.index_of(cols[1]), fields.index_of(cols[2])) = 1;
  });
  return out;
}

void write_decomposition_header(std::ostream& out) { out << "year,field,label\n"; }

void write_decomposition(std::ostream& out, const AcsDecomposition& d) {
  for (Index i = 0; i < d.fields.size(); ++i) {
    out << d.year << ',' << d.fields[i] << ',' << to_string(d.roles[static_cast<std::size_t>(i)]) << '\n';
  }
}

void write_acs_summary_header(std::ostream& out) { out << "year,lambda1,core,periphery,acs,n_acs\n"; }

void write_acs_summary(std::ostream& out, const AcsDecomposition& d) {
  out << d.year << ',' << format_double(d.lambda1) << ',' << d.core.size() << ',' << d.periphery.size() << ','
      << d.acs_size() << ',' << d.acs_list.size() << '\n';
}

void write_trajectory(std::ostream& out, const Trajectory& traj, const Labels& fields) {
  if (traj.states.rows() != fields.size()) throw ValidationError("trajectory does not match the field labels");
  out << "t,field,y\n";
  for (Index k = 0; k < traj.samples(); ++k) {
    const auto t = format_double(traj.times[static_cast<std::size_t>(k)]);
    for (Index i = 0; i < fields.size(); ++i) out << t << ',' << fields[i] << ',' << format_double(traj.states(i, k)) << '\n';
  }
}

void write_stats_header(std::ostream& out) { out << "year,subset_or_section,metric,value\n"; }

void write_fitness_rows(std::ostream& out, const FitnessRow& row) {
  tidy(out, row.year, "network", "total_fitness", row.network_total);
  for (const auto& s : row.subsets) {
    tidy(out, row.year, s.subset, "nodes", static_cast<double>(s.nodes));
    tidy(out, row.year, s.subset, "total_fitness", s.total);
    if (s.average) tidy(out, row.year, s.subset, "average_fitness", *s.average);
    tidy(out, row.year, s.subset, "share_of_total_fitness", s.share_of_total);
    tidy(out, row.year, s.subset, "share_of_nodes", s.share_of_nodes);
  }
}

void write_variety_rows(std::ostream& out, const VarietyTestResult& v) {
  tidy(out, v.year, "all", "variety_applicable", v.applicable ? 1 : 0);
  tidy(out, v.year, "all", "variety_n", v.n);
  if (v.applicable) {
    tidy(out, v.year, "all", "variety_G", v.statistic);
    tidy(out, v.year, "all", "variety_df", v.df);
    tidy(out, v.year, "all", "variety_critical", v.critical_value);
    tidy(out, v.year, "all", "variety_significant", v.significant ? 1 : 0);
    tidy(out, v.year, "all", "variety_clamped", v.clamped ? 1 : 0);
  }
  for (std::size_t k = 0; k < v.sections.size(); ++k) {
    tidy(out, v.year, v.sections[k], "acs_count", v.counts[k]);
    tidy(out, v.year, v.sections[k], "section_size", v.sizes[k]);
    if (v.applicable) tidy(out, v.year, v.sections[k], "odds", v.omega(static_cast<Index>(k)));
  }
}

void write_mixing_rows(std::ostream& out, const MixingRow& m) {
  tidy(out, m.year, "all", "within_section_links", m.within);
  tidy(out, m.year, "all", "between_section_links", m.between);
  tidy(out, m.year, "all", "links", m.total());
}

void write_occupancy_rows(std::ostream& out, int year, std::span<const SectionOccupancy> rows) {
  for (const auto& r : rows) {
    tidy(out, year, r.section, "size", r.size);
    tidy(out, year, r.section, "in_acs", r.in_acs);
    tidy(out, year, r.section, "outside_acs", r.outside_acs);
    if (r.share_in_acs) tidy(out, year, r.section, "share_in_acs", *r.share_in_acs);
    if (r.share_outside_acs) tidy(out, year, r.section, "share_outside_acs", *r.share_outside_acs);
    if (r.fraction_in_acs) tidy(out, year, r.section, "fraction_in_acs", *r.fraction_in_acs);
  }
}

void write_heatmap(std::ostream& out, const OrderedAdjacency& adj) {
  out << text::join(adj.codes, ',') << '\n';
  for (Index r = 0; r < adj.grid.rows(); ++r) {
    for (Index c = 0; c < adj.grid.cols(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(adj.grid(r, c));
    }
    out << '\n';
  }
}

void write_heatmap_sections(std::ostream& out, const OrderedAdjacency& adj) {
  out << "section,begin,end\n";
  for (const auto& b : adj.blocks) out << b.section << ',' << b.begin << ',' << b.end << '\n';
}

}  // namespace acnet
