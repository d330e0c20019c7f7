#include "acnet/ingest.hpp"

#include "text.hpp"

#include <algorithm>
#include <istream>
#include <set>

namespace acnet {

RegionTable RegionTable::read(std::istream& in, char delimiter) {
  RegionTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cols = text::split(line, delimiter);
    if (line_no == 1 && text::trim(cols[0]) == "region_id") continue;
    if (cols.size() != 2) {
      throw ValidationError("region table line " + std::to_string(line_no) + ": expected 'region_id,country'");
    }
    table.add(text::trim(cols[0]), text::trim(cols[1]));
  }
  return table;
}

void RegionTable::add(const std::string& region, const std::string& country) {
  auto [it, inserted] = country_.emplace(region, country);
  if (!inserted && it->second != country) {
    throw ValidationError("region '" + region + "' mapped to two countries");
  }
}

const std::string& RegionTable::country_of(const std::string& region) const {
  auto it = country_.find(region);
  if (it == country_.end()) throw ValidationError("unknown region '" + region + "'");
  return it->second;
}

ParseReport parse_events(std::istream& in, const CodeHierarchy& hierarchy, const IngestOptions& options) {
  ParseReport report;
  std::string line;
  std::size_t line_no = 0;

  int col_family = -1, col_year = -1, col_region = -1, col_code = -1;
  std::size_t min_cols = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto cols = text::split(line, options.delimiter);
    if (!have_header) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto name = text::trim(cols[c]);
        if (name == "family_id") col_family = static_cast<int>(c);
        else if (name == "year") col_year = static_cast<int>(c);
        else if (name == "region_id") col_region = static_cast<int>(c);
        else if (name == "code") col_code = static_cast<int>(c);
      }
      if (col_family < 0 || col_year < 0 || col_region < 0 || col_code < 0) {
        throw ValidationError("event file header must name family_id, year, region_id and code");
      }
      min_cols = static_cast<std::size_t>(std::max({col_family, col_year, col_region, col_code})) + 1;
      have_header = true;
      continue;
    }

    if (cols.size() < min_cols) {
      report.malformed.push_back({line_no, "expected at least " + std::to_string(min_cols) + " columns"});
      continue;
    }
    EventRecord rec;
    rec.family_id = text::trim(cols[col_family]);
    rec.region_id = text::trim(cols[col_region]);
    const std::string raw_code = text::trim(cols[col_code]);
    if (rec.family_id.empty() || rec.region_id.empty() || raw_code.empty()) {
      report.malformed.push_back({line_no, "empty family_id, region_id or code"});
      continue;
    }
    if (!text::parse_int(cols[col_year], rec.year)) {
      report.malformed.push_back({line_no, "year is not an integer"});
      continue;
    }
    if (rec.year < options.year_min || rec.year > options.year_max) {
      report.rejected.push_back({line_no, "year " + std::to_string(rec.year) + " outside [" +
                                              std::to_string(options.year_min) + ", " +
                                              std::to_string(options.year_max) + "]"});
      continue;
    }
    if (options.regions != nullptr) {
      if (!options.regions->contains(rec.region_id)) {
        report.rejected.push_back({line_no, "unknown region '" + rec.region_id + "'"});
        continue;
      }
      if (options.region_level == RegionLevel::Country) {
        rec.region_id = options.regions->country_of(rec.region_id);
      }
    }
    auto resolved = hierarchy.resolve(raw_code, options.granularity);
    if (!resolved) {
      report.rejected.push_back({line_no, "code '" + raw_code + "' does not resolve at " +
                                              to_string(options.granularity) + " level"});
      continue;
    }
    rec.code = std::move(*resolved);
    report.records.push_back(std::move(rec));
  }

  std::sort(report.records.begin(), report.records.end());
  const auto before = report.records.size();
  report.records.erase(std::unique(report.records.begin(), report.records.end()), report.records.end());
  report.duplicates_collapsed = before - report.records.size();
  return report;
}

std::vector<WeightedCell> split_family_weights(std::span<const EventRecord> family_records) {
  if (family_records.empty()) throw ValidationError("split_family_weights: empty family-year");
  const auto& first = family_records.front();
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& r : family_records) {
    if (r.family_id != first.family_id || r.year != first.year) {
      throw ValidationError("split_family_weights: records span several families or years");
    }
    pairs.emplace(r.region_id, r.code);
  }
  const double share = 1.0 / static_cast<double>(pairs.size());
  std::vector<WeightedCell> out;
  out.reserve(pairs.size());
  for (const auto& [region, field] : pairs) out.push_back({region, field, share});
  return out;
}

double OccurrenceMatrix::total() const {
  double sum = 0.0;
  for (const auto& [key, w] : entries) sum += w;
  return sum;
}

OccurrenceMatrix build_occurrence_matrix(std::span<const EventRecord> records, int year) {
  std::vector<EventRecord> rows;
  for (const auto& r : records) {
    if (r.year == year) rows.push_back(r);
  }
  std::sort(rows.begin(), rows.end());

  OccurrenceMatrix w;
  w.year = year;
  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin + 1;
    while (end < rows.size() && rows[end].family_id == rows[begin].family_id) ++end;
    for (const auto& cell : split_family_weights(std::span(rows).subspan(begin, end - begin))) {
      w.entries[{cell.region_id, cell.field}] += cell.weight;
    }
    ++w.family_count;
    begin = end;
  }
  return w;
}

std::map<int, OccurrenceMatrix> build_occurrence_matrices(std::span<const EventRecord> records,
                                                          int year_min, int year_max) {
  std::map<int, OccurrenceMatrix> out;
  for (int y = year_min; y <= year_max; ++y) out[y] = build_occurrence_matrix(records, y);
  return out;
}

MatrixXd to_dense(const OccurrenceMatrix& w, const Labels& regions, const Labels& fields) {
  MatrixXd dense = MatrixXd::Zero(regions.size(), fields.size());
  for (const auto& [key, weight] : w.entries) {
    dense(regions.index_of(key.first), fields.index_of(key.second)) = weight;
  }
  return dense;
}

Labels collect_regions(std::span<const EventRecord> records) {
  std::set<std::string> names;
  for (const auto& r : records) names.insert(r.region_id);
  return Labels(std::vector<std::string>(names.begin(), names.end()));
}

}  // namespace acnet
