#include "acnet/synth.hpp"

#include "acnet/rng.hpp"
#include "text.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>

namespace acnet {

void SynthConfig::validate() const {
  if (n_regions < 1) throw ValidationError("n_regions must be at least 1");
  if (n_fields < 1) throw ValidationError("n_fields must be at least 1");
  if (n_sections < 1 || n_sections > 26 || n_sections > n_fields) {
    throw ValidationError("n_sections must lie in [1, min(26, n_fields)]");
  }
  if ((n_fields + n_sections - 1) / n_sections > 99) throw ValidationError("more than 99 fields per section");
  if (n_years < 1) throw ValidationError("n_years must be at least 1");
  if (!(p_base >= 0.0 && p_base <= 1.0)) throw ValidationError("p_base must lie in [0, 1]");
  if (!(beta >= 1.0)) throw ValidationError("beta must be at least 1");
  if (!(families_per_presence >= 1.0)) throw ValidationError("families_per_presence must be at least 1");
  for (const auto& [s, t] : pairs) {
    if (s < 0 || s >= n_fields || t < 0 || t >= n_fields) throw ValidationError("planted pair references an unknown field");
  }
}

std::vector<std::pair<int, int>> planted_cycle(const std::vector<int>& fields) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t k = 0; k < fields.size(); ++k) out.emplace_back(fields[k], fields[(k + 1) % fields.size()]);
  return out;
}

std::vector<std::string> synth_field_codes(int n_fields, int n_sections) {
  std::vector<std::string> codes;
  std::vector<int> within(static_cast<std::size_t>(n_sections), 0);
  for (int i = 0; i < n_fields; ++i) {
    const int s = static_cast<int>(static_cast<long>(i) * n_sections / n_fields);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d", 'A' + s, ++within[static_cast<std::size_t>(s)]);
    codes.emplace_back(buf);
  }
  return codes;
}

SynthData generate_events(const SynthConfig& config) {
  config.validate();
  SynthData data;
  data.config = config;

  const auto codes = synth_field_codes(config.n_fields, config.n_sections);
  for (const auto& c : codes) {
    const std::string section(1, c[0]);
    if (!data.hierarchy.contains(section)) data.hierarchy.add(section, "");
    data.hierarchy.add(c, section);
  }
  data.fields = Labels(codes);

  std::vector<std::string> regions;
  for (int r = 0; r < config.n_regions; ++r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "R%04d", r);
    regions.emplace_back(buf);
  }
  data.regions = Labels(regions);
  for (const auto& [s, t] : config.pairs) data.truth.emplace_back(codes[static_cast<std::size_t>(s)], codes[static_cast<std::size_t>(t)]);

  std::vector<std::vector<int>> sources(static_cast<std::size_t>(config.n_fields));
  for (const auto& [s, t] : config.pairs) sources[static_cast<std::size_t>(t)].push_back(s);

  const std::uint64_t thr_base = bernoulli_threshold(config.p_base);
  const std::uint64_t thr_boost = bernoulli_threshold(std::min(1.0, config.p_base * config.beta));
  Rng rng = substream(config.seed, {0x53594e54});  // one sequential stream
  std::poisson_distribution<int> extra(config.families_per_presence - 1.0);
  const bool draw_extra = config.families_per_presence > 1.0;

  Mask prev;
  for (int y = 0; y < config.n_years; ++y) {
    const int year = config.year_start + y;
    Mask cur = Mask::Zero(config.n_regions, config.n_fields);
    for (Index r = 0; r < cur.rows(); ++r) {
      for (Index j = 0; j < cur.cols(); ++j) {
        bool boosted = false;
        if (y > 0) {
          for (int s : sources[static_cast<std::size_t>(j)]) boosted = boosted || prev(r, s);
        }
        if (!bernoulli(rng, boosted ? thr_boost : thr_base)) continue;
        cur(r, j) = 1;
        const int families = 1 + (draw_extra ? extra(rng) : 0);
        for (int k = 0; k < families; ++k) {
          char id[96];
          std::snprintf(id, sizeof id, "S%d-%04ld-%02ld-%d", year, static_cast<long>(r), static_cast<long>(j), k);
          data.events.push_back({id, year, regions[static_cast<std::size_t>(r)], codes[static_cast<std::size_t>(j)]});
        }
      }
    }
    data.presences.push_back(cur);
    prev = std::move(cur);
  }
  std::sort(data.events.begin(), data.events.end());
  return data;
}

void write_synth_config(std::ostream& out, const SynthConfig& c) {
  out << "n_regions=" << c.n_regions << '\n'
      << "n_fields=" << c.n_fields << '\n'
      << "n_sections=" << c.n_sections << '\n'
      << "year_start=" << c.year_start << '\n'
      << "n_years=" << c.n_years << '\n'
      << "p_base=" << text::format_double(c.p_base) << '\n'
      << "beta=" << text::format_double(c.beta) << '\n'
      << "families_per_presence=" << text::format_double(c.families_per_presence) << '\n'
      << "seed=" << c.seed << '\n';
  std::vector<std::string> parts;
  for (const auto& [s, t] : c.pairs) parts.push_back(std::to_string(s) + ">" + std::to_string(t));
  out << "pairs=" << text::join(parts, ' ') << '\n';
}

SynthConfig read_synth_config(std::istream& in) {
  SynthConfig c;
  std::string line;
  auto bad = [](const std::string& key) { return ValidationError("synth config: bad value for " + key); };
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("synth config: expected key=value, got '" + line + "'");
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    bool ok = true;
    if (key == "n_regions") ok = text::parse_int(value, c.n_regions);
    else if (key == "n_fields") ok = text::parse_int(value, c.n_fields);
    else if (key == "n_sections") ok = text::parse_int(value, c.n_sections);
    else if (key == "year_start") ok = text::parse_int(value, c.year_start);
    else if (key == "n_years") ok = text::parse_int(value, c.n_years);
    else if (key == "p_base") ok = text::parse_double(value, c.p_base);
    else if (key == "beta") ok = text::parse_double(value, c.beta);
    else if (key == "families_per_presence") ok = text::parse_double(value, c.families_per_presence);
    else if (key == "seed") ok = text::parse_int(value, c.seed);
    else if (key == "pairs") {
      c.pairs.clear();
      for (const auto& tok : text::split(value, ' ')) {
        if (text::trim(tok).empty()) continue;
        const auto parts = text::split(tok, '>');
        std::pair<int, int> p;
        if (parts.size() != 2 || !text::parse_int(parts[0], p.first) || !text::parse_int(parts[1], p.second)) throw bad(key);
        c.pairs.push_back(p);
      }
    } else {
      throw ValidationError("synth config: unknown key " + key);
    }
    if (!ok) throw bad(key);
  }
  c.validate();
  return c;
}

}  // namespace acnet
