#include "acnet/hierarchy.hpp"

#include "text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace acnet {

Level parse_level(const std::string& name) {
  if (name == "section") return Level::Section;
  if (name == "class") return Level::Class;
  if (name == "subclass") return Level::Subclass;
  throw ValidationError("unknown granularity '" + name + "' (expected section, class or subclass)");
}

std::string to_string(Level level) {
  switch (level) {
    case Level::Section: return "section";
    case Level::Class: return "class";
    case Level::Subclass: return "subclass";
  }
  return "unknown";
}

const std::map<std::string, std::string>& ipc_section_titles() {
  static const std::map<std::string, std::string> titles = {
      {"A", "HUMAN NECESSITIES"},
      {"B", "PERFORMING OPERATIONS; TRANSPORTING"},
      {"C", "CHEMISTRY; METALLURGY"},
      {"D", "TEXTILES; PAPER"},
      {"E", "FIXED CONSTRUCTIONS"},
      {"F", "MECHANICAL ENGINEERING; LIGHTING; HEATING; WEAPONS; BLASTING"},
      {"G", "PHYSICS"},
      {"H", "ELECTRICITY"},
  };
  return titles;
}

CodeHierarchy CodeHierarchy::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  CodeHierarchy h;
  for (const auto& [code, parent] : pairs) h.add(code, parent);
  h.validate();
  return h;
}

CodeHierarchy CodeHierarchy::from_ipc_codes(const std::vector<std::string>& codes) {
  CodeHierarchy h;
  for (const auto& raw : codes) {
    const std::string code = text::normalize_code(raw);
    if (code.empty()) continue;
    const std::string section = code.substr(0, 1);
    if (!h.contains(section)) h.add(section, "");
    if (code.size() >= 3) {
      const std::string cls = code.substr(0, 3);
      if (!h.contains(cls)) h.add(cls, section);
      if (code.size() >= 4) {
        const std::string sub = code.substr(0, 4);
        if (!h.contains(sub)) h.add(sub, cls);
      }
    }
  }
  h.validate();
  return h;
}

CodeHierarchy CodeHierarchy::read(std::istream& in, char delimiter) {
  CodeHierarchy h;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cols = text::split(line, delimiter);
    if (line_no == 1 && !cols.empty() && text::trim(cols[0]) == "code") continue;
    if (cols.size() == 1) cols.emplace_back();
    if (cols.size() != 2) {
      throw ValidationError("hierarchy line " + std::to_string(line_no) + ": expected 'code,parent'");
    }
    h.add(text::trim(cols[0]), text::trim(cols[1]));
  }
  h.validate();
  return h;
}

void CodeHierarchy::write(std::ostream& out) const {
  out << "code,parent\n";
  for (const auto& [code, parent] : parent_) out << code << ',' << parent << '\n';
}

void CodeHierarchy::add(const std::string& code, const std::string& parent) {
  if (code.empty()) throw ValidationError("empty code in hierarchy");
  auto [it, inserted] = parent_.emplace(code, parent);
  if (!inserted && it->second != parent) {
    throw ValidationError("code '" + code + "' has two parents ('" + it->second + "', '" + parent + "')");
  }
}

int CodeHierarchy::depth(const std::string& code) const {
  int d = 0;
  const std::string* cur = &parent(code);
  while (!cur->empty()) {
    ++d;
    if (d > static_cast<int>(parent_.size())) throw ValidationError("cycle in code hierarchy at '" + code + "'");
    cur = &parent(*cur);
  }
  return d;
}

const std::string& CodeHierarchy::parent(const std::string& code) const {
  auto it = parent_.find(code);
  if (it == parent_.end()) throw ValidationError("unknown code '" + code + "'");
  return it->second;
}

std::optional<std::string> CodeHierarchy::ancestor_at(const std::string& code, Level level) const {
  const int target = static_cast<int>(level);
  int d = depth(code);
  if (d < target) return std::nullopt;
  std::string cur = code;
  while (d > target) {
    cur = parent(cur);
    --d;
  }
  return cur;
}

std::optional<std::string> CodeHierarchy::resolve(const std::string& raw_code, Level level) const {
  const std::string code = text::normalize_code(raw_code);
  for (std::size_t len = code.size(); len > 0; --len) {
    auto it = parent_.find(code.substr(0, len));
    if (it != parent_.end()) return ancestor_at(it->first, level);
  }
  return std::nullopt;
}

std::string CodeHierarchy::section_of(const std::string& code) const {
  return *ancestor_at(code, Level::Section);
}

std::vector<std::string> CodeHierarchy::codes_at(Level level) const {
  std::vector<std::string> out;
  for (const auto& [code, parent] : parent_) {
    if (depth(code) == static_cast<int>(level)) out.push_back(code);
  }
  return out;  // std::map iteration is already lexicographic
}

void CodeHierarchy::validate() const {
  for (const auto& [code, parent] : parent_) {
    if (!parent.empty() && !contains(parent)) {
      throw ValidationError("code '" + code + "' references unknown parent '" + parent + "'");
    }
    if (depth(code) > static_cast<int>(Level::Subclass)) {
      throw ValidationError("code '" + code + "' is deeper than subclass level");
    }
  }
}

}  // namespace acnet
