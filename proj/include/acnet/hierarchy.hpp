#pragma once

#include "acnet/core.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace acnet {

// Depth in the technology-code tree. Sections are the roots.
enum class Level : int { Section = 0, Class = 1, Subclass = 2 };

Level parse_level(const std::string& name);
std::string to_string(Level level);

// Titles of the eight IPC sections, keyed by section letter.
const std::map<std::string, std::string>& ipc_section_titles();

// Tree of hierarchical field codes (section -> class -> subclass). Each code
// has at most one parent; codes without a parent are sections.
class CodeHierarchy {
 public:
  CodeHierarchy() = default;

  // Builds from (code, parent) pairs; an empty parent marks a section.
  static CodeHierarchy from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

  // Derives the tree from IPC-style codes using the fixed prefix lengths
  // 1 (section), 3 (class) and 4 (subclass), e.g. "H01L" -> "H01" -> "H".
  static CodeHierarchy from_ipc_codes(const std::vector<std::string>& codes);

  // Reads "code,parent" lines; an optional header "code,parent" is skipped.
  static CodeHierarchy read(std::istream& in, char delimiter = ',');
  void write(std::ostream& out) const;

  void add(const std::string& code, const std::string& parent);

  bool contains(const std::string& code) const { return parent_.count(code) != 0; }
  int depth(const std::string& code) const;
  const std::string& parent(const std::string& code) const;

  // Ancestor of a known code at the requested level, or nullopt when the code
  // sits above that level.
  std::optional<std::string> ancestor_at(const std::string& code, Level level) const;

  // Maps a raw code (possibly finer than the tree, e.g. "H01L 21/02") onto the
  // requested level through its longest known prefix. nullopt when no prefix
  // is known or the match is coarser than the level.
  std::optional<std::string> resolve(const std::string& raw_code, Level level) const;

  std::string section_of(const std::string& code) const;

  // All codes at a level, sorted lexicographically so that codes of one
  // section form a contiguous block.
  std::vector<std::string> codes_at(Level level) const;
  std::vector<std::string> sections() const { return codes_at(Level::Section); }

  std::size_t size() const { return parent_.size(); }

  // Throws ValidationError on cycles, orphans or depth beyond subclass.
  void validate() const;

 private:
  std::map<std::string, std::string> parent_;
};

}  // namespace acnet
