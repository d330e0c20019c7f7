#include "acnet/core.hpp"

namespace acnet {

Labels::Labels(std::vector<std::string> names) : names_(std::move(names)) {
  lookup_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!lookup_.emplace(names_[i], static_cast<Index>(i)).second) {
      throw ValidationError("duplicate label '" + names_[i] + "'");
    }
  }
}

Index Labels::index_of(const std::string& name) const {
  auto it = lookup_.find(name);
  if (it == lookup_.end()) {
    throw ValidationError("unknown label '" + name + "'");
  }
  return it->second;
}

}  // namespace acnet
