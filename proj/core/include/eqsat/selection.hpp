#pragma once

#include <optional>
#include <unordered_map>

#include "eqsat/egraph.hpp"

namespace eqsat {

/// One chosen e-node per e-class; extraction's output. Keys are canonical
/// class ids of the graph the selection was made against.
class Selection {
public:
  void choose(EClassId cls, const ENode& n) { choice_.insert_or_assign(cls, n); }

  bool contains(EClassId cls) const { return choice_.contains(cls); }

  const ENode* chosen(EClassId cls) const {
    auto it = choice_.find(cls);
    return it == choice_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return choice_.size(); }
  bool empty() const { return choice_.empty(); }

  const std::unordered_map<EClassId, ENode, EClassIdHash>& entries() const {
    return choice_;
  }

  bool operator==(const Selection&) const = default;

private:
  std::unordered_map<EClassId, ENode, EClassIdHash> choice_;
};

} // namespace eqsat
