#pragma once

#include <set>
#include <string>
#include <utility>

#include "riskctl/dsl.hpp"

namespace riskctl {

/// Activities reachable from a start activity along (resolved) successor edges.
struct ActivityLts {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
  std::string start;
};

/// Throws ModelError if `start` is not a declared activity. Expects includes
/// to be resolved already.
ActivityLts reachable_activities(const Model& model, const std::string& start);

/// DOT digraph with nodes in lexicographic order; the start node has a double border.
std::string export_activity_dot(const ActivityLts& lts);

/// Quotes a DOT identifier when needed.
std::string dot_id(const std::string& name);

}  // namespace riskctl
