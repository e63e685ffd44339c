#pragma once

// Small graph utilities shared by the analysis code. Not installed.

#include <cstddef>
#include <vector>

namespace riskctl::detail {

/// Strongly connected components (iterative Tarjan). Returns a component id
/// per node; ids are assigned in reverse topological order of the
/// condensation (a component only reaches components with smaller ids).
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& adj,
                                            std::size_t* count = nullptr);

/// Nodes that can reach `targets`, moving backwards only through nodes where
/// `through` holds (targets are always included).
std::vector<bool> backward_reach(const std::vector<std::vector<std::size_t>>& pred, const std::vector<bool>& targets,
                                 const std::vector<bool>& through);

}  // namespace riskctl::detail
