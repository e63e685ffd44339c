#include "graph.hpp"

#include <algorithm>
#include <limits>

namespace riskctl::detail {

std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& adj, std::size_t* count) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  const std::size_t n = adj.size();
  std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> work;  // node, next edge
  std::size_t next_index = 0, next_comp = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != none) continue;
    work.emplace_back(root, 0);
    while (!work.empty()) {
      auto& [v, e] = work.back();
      if (e == 0 && index[v] == none) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (e < adj[v].size()) {
        std::size_t w = adj[v][e++];
        if (index[w] == none) {
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      std::size_t done = v;
      work.pop_back();
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
      if (!work.empty()) {
        std::size_t parent = work.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

std::vector<bool> backward_reach(const std::vector<std::vector<std::size_t>>& pred, const std::vector<bool>& targets,
                                 const std::vector<bool>& through) {
  std::vector<bool> seen = targets;
  std::vector<std::size_t> todo;
  for (std::size_t s = 0; s < targets.size(); ++s)
    if (targets[s]) todo.push_back(s);
  while (!todo.empty()) {
    std::size_t t = todo.back();
    todo.pop_back();
    for (std::size_t s : pred[t]) {
      if (seen[s] || !through[s]) continue;
      seen[s] = true;
      todo.push_back(s);
    }
  }
  return seen;
}

}  // namespace riskctl::detail
