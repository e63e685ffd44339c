#include "riskctl/activity_graph.hpp"

#include <cctype>
#include <deque>
#include <sstream>

namespace riskctl {

ActivityLts reachable_activities(const Model& model, const std::string& start) {
  if (!model.activities.count(start)) throw ModelError("unknown start activity " + start);
  ActivityLts lts;
  lts.start = start;
  std::deque<std::string> frontier{start};
  lts.nodes.insert(start);
  while (!frontier.empty()) {
    std::string cur = frontier.front();
    frontier.pop_front();
    for (const auto& next : model.activities.at(cur).successors) {
      if (!model.activities.count(next)) continue;
      lts.edges.emplace(cur, next);
      if (lts.nodes.insert(next).second) frontier.push_back(next);
    }
  }
  return lts;
}

std::string dot_id(const std::string& name) {
  bool plain = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  if (plain && name != "node" && name != "edge" && name != "graph" && name != "digraph" &&
      name != "subgraph" && name != "strict")
    return name;
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string export_activity_dot(const ActivityLts& lts) {
  std::ostringstream os;
  os << "digraph activities {\n";
  os << "  node [shape=ellipse];\n";
  for (const auto& n : lts.nodes) {
    os << "  " << dot_id(n);
    if (n == lts.start) os << " [peripheries=2]";
    os << ";\n";
  }
  for (const auto& [from, to] : lts.edges) os << "  " << dot_id(from) << " -> " << dot_id(to) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace riskctl
