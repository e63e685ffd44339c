#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "riskctl/common.hpp"
#include "riskctl/mdp.hpp"
#include "riskctl/synthesis.hpp"

namespace riskctl {

/// Text of the three adversary files.
struct AdversaryText {
  std::string tra, sta, lab;
};

/// `.tra`: "<states> <transitions>" then "src dst prob action" per transition
/// (the action is omitted for unlabelled transitions).
/// `.sta`: "(x,y,...)" then "idx:(v,w,...)" per state.
/// `.lab`: `0="init" 1="deadlock" ...` then "idx: l1 l2" per labelled state.
AdversaryText format_adversary(const Dtmc& d);

/// Inverse of format_adversary. The initial state is the first state carrying
/// "init" (state 0 when there is none). Names are used in error messages.
Dtmc parse_adversary(const AdversaryText& text, const std::string& tra_name = "<tra>",
                     const std::string& sta_name = "<sta>", const std::string& lab_name = "<lab>");

/// Writes `<stem>.tra`, `<stem>.sta` and `<stem>.lab`.
void export_policy(const Dtmc& d, const std::filesystem::path& stem);
void export_policy(const Policy& p, const std::filesystem::path& stem);

Dtmc import_policy(const std::filesystem::path& tra, const std::filesystem::path& sta,
                   const std::filesystem::path& lab);

/// Graphviz rendering; nodes are "index\n(valuation)", edges "action:prob".
/// Adds a warning above 1000 states, where the picture stops being useful.
std::string export_dot(const Mdp& m, std::vector<Diagnostic>* warnings = nullptr);
std::string export_dot(const Dtmc& d, std::vector<Diagnostic>* warnings = nullptr);

struct ArtefactPaths {
  std::filesystem::path model, design_props, policy_props;
};

/// `<stem>.prism`, `<stem>.props`, `<stem>_pol.props`.
ArtefactPaths artefact_paths(const std::filesystem::path& stem);

/// `<dir>/<stem>-adv<n>` (extensions added by export_policy).
std::filesystem::path adversary_stem(const std::filesystem::path& dir, const std::string& stem, std::size_t n);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace riskctl
