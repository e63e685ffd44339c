#pragma once

#include <map>
#include <string>
#include <vector>

#include "riskctl/common.hpp"
#include "riskctl/dsl.hpp"

namespace riskctl {

struct GenOptions {
  /// Guard on the current safety mode for every safmod-switching mitigation command.
  std::string mitigation_source_guard = "safmod=normal";
  std::string decomposition = "multi-event-concurrent";
};

struct GeneratedArtefacts {
  std::string types;
  std::string formulas;
  std::string controller_module;
  std::map<std::string, std::string> mishap_commands;  // host module -> commands
  std::string rewards;
  std::string design_props;
  std::string policy_props;
  std::vector<std::string> modules;  // item names a MODULEHOOK may refer to
  std::vector<Diagnostic> diagnostics;
};

/// Phase and safety-mode constants plus the global phase and safmod variables.
std::string gen_types(const Model& m);

std::string gen_controller_module(const Model& m, const GenOptions& options = {});

/// Mishap commands keyed by the module hosting them. Commands hosted by the
/// controller are part of gen_controller_module instead.
std::map<std::string, std::string> gen_mishap_commands(const Model& m);

std::string gen_formulas(const Model& m);
std::string gen_rewards(const Model& m);

struct Properties {
  std::string design;
  std::string policy;
  std::vector<Diagnostic> diagnostics;
};
Properties gen_properties(const Model& m);

/// Runs every generator. Throws ModelError when the model cannot be compiled
/// into a controller (see validate with synthesis enabled).
GeneratedArtefacts generate(const Model& m, const GenOptions& options = {});

struct Injected {
  std::string text;
  std::vector<Diagnostic> diagnostics;  // warnings for unplaced fragments
};

/// Replaces `//<%NAME%>` placeholder lines in `tmpl`.
Injected inject(const std::string& tmpl, const GeneratedArtefacts& a, const std::string& template_name = "<template>");

/// Reparses every fragment with the guarded-command parser; throws ParseError
/// naming the fragment on failure.
void check_fragments(const GeneratedArtefacts& a);

/// The name of the controller command that carries the costs of a mode used
/// by `factor` (the safmod command, or the fun command when there is no target).
std::string option_command(const Model& m, const std::string& factor, const std::string& mode);

}  // namespace riskctl
