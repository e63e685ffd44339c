#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "riskctl/common.hpp"
#include "riskctl/gradients.hpp"

namespace riskctl {

/// Reference to a mode, optionally qualified by an uninterpreted namespace tag
/// (`SHARE.HRWdet`, `.HRWres`, `HRWdet`).
struct ModeRef {
  std::string tag;
  std::string mode;
  bool dotted = false;  // written with a '.' separator (".x" or "A.x")

  std::string str() const;
  bool operator==(const ModeRef& o) const { return tag == o.tag && mode == o.mode && dotted == o.dotted; }
};

struct Activity {
  std::string name;
  std::vector<std::string> includes;
  std::vector<std::string> successors;
  std::vector<std::string> factors;  // owned factor names
  SourcePos pos;
};

struct RequiresNOf {
  int threshold = 1;
  std::vector<std::string> factors;
  bool operator==(const RequiresNOf&) const = default;
};

struct RiskFactor {
  std::string name;
  std::string desc;
  std::string guard;  // ground-truth predicate, target-language text
  std::vector<ModeRef> detected_by;
  std::vector<ModeRef> mitigated_by;
  std::vector<ModeRef> resumed_by;
  std::vector<std::string> requires_;
  std::vector<std::string> prevents;
  std::vector<std::string> mit_prevents_mit;
  std::optional<RequiresNOf> requires_n_of;
  std::optional<std::string> mis;   // mishap action label
  std::optional<std::string> prob;  // decimal literal text, kept verbatim
  std::optional<double> sev;
  bool final = false;
  std::string owner;  // owning activity, empty if declared at top level
  SourcePos pos;

  double probability() const;
};

/// Assignment of a state variable to a named value, e.g. `safmod=srmst`.
struct ModeTarget {
  std::string variable;
  std::string value;
  bool operator==(const ModeTarget&) const = default;
};

struct Mode {
  std::string name;
  std::string desc;
  std::string guard;
  std::string update;
  std::optional<ModeTarget> target;
  std::vector<std::string> embodied_by;
  std::optional<double> disruption;
  std::optional<double> nuisance;
  std::optional<double> effort;
  SourcePos pos;
};

enum class ItemKind { Agent, Controller };

struct Item {
  std::string name;
  ItemKind kind = ItemKind::Agent;
  std::vector<std::string> valid_acts;  // empty means all activities
  std::vector<std::string> hooks;       // actions whose mishap commands this module hosts
  std::vector<std::pair<std::string, std::string>> locals;  // var name -> declaration text
  SourcePos pos;
};

struct WeightRow {
  std::string action;
  std::string guard;
  std::vector<std::string> values;  // one per non-guard column
  SourcePos pos;
};

/// All `Weights` blocks merged into one table. The implicit first column is
/// always `guard`, so `columns` lists the value columns only.
struct WeightTable {
  std::vector<std::string> columns;
  std::vector<WeightRow> rows;

  const WeightRow* find(const std::string& action) const;
  std::optional<std::size_t> column_index(const std::string& column) const;
};

struct ApplicationEntry {
  std::string name;
  std::string text;
  SourcePos pos;
};

struct Model {
  std::map<std::string, Activity> activities;
  std::map<std::string, RiskFactor> factors;
  std::map<std::string, Mode> modes;
  std::map<std::string, Item> items;
  std::map<std::string, GradientMatrix> matrices;
  WeightTable weights;
  std::vector<ApplicationEntry> application;  // declaration order
  std::string application_name;

  const ApplicationEntry* find_application(const std::string& name) const;
  const Item* controller() const;
  const GradientMatrix* matrix(const std::string& dimension) const;
  std::vector<std::string> activity_order() const;
};

struct SourceFile {
  std::string filename;
  std::string text;
};

/// Parses one or more DSL sources into a single model. An `Activity` block
/// without a name takes the stem of the file it appears in.
Model parse_model(const std::vector<SourceFile>& sources);

/// Reads the given files, then keeps loading sibling `<name>.yap` files for
/// activities that are referenced but not yet declared.
Model load_model_files(const std::vector<std::filesystem::path>& paths);

/// Flattens `include` inheritance: successors and owned factors become the
/// union over all transitively included activities. Throws ModelError on a cycle.
Model resolve_includes(const Model& model);

struct ValidateOptions {
  bool synthesis = false;  // require exactly one CONTROLLER item
};

std::vector<Diagnostic> validate(const Model& model, const ValidateOptions& options = {});

/// Canonical DSL text for a model; reparsing yields a structurally equal model.
std::string print_model(const Model& model);

/// Structural equality, ignoring source positions.
bool structurally_equal(const Model& a, const Model& b);

}  // namespace riskctl
