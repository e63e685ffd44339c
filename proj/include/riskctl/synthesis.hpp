#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskctl/gcl.hpp"
#include "riskctl/mdp.hpp"

namespace riskctl {

enum class Objective { Max, Min };

struct SolveOptions {
  double epsilon = 1e-6;  // stop when the largest per-state change is below this
  std::size_t max_iterations = 1'000'000;
  /// States carrying this label become absorbing with zero reward. Empty means
  /// only deadlocks absorb; a name missing from the model is an error.
  std::string terminal_label;
  /// Choices within tie_tolerance * max(1, |best|) of the optimum count as optimal.
  double tie_tolerance = 1e-6;
};

/// Memoryless deterministic resolution of an Mdp together with the Dtmc it
/// induces. Absorbing states (deadlocks, terminal states) have no chosen
/// choice and a probability-1 self-loop in the Dtmc.
struct Policy {
  std::vector<std::optional<std::size_t>> choice;
  Dtmc dtmc;
};

/// Absorbing states under `terminal_label` (see SolveOptions).
std::vector<bool> absorbing_states(const Mdp& mdp, const std::string& terminal_label);

/// Throws AnalysisError naming a state when some end component outside the
/// absorbing set carries non-zero reward.
void check_end_components(const Mdp& mdp, const RewardStructure& reward, const std::vector<bool>& absorbing);

/// Expected total reward until absorption, per state.
std::vector<double> value_iterate(const Mdp& mdp, const RewardStructure& reward, Objective obj,
                                  const SolveOptions& options = {});
std::vector<double> value_iterate(const Mdp& mdp, const std::string& reward, Objective obj,
                                  const SolveOptions& options = {});

/// Optimal choice per state (lowest index among ties, preferring choices that
/// lead towards the absorbing set so zero-reward loops are left).
Policy extract_policy(const Mdp& mdp, const RewardStructure& reward, const std::vector<double>& values, Objective obj,
                      const SolveOptions& options = {});
Policy extract_policy(const Mdp& mdp, const std::string& reward, const std::vector<double>& values, Objective obj,
                      const SolveOptions& options = {});

/// Builds the Dtmc for a fixed choice per state. Rewards are copied per state
/// (state plus chosen transition reward; zero where absorbing).
Policy induce_policy(const Mdp& mdp, std::vector<std::optional<std::size_t>> choice);

/// Expected total reward of a Dtmc reward vector, per state; +inf where a
/// bottom strongly connected component with non-zero reward is reachable.
std::vector<double> total_reward(const Dtmc& d, const std::vector<double>& reward);

struct Goal {
  std::string reward;
  Objective dir = Objective::Max;
};

struct ParetoPoint {
  double r1 = 0.0, r2 = 0.0;  // values at the initial state
  Policy policy;
};

/// Weighted-sum approximation of the Pareto front. Weight w scales the first
/// goal and 1-w the second; w = 0 and w = 1 optimise lexicographically.
/// Returns the non-dominated points sorted by r1.
std::vector<ParetoPoint> pareto_sweep(const Mdp& mdp, const Goal& g1, const Goal& g2, std::size_t k,
                                      const SolveOptions& options = {});
std::vector<ParetoPoint> pareto_sweep(const Mdp& mdp, const Goal& g1, const Goal& g2,
                                      const std::vector<double>& weights, const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Queries

enum class Cmp { Query, Lt, Le, Gt, Ge };

struct PathFormula {
  enum class Kind { Next, Eventually, Globally, Until, WeakUntil };
  Kind kind = Kind::Eventually;
  gcl::ExprPtr left;   // Until / WeakUntil only
  gcl::ExprPtr right;  // the operand for the unary forms
  gcl::ExprPtr steps;  // <=k bound, null when unbounded
};

struct Query {
  enum class Kind { Prob, Reward, Multi, Filter };
  Kind kind = Kind::Prob;
  std::optional<Objective> opt;  // Pmax / Rmin and friends
  Cmp cmp = Cmp::Query;
  gcl::ExprPtr threshold;
  PathFormula path;        // Prob
  std::string reward;      // Reward; empty selects the first structure
  gcl::ExprPtr horizon;    // Reward: C<=t, null for C
  std::vector<Query> args;  // Multi objectives, or the single Filter operand
  std::string filter_op;   // avg, min, max
  gcl::ExprPtr states;     // Filter state set
  std::string text;
};

struct PropertyFile {
  std::vector<gcl::ConstDecl> constants;
  std::vector<Query> queries;
};

PropertyFile parse_properties(std::string_view text, const std::string& file = "<props>");
Query parse_query(std::string_view text, const std::string& file = "<query>");

/// Canonical text of a query (reparses to the same query).
std::string to_string(const Query& q);

/// Values for the constants a query may use.
using Constants = std::map<std::string, gcl::Value>;

/// Resolves the declared constants of a property file, applying overrides.
/// Constants left undefined are omitted; queries using them fail with a
/// message naming the constant.
Constants resolve_constants(const PropertyFile& props, const Constants& overrides = {});

/// Evaluates a query on a Dtmc: the value at the initial state (1 or 0 for
/// bounded P / R operators, the aggregate for filters).
double check_dtmc(const Dtmc& d, const Query& q, const Constants& constants = {});
double check_dtmc(const Dtmc& d, std::string_view query, const Constants& constants = {});

/// Per-state values of a P or R query on a Dtmc.
std::vector<double> dtmc_values(const Dtmc& d, const Query& q, const Constants& constants = {});

struct QueryResult {
  enum class Kind { Number, Boolean, Pareto };
  Kind kind = Kind::Number;
  double value = 0.0;  // number, or 1 / 0
  std::vector<ParetoPoint> points;
  std::vector<Policy> witnesses;  // policies worth exporting, in order
};

struct SweepOptions {
  SolveOptions solve;
  std::size_t points = 11;
};

/// Answers a design-space query on an Mdp: single R/P objectives by value
/// iteration, multi(...) of two objectives by pareto_sweep, and constrained
/// multi(...) by checking every sweep witness against the constraints.
QueryResult solve_query(const Mdp& mdp, const Query& q, const Constants& constants = {},
                        const SweepOptions& options = {});

}  // namespace riskctl
