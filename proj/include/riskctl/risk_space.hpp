#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskctl/dsl.hpp"

namespace riskctl {

/// Life-cycle phase of one risk factor. `Sfd` is "safed": resumption done,
/// safety function withdrawn, not yet re-armed.
enum class Phase : std::uint8_t { Inact, Act, Mit, Sfd, Mis };

const char* phase_name(Phase p) noexcept;
inline constexpr int kPhaseCount = 5;

enum class EventKind : std::uint8_t { Endangerment, Mitigation, Resumption, Settle, Mishap };

struct RiskEvent {
  EventKind kind = EventKind::Endangerment;
  std::size_t factor = 0;  // index into RiskSpace::factors()
  std::size_t option = 0;  // mitigation option, 0 otherwise

  auto operator<=>(const RiskEvent&) const = default;
};

/// Phase vector over the factors of a model, in factor-name order.
class RiskState {
 public:
  RiskState() = default;
  explicit RiskState(std::vector<Phase> phases) : phases_(std::move(phases)) {}

  Phase phase(std::size_t factor) const { return phases_.at(factor); }
  void set(std::size_t factor, Phase p) { phases_.at(factor) = p; }
  std::size_t size() const noexcept { return phases_.size(); }
  const std::vector<Phase>& phases() const noexcept { return phases_; }

  auto operator<=>(const RiskState&) const = default;

 private:
  std::vector<Phase> phases_;
};

struct RiskTransition {
  std::size_t from;
  RiskEvent event;
  std::size_t to;
};

struct RiskLts {
  std::vector<std::string> factors;
  std::vector<RiskState> states;  // index 0 is the all-inact state
  std::vector<RiskTransition> transitions;
};

struct TraceStep {
  RiskState state;
  std::optional<RiskEvent> event;  // event leading out of `state`; empty on the last step
};

/// The abstract risk state machine of a model. Factor dependencies are
/// resolved to indices once at construction.
class RiskSpace {
 public:
  explicit RiskSpace(const Model& model);

  const std::vector<std::string>& factors() const noexcept { return names_; }
  std::size_t factor_index(const std::string& name) const;
  RiskState initial() const { return RiskState(std::vector<Phase>(names_.size(), Phase::Inact)); }

  /// Enabled events in canonical order (factor, kind, option).
  std::vector<RiskEvent> enabled_events(const RiskState& s) const;
  bool is_enabled(const RiskState& s, const RiskEvent& e) const;

  /// Applies an enabled event; throws ModelError if `e` is not enabled in `s`.
  RiskState step(const RiskState& s, const RiskEvent& e) const;

  /// Breadth-first closure from the all-inact state.
  RiskLts explore(std::size_t state_cap = 1'000'000) const;

  /// Uniform random walk driven by std::mt19937_64 seeded with `seed`.
  std::vector<TraceStep> simulate(std::uint64_t seed, std::size_t steps) const;

  std::string format_state(const RiskState& s) const;
  std::string format_event(const RiskEvent& e) const;

 private:
  struct FactorInfo {
    std::vector<std::size_t> requires_;
    std::vector<std::size_t> prevented_by;      // g with f in prevents(g)
    std::vector<std::size_t> mit_prevented_by;  // g with f in mitPreventsMit(g)
    int n_of = 0;
    std::vector<std::size_t> n_of_list;
    std::size_t options = 0;
    bool has_mishap = false;
  };

  std::vector<std::string> names_;
  std::vector<FactorInfo> info_;
};

/// One `state --event--> state` line per step.
std::string format_trace(const RiskSpace& space, const std::vector<TraceStep>& trace);

std::string export_risk_dot(const RiskSpace& space, const RiskLts& lts);

}  // namespace riskctl
