#pragma once

// Boolean state formulas over an explicit state space (variables, labels and
// property constants). Not installed.

#include <memory>
#include <string>
#include <vector>

#include "riskctl/gcl.hpp"
#include "riskctl/synthesis.hpp"

namespace riskctl::detail {

class StateFormulas {
 public:
  StateFormulas(const std::vector<VarInfo>& vars, const std::vector<std::string>& label_names,
                const Constants& constants);

  /// States satisfying `e`; `labels` is indexed [label][state] like label_names.
  std::vector<bool> eval_set(const gcl::Expr& e, const std::vector<std::vector<int>>& states,
                             const std::vector<std::vector<bool>>& labels) const;

  /// Value of a constant expression (thresholds, step bounds).
  gcl::Value constant(const gcl::Expr& e) const;
  double number(const gcl::Expr& e) const;
  std::size_t steps(const gcl::Expr& e) const;

 private:
  std::vector<std::string> label_names_;
  std::unique_ptr<gcl::CompiledProgram> program_;
};

}  // namespace riskctl::detail
