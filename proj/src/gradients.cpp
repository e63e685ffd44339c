#include "riskctl/gradients.hpp"

#include <algorithm>

#include "riskctl/dsl.hpp"
#include "riskctl/risk_space.hpp"

namespace riskctl {

GradientMatrix::GradientMatrix(std::string dimension, std::vector<std::string> labels,
                               std::vector<std::vector<int>> values)
    : dimension_(std::move(dimension)), labels_(std::move(labels)), values_(std::move(values)) {}

std::optional<std::size_t> GradientMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<std::vector<int>> GradientMatrix::lower_left() const {
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < values_.size(); ++i)
    rows.emplace_back(values_[i].begin(), values_[i].begin() + static_cast<std::ptrdiff_t>(i) + 1);
  return rows;
}

GradientMatrix complete_matrix(const std::string& dimension, const std::vector<std::string>& labels,
                               const std::vector<std::vector<int>>& rows) {
  const std::size_t n = labels.size();
  if (rows.size() != n)
    throw ModelError("matrix " + dimension + ": " + std::to_string(rows.size()) + " rows for " +
                     std::to_string(n) + " labels");
  bool full = n > 1 && std::all_of(rows.begin(), rows.end(),
                                   [n](const std::vector<int>& r) { return r.size() == n; });
  std::vector<std::vector<int>> g(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!full && row.size() != i + 1)
      throw ModelError("matrix " + dimension + ": ragged row '" + labels[i] + "' has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(i + 1));
    if (row[i] != 0)
      throw ModelError("matrix " + dimension + ": nonzero diagonal at '" + labels[i] + "'");
    for (std::size_t j = 0; j < i; ++j) {
      g[i][j] = row[j];
      g[j][i] = -row[j];
    }
  }
  if (full) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rows[i][j] != -rows[j][i])
          throw ModelError("matrix " + dimension + ": entries (" + labels[i] + "," + labels[j] +
                           ") and (" + labels[j] + "," + labels[i] + ") are not skew-symmetric");
  }
  return GradientMatrix(dimension, labels, std::move(g));
}

int gradient(const GradientMatrix& g, const std::string& from, const std::string& to) {
  auto i = g.index_of(from);
  auto j = g.index_of(to);
  if (!i) throw ModelError("matrix " + g.dimension() + ": unknown label '" + from + "'");
  if (!j) throw ModelError("matrix " + g.dimension() + ": unknown label '" + to + "'");
  return g.at(*i, *j);
}

std::string override_target(const GradientMatrix& safmod, const std::string& declared_target,
                            const std::vector<std::string>& demanded,
                            const std::string& current_mode) {
  if (!safmod.index_of(declared_target))
    throw ModelError("target '" + declared_target + "' is not a label of matrix " +
                     safmod.dimension());
  auto current = safmod.index_of(current_mode);
  if (!current) throw ModelError("unknown current mode '" + current_mode + "'");
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < safmod.size(); ++k) {
    if (std::find(demanded.begin(), demanded.end(), safmod.labels()[k]) == demanded.end()) continue;
    if (!best || safmod.at(k, *current) > safmod.at(*best, *current)) best = k;
  }
  return best ? safmod.labels()[*best] : declared_target;
}

std::string override_target(const RiskFactor& factor, const std::string& declared_target,
                            const RiskState& state, const std::string& current_mode,
                            const Model& model) {
  const GradientMatrix* safmod = model.matrix("safmod");
  if (!safmod) throw ModelError("no safmod gradient matrix declared");
  RiskSpace space(model);
  std::vector<std::string> demanded;
  for (std::size_t g = 0; g < space.factors().size(); ++g) {
    const std::string& name = space.factors()[g];
    if (name == factor.name) continue;
    Phase p = state.phase(g);
    if (p != Phase::Act && p != Phase::Mit) continue;
    for (const ModeRef& ref : model.factors.at(name).mitigated_by) {
      auto mode = model.modes.find(ref.mode);
      if (mode == model.modes.end() || !mode->second.target) continue;
      if (mode->second.target->variable != "safmod") continue;
      demanded.push_back(mode->second.target->value);
    }
  }
  return override_target(*safmod, declared_target, demanded, current_mode);
}

}  // namespace riskctl
