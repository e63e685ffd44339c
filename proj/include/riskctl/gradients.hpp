#pragma once

#include <optional>
#include <string>
#include <vector>

namespace riskctl {

/// Skew-diagonal integer matrix of risk-level changes between modes (or
/// activities). `at(from, to) > 0` means switching improves the risk level.
class GradientMatrix {
 public:
  GradientMatrix() = default;
  GradientMatrix(std::string dimension, std::vector<std::string> labels,
                 std::vector<std::vector<int>> values);

  const std::string& dimension() const noexcept { return dimension_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::optional<std::size_t> index_of(const std::string& label) const;
  int at(std::size_t from, std::size_t to) const { return values_[from][to]; }
  const std::vector<std::vector<int>>& values() const noexcept { return values_; }

  /// Rows k = 0..n-1 with k+1 entries each (diagonal included).
  std::vector<std::vector<int>> lower_left() const;

  bool operator==(const GradientMatrix&) const = default;

 private:
  std::string dimension_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> values_;
};

/// Builds the full matrix from lower-left rows (row k has k+1 entries) by
/// mirroring with a sign flip. Full square rows are accepted as well and must
/// already be skew-diagonal. Throws ModelError on ragged rows, a nonzero
/// diagonal or an inconsistent upper triangle.
GradientMatrix complete_matrix(const std::string& dimension, const std::vector<std::string>& labels,
                               const std::vector<std::vector<int>>& rows);

/// Risk change when switching from `from` to `to`. Throws ModelError for unknown labels.
int gradient(const GradientMatrix& g, const std::string& from, const std::string& to);

struct Model;
struct RiskFactor;
class RiskState;

/// Safety-mode target used when `factor` resumes (or mitigates) in risk state
/// `state`. Other factors that are active or mitigated keep their own safmod
/// targets in demand; among those the mode closest to `current_mode` wins,
/// i.e. the one maximising gradient(candidate, current_mode). Ties go to the
/// earlier label in the safmod matrix. With no competing demand the declared
/// target is returned.
std::string override_target(const RiskFactor& factor, const std::string& declared_target,
                            const RiskState& state, const std::string& current_mode,
                            const Model& model);

/// Same rule over an explicit demand set.
std::string override_target(const GradientMatrix& safmod, const std::string& declared_target,
                            const std::vector<std::string>& demanded,
                            const std::string& current_mode);

}  // namespace riskctl
