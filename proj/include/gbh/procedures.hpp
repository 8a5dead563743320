#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gbh {

/// p-values together with a partition of their indices into g groups.
/// Indices are 0-based.
class GroupedPValues {
 public:
  /// Throws std::invalid_argument unless every p lies in [0, 1] and the
  /// groups partition {0..m-1} into non-empty sets.
  GroupedPValues(std::vector<double> pvalues, std::vector<std::vector<std::size_t>> groups);

  /// Groups from per-index labels in [0, g); every label in range must occur.
  static GroupedPValues from_labels(std::vector<double> pvalues, std::span<const std::size_t> labels);
  static GroupedPValues single_group(std::vector<double> pvalues);

  std::size_t size() const { return pvalues_.size(); }
  std::size_t group_count() const { return groups_.size(); }
  const std::vector<double>& pvalues() const { return pvalues_; }
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  std::size_t group_of(std::size_t index) const { return group_of_.at(index); }

 private:
  std::vector<double> pvalues_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<std::size_t> group_of_;
};

struct GBHWeights {
  std::vector<double> w;                  // +inf when the group has no p <= lambda
  std::size_t total_below = 0;            // R(lambda)
  std::vector<std::size_t> group_below;   // R_j(lambda)
};

struct RejectionResult {
  std::vector<std::size_t> rejected;      // ascending indices
  std::size_t k_star = 0;
  double threshold = 0.0;                 // k_star * alpha / m
  std::vector<double> weighted_pvalues;
};

enum class Procedure { kGbh1, kStorey, kBh };

Procedure parse_procedure(const std::string& name);
std::string to_string(Procedure p);

/// Benjamini-Hochberg step-up with thresholds k*alpha/m over nonnegative
/// scores. Scores may exceed 1 or be +inf.
RejectionResult bh_step_up(std::span<const double> scores, double alpha);

/// Exhaustive reference for bh_step_up: tries k = m, m-1, ..., 0 and keeps
/// the first k with at least k scores <= k*alpha/m.
RejectionResult step_up_oracle(std::span<const double> scores, double alpha);

GBHWeights gbh1_weights(const GroupedPValues& gp, double lambda);

/// Weight of the group containing `index`, recomputed with p[index] left out.
/// Returned vector has the leave-one-out value for that group only in the
/// corresponding slot; other slots hold the ordinary weights.
GBHWeights gbh1_weights_loo(const GroupedPValues& gp, double lambda, std::size_t index);

/// Weighted p-values p_i * w_{j(i)}; +inf whenever the weight is +inf.
std::vector<double> weight_pvalues(const GroupedPValues& gp, const GBHWeights& weights);

RejectionResult gbh1(const GroupedPValues& gp, double lambda, double alpha);

/// Adaptive BH with pi0 estimate (m - R(lambda) + 1) / (m (1 - lambda)).
RejectionResult storey(std::span<const double> pvalues, double lambda, double alpha);

/// Dispatch on procedure; `lambda` is ignored for kBh.
RejectionResult apply_procedure(Procedure proc, const GroupedPValues& gp, double lambda, double alpha);

}  // namespace gbh
