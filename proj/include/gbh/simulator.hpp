#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbh/procedures.hpp"

namespace gbh {

/// Monte Carlo campaign for Y_i = mu_i + sqrt(1 - rho) X_i + sqrt(rho) X_0.
/// Groups occupy contiguous index ranges in order; within group j the first
/// nonnull_counts[j] indices carry the alternative mean.
struct SimConfig {
  std::size_t m = 200;
  std::vector<std::size_t> group_sizes{50, 50, 50, 50};
  std::vector<std::size_t> nonnull_counts{0, 0, 0, 0};
  std::vector<double> effect_mu{2.0};  // one value shared by all groups, or one per group
  double rho = 0.1;
  double lambda = 0.5;
  double alpha = 0.05;
  Procedure procedure = Procedure::kGbh1;
  std::size_t replications = 20000;
  std::uint64_t seed = 20240517;

  /// Throws std::invalid_argument naming the first broken field.
  void validate() const;
  double mu_for_group(std::size_t j) const;
  std::size_t nonnull_total() const;
  std::vector<std::size_t> labels() const;
};

struct Sample {
  std::vector<double> y;
  std::vector<std::uint8_t> is_null;
};

struct SimSummary {
  double fdr_hat = 0.0;
  double fdr_se = 0.0;
  std::optional<double> power_hat;  // empty when there are no alternatives
  std::optional<double> power_se;
  std::optional<double> bound_value;  // present inside the theorem domain (gbh1/storey)
  std::size_t replications_run = 0;
  std::optional<double> x0;  // set for conditional runs
  SimConfig config;
};

/// Draws X_0 and X_1..X_m from the replication's own Philox substream. When
/// `x0` is given it replaces the drawn X_0; the X_i are unchanged.
Sample generate_sample(const SimConfig& config, std::uint64_t rep_index, std::optional<double> x0 = {});

/// p_i = 1 - Phi(y_i).
std::vector<double> pvalues_from_sample(std::span<const double> y);

/// V / R with 0/0 := 0.
double false_discovery_proportion(const RejectionResult& result, std::span<const std::uint8_t> is_null);

SimSummary run_mc(const SimConfig& config);
SimSummary run_mc_conditional(const SimConfig& config, double x0);

namespace serial {
SimSummary run_mc(const SimConfig& config);
SimSummary run_mc_conditional(const SimConfig& config, double x0);
}  // namespace serial

/// Flat key=value text; '#' starts a comment. Later keys win.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Applies entries on top of the default desk-scale configuration. Keys are
/// the SimConfig field names plus `groups` (equal split of m when
/// group_sizes is absent). Throws std::invalid_argument on unknown keys or
/// bad values.
SimConfig build_sim_config(const std::map<std::string, std::string>& entries);

}  // namespace gbh
