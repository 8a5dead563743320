#include "gbh/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbh/stat_normal.hpp"

namespace gbh {

namespace {

void check_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
  }
}

double step_threshold(std::size_t k, double alpha, std::size_t m) {
  return static_cast<double>(k) * alpha / static_cast<double>(m);
}

RejectionResult collect(std::span<const double> scores, std::size_t k_star, double alpha) {
  RejectionResult out;
  out.k_star = k_star;
  out.threshold = step_threshold(k_star, alpha, scores.size());
  if (k_star > 0) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] <= out.threshold) out.rejected.push_back(i);
    }
  }
  out.weighted_pvalues.assign(scores.begin(), scores.end());
  return out;
}

void check_scores(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw std::invalid_argument("step-up: no scores");
  check_open_unit(alpha, "alpha");
  for (double s : scores) {
    if (!(s >= 0.0)) throw std::invalid_argument("step-up: scores must be nonnegative");
  }
}

}  // namespace

GroupedPValues::GroupedPValues(std::vector<double> pvalues, std::vector<std::vector<std::size_t>> groups)
    : pvalues_(std::move(pvalues)), groups_(std::move(groups)) {
  const std::size_t m = pvalues_.size();
  if (m == 0) throw std::invalid_argument("GroupedPValues: no p-values");
  if (groups_.empty()) throw std::invalid_argument("GroupedPValues: no groups");
  for (double p : pvalues_) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("GroupedPValues: p-value outside [0, 1]");
  }
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  group_of_.assign(m, unset);
  for (std::size_t j = 0; j < groups_.size(); ++j) {
    if (groups_[j].empty()) throw std::invalid_argument("GroupedPValues: empty group");
    for (std::size_t i : groups_[j]) {
      if (i >= m) throw std::invalid_argument("GroupedPValues: index out of range");
      if (group_of_[i] != unset) throw std::invalid_argument("GroupedPValues: groups overlap");
      group_of_[i] = j;
    }
  }
  if (std::find(group_of_.begin(), group_of_.end(), unset) != group_of_.end()) {
    throw std::invalid_argument("GroupedPValues: groups do not cover every index");
  }
}

GroupedPValues GroupedPValues::from_labels(std::vector<double> pvalues, std::span<const std::size_t> labels) {
  if (labels.size() != pvalues.size()) throw std::invalid_argument("GroupedPValues: label count mismatch");
  std::size_t g = 0;
  for (std::size_t l : labels) g = std::max(g, l + 1);
  std::vector<std::vector<std::size_t>> groups(g);
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return GroupedPValues(std::move(pvalues), std::move(groups));
}

GroupedPValues GroupedPValues::single_group(std::vector<double> pvalues) {
  std::vector<std::size_t> all(pvalues.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return GroupedPValues(std::move(pvalues), {std::move(all)});
}

Procedure parse_procedure(const std::string& name) {
  if (name == "gbh1") return Procedure::kGbh1;
  if (name == "storey") return Procedure::kStorey;
  if (name == "bh") return Procedure::kBh;
  throw std::invalid_argument("unknown procedure '" + name + "' (expected gbh1, storey or bh)");
}

std::string to_string(Procedure p) {
  switch (p) {
    case Procedure::kGbh1: return "gbh1";
    case Procedure::kStorey: return "storey";
    case Procedure::kBh: return "bh";
  }
  return "unknown";
}

RejectionResult bh_step_up(std::span<const double> scores, double alpha) {
  check_scores(scores, alpha);
  const std::size_t m = scores.size();
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t k_star = 0;
  for (std::size_t k = m; k >= 1; --k) {
    if (sorted[k - 1] <= step_threshold(k, alpha, m)) {
      k_star = k;
      break;
    }
  }
  return collect(scores, k_star, alpha);
}

RejectionResult step_up_oracle(std::span<const double> scores, double alpha) {
  check_scores(scores, alpha);
  const std::size_t m = scores.size();
  for (std::size_t k = m; k >= 1; --k) {
    const double t = step_threshold(k, alpha, m);
    const auto below = static_cast<std::size_t>(
        std::count_if(scores.begin(), scores.end(), [t](double s) { return s <= t; }));
    if (below >= k) return collect(scores, k, alpha);
  }
  return collect(scores, 0, alpha);
}

GBHWeights gbh1_weights(const GroupedPValues& gp, double lambda) {
  check_open_unit(lambda, "lambda");
  const std::size_t m = gp.size();
  const std::size_t g = gp.group_count();
  GBHWeights out;
  out.group_below.assign(g, 0);
  for (std::size_t j = 0; j < g; ++j) {
    for (std::size_t i : gp.groups()[j]) {
      if (gp.pvalues()[i] <= lambda) ++out.group_below[j];
    }
    out.total_below += out.group_below[j];
  }
  out.w.resize(g);
  const double scale = static_cast<double>(m) * (1.0 - lambda);
  for (std::size_t j = 0; j < g; ++j) {
    const double n_j = static_cast<double>(gp.groups()[j].size());
    const double r_j = static_cast<double>(out.group_below[j]);
    const double r = static_cast<double>(out.total_below);
    out.w[j] = out.group_below[j] == 0
                   ? kInf
                   : (n_j - r_j + 1.0) * (r + static_cast<double>(g) - 1.0) / (scale * r_j);
  }
  return out;
}

GBHWeights gbh1_weights_loo(const GroupedPValues& gp, double lambda, std::size_t index) {
  if (index >= gp.size()) throw std::invalid_argument("gbh1_weights_loo: index out of range");
  GBHWeights out = gbh1_weights(gp, lambda);
  const std::size_t j = gp.group_of(index);
  if (gp.pvalues()[index] <= lambda) {
    --out.group_below[j];
    --out.total_below;
  }
  const double n_j = static_cast<double>(gp.groups()[j].size());
  const double r_j = static_cast<double>(out.group_below[j]);
  const double r = static_cast<double>(out.total_below);
  const double g = static_cast<double>(gp.group_count());
  out.w[j] = (n_j - r_j) * (r + g) /
             (static_cast<double>(gp.size()) * (1.0 - lambda) * (r_j + 1.0));
  return out;
}

std::vector<double> weight_pvalues(const GroupedPValues& gp, const GBHWeights& weights) {
  std::vector<double> out(gp.size());
  for (std::size_t i = 0; i < gp.size(); ++i) {
    const double w = weights.w[gp.group_of(i)];
    // p = 0 with w = inf needs R_j = 0 and p <= lambda at once; cannot occur.
    out[i] = std::isinf(w) ? kInf : gp.pvalues()[i] * w;
  }
  return out;
}

RejectionResult gbh1(const GroupedPValues& gp, double lambda, double alpha) {
  const GBHWeights weights = gbh1_weights(gp, lambda);
  const std::vector<double> weighted = weight_pvalues(gp, weights);
  return bh_step_up(weighted, alpha);
}

RejectionResult storey(std::span<const double> pvalues, double lambda, double alpha) {
  check_open_unit(lambda, "lambda");
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("storey: p-value outside [0, 1]");
  }
  const std::size_t m = pvalues.size();
  const auto below = static_cast<std::size_t>(
      std::count_if(pvalues.begin(), pvalues.end(), [lambda](double p) { return p <= lambda; }));
  const double w = (static_cast<double>(m) - static_cast<double>(below) + 1.0) /
                   (static_cast<double>(m) * (1.0 - lambda));
  std::vector<double> weighted(m);
  for (std::size_t i = 0; i < m; ++i) weighted[i] = pvalues[i] * w;
  return bh_step_up(weighted, alpha);
}

RejectionResult apply_procedure(Procedure proc, const GroupedPValues& gp, double lambda, double alpha) {
  switch (proc) {
    case Procedure::kGbh1: return gbh1(gp, lambda, alpha);
    case Procedure::kStorey: return storey(gp.pvalues(), lambda, alpha);
    case Procedure::kBh: return bh_step_up(gp.pvalues(), alpha);
  }
  throw std::invalid_argument("unknown procedure");
}

}  // namespace gbh
