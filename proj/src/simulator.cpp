#include "gbh/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gbh/bound.hpp"
#include "gbh/detail/blocked_reduce.hpp"
#include "gbh/philox.hpp"
#include "gbh/stat_normal.hpp"

namespace gbh {

namespace {

struct RepOutcome {
  double fdp;
  double tpp;
};

RepOutcome one_replication(const SimConfig& config, std::uint64_t rep, std::optional<double> x0) {
  const Sample sample = generate_sample(config, rep, x0);
  const GroupedPValues gp = GroupedPValues::from_labels(pvalues_from_sample(sample.y), config.labels());
  const RejectionResult result = apply_procedure(config.procedure, gp, config.lambda, config.alpha);
  std::size_t true_pos = 0;
  for (std::size_t i : result.rejected) true_pos += sample.is_null[i] ? 0 : 1;
  const std::size_t alternatives = config.nonnull_total();
  const double tpp = static_cast<double>(true_pos) / static_cast<double>(std::max<std::size_t>(alternatives, 1));
  return {false_discovery_proportion(result, sample.is_null), tpp};
}

SimSummary run(const SimConfig& config, std::optional<double> x0, bool parallel) {
  config.validate();
  const auto stats = detail::blocked_reduce<2>(
      config.replications,
      [&](std::uint64_t rep) {
        const RepOutcome o = one_replication(config, rep, x0);
        return std::array<double, 2>{o.fdp, o.tpp};
      },
      parallel);

  SimSummary out;
  out.config = config;
  out.x0 = x0;
  out.replications_run = config.replications;
  out.fdr_hat = stats[0].mean;
  out.fdr_se = stats[0].standard_error();
  if (config.nonnull_total() > 0) {
    out.power_hat = stats[1].mean;
    out.power_se = stats[1].standard_error();
  }
  const BoundInput in{config.lambda, config.rho, config.alpha};
  if (config.procedure != Procedure::kBh && in_theorem_domain(in)) {
    out.bound_value = fdr_bound(in).total;
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const std::string& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  if (group_sizes.empty()) throw std::invalid_argument("group_sizes must not be empty");
  if (std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0}) != m) {
    throw std::invalid_argument("group_sizes must sum to m");
  }
  for (std::size_t n : group_sizes) {
    if (n == 0) throw std::invalid_argument("group_sizes entries must be >= 1");
  }
  if (nonnull_counts.size() != group_sizes.size()) {
    throw std::invalid_argument("nonnull_counts needs one entry per group");
  }
  for (std::size_t j = 0; j < group_sizes.size(); ++j) {
    if (nonnull_counts[j] > group_sizes[j]) throw std::invalid_argument("nonnull_counts[j] exceeds group_sizes[j]");
  }
  if (effect_mu.size() != 1 && effect_mu.size() != group_sizes.size()) {
    throw std::invalid_argument("effect_mu needs one value or one per group");
  }
  for (double mu : effect_mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("effect_mu must be finite and > 0");
  }
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (replications == 0) throw std::invalid_argument("replications must be >= 1");
}

double SimConfig::mu_for_group(std::size_t j) const { return effect_mu.size() == 1 ? effect_mu[0] : effect_mu[j]; }

std::size_t SimConfig::nonnull_total() const {
  return std::accumulate(nonnull_counts.begin(), nonnull_counts.end(), std::size_t{0});
}

std::vector<std::size_t> SimConfig::labels() const {
  std::vector<std::size_t> out;
  out.reserve(m);
  for (std::size_t j = 0; j < group_sizes.size(); ++j) out.insert(out.end(), group_sizes[j], j);
  return out;
}

Sample generate_sample(const SimConfig& config, std::uint64_t rep_index, std::optional<double> x0) {
  PhiloxStream stream(config.seed, rep_index);
  const double drawn_x0 = stream.next_normal();
  const double common = std::sqrt(config.rho) * x0.value_or(drawn_x0);
  const double own = std::sqrt(1.0 - config.rho);

  Sample out;
  out.y.resize(config.m);
  out.is_null.resize(config.m);
  std::size_t i = 0;
  for (std::size_t j = 0; j < config.group_sizes.size(); ++j) {
    for (std::size_t k = 0; k < config.group_sizes[j]; ++k, ++i) {
      const bool alternative = k < config.nonnull_counts[j];
      const double mu = alternative ? config.mu_for_group(j) : 0.0;
      out.y[i] = mu + own * stream.next_normal() + common;
      out.is_null[i] = alternative ? 0 : 1;
    }
  }
  return out;
}

std::vector<double> pvalues_from_sample(std::span<const double> y) {
  std::vector<double> p(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) p[i] = norm_sf(y[i]);
  return p;
}

double false_discovery_proportion(const RejectionResult& result, std::span<const std::uint8_t> is_null) {
  if (result.rejected.empty()) return 0.0;
  std::size_t false_rej = 0;
  for (std::size_t i : result.rejected) {
    if (i >= is_null.size()) throw std::invalid_argument("false_discovery_proportion: truth mask too short");
    false_rej += is_null[i] ? 1 : 0;
  }
  return static_cast<double>(false_rej) / static_cast<double>(result.rejected.size());
}

SimSummary run_mc(const SimConfig& config) { return run(config, std::nullopt, true); }
SimSummary run_mc_conditional(const SimConfig& config, double x0) { return run(config, x0, true); }

namespace serial {
SimSummary run_mc(const SimConfig& config) { return run(config, std::nullopt, false); }
SimSummary run_mc_conditional(const SimConfig& config, double x0) { return run(config, x0, false); }
}  // namespace serial

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

SimConfig build_sim_config(const std::map<std::string, std::string>& entries) {
  SimConfig c;
  bool have_sizes = false;
  bool have_nonnull = false;
  bool have_m = false;
  std::size_t groups = c.group_sizes.size();
  for (const auto& [key, value] : entries) {
    if (key == "m") {
      c.m = parse_number<std::size_t>(key, value);
      have_m = true;
    } else if (key == "groups") {
      groups = parse_number<std::size_t>(key, value);
      if (groups == 0) throw std::invalid_argument("config key 'groups' must be >= 1");
    } else if (key == "group_sizes") {
      c.group_sizes = parse_number_list<std::size_t>(key, value);
      have_sizes = true;
    } else if (key == "nonnull_counts") {
      c.nonnull_counts = parse_number_list<std::size_t>(key, value);
      have_nonnull = true;
    } else if (key == "effect_mu") {
      c.effect_mu = parse_number_list<double>(key, value);
    } else if (key == "rho") {
      c.rho = parse_number<double>(key, value);
    } else if (key == "lambda") {
      c.lambda = parse_number<double>(key, value);
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "procedure") {
      c.procedure = parse_procedure(value);
    } else if (key == "replications") {
      c.replications = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (have_sizes) {
    if (!have_m) c.m = std::accumulate(c.group_sizes.begin(), c.group_sizes.end(), std::size_t{0});
  } else {
    if (groups > c.m) throw std::invalid_argument("more groups than hypotheses");
    c.group_sizes.assign(groups, c.m / groups);
    for (std::size_t j = 0; j < c.m % groups; ++j) ++c.group_sizes[j];
  }
  if (!have_nonnull) c.nonnull_counts.assign(c.group_sizes.size(), 0);
  c.validate();
  return c;
}

}  // namespace gbh
