#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gbh::detail {

/// Mean and sum of squared deviations, mergeable in a fixed order.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& o) {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double n = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * (o.count / n);
    m2 += o.m2 + delta * delta * (count * o.count / n);
    count = n;
  }

  double sample_sd() const { return count > 1.0 ? std::sqrt(m2 / (count - 1.0)) : 0.0; }
  double standard_error() const { return count > 0.0 ? sample_sd() / std::sqrt(count) : 0.0; }
};

inline constexpr std::size_t kReductionBlock = 256;

/// Runs `per_rep(r)` for r in [0, n) and reduces its K outputs. Replications
/// are grouped in fixed blocks of kReductionBlock; blocks are merged in index
/// order, so the result is bit-identical for any thread count and for
/// parallel == false.
template <std::size_t K, class PerRep>
std::array<RunningStats, K> blocked_reduce(std::size_t n, PerRep&& per_rep, bool parallel) {
  const std::size_t n_blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::array<RunningStats, K>> blocks(n_blocks);
  const auto nb = static_cast<std::ptrdiff_t>(n_blocks);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t end = begin + kReductionBlock < n ? begin + kReductionBlock : n;
    auto& acc = blocks[static_cast<std::size_t>(b)];
    for (std::size_t r = begin; r < end; ++r) {
      const std::array<double, K> values = per_rep(static_cast<std::uint64_t>(r));
      for (std::size_t k = 0; k < K; ++k) acc[k].add(values[k]);
    }
  }
  std::array<RunningStats, K> total{};
  for (const auto& block : blocks) {
    for (std::size_t k = 0; k < K; ++k) total[k].merge(block[k]);
  }
  return total;
}

}  // namespace gbh::detail
