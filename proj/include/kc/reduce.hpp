#pragma once

// Deterministic summation. The index range is cut into fixed blocks; each
// block is summed by a fixed pairwise tree and the block partials are combined
// by the same tree. The grouping never depends on the thread count, so the
// parallel and serial paths return bitwise identical results.

#include <cstddef>
#include <vector>

namespace kc {

inline constexpr std::size_t kReduceBlock = 2048;

namespace detail {

template <class Term>
double pairwise_sum(const Term& term, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 16) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(term, lo, mid) + pairwise_sum(term, mid, hi);
}

inline double pairwise_partials(const std::vector<double>& partials) {
  if (partials.empty())
    return 0.0;
  return pairwise_sum([&](std::size_t i) { return partials[i]; }, 0, partials.size());
}

} // namespace detail

/// Sum of term(i) for i in [0, count), OpenMP-parallel over blocks.
template <class Term>
double deterministic_sum(std::size_t count, const Term& term) {
  const std::size_t blocks = (count + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partials(blocks, 0.0);
  const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = lo + kReduceBlock < count ? lo + kReduceBlock : count;
    partials[static_cast<std::size_t>(b)] = detail::pairwise_sum(term, lo, hi);
  }
  return detail::pairwise_partials(partials);
}

namespace serial {

/// Single-threaded reference for kc::deterministic_sum (same tree).
template <class Term>
double deterministic_sum(std::size_t count, const Term& term) {
  const std::size_t blocks = (count + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partials(blocks, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = lo + kReduceBlock < count ? lo + kReduceBlock : count;
    partials[b] = detail::pairwise_sum(term, lo, hi);
  }
  return detail::pairwise_partials(partials);
}

} // namespace serial
} // namespace kc
