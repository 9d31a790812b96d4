#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tradeoff/error.hpp"
#include "tradeoff/measurements.hpp"

namespace tradeoff::stats {

struct RunSummary {
  std::string metric_name;
  double mean = 0.0;
  double std = 0.0;  // n-1 denominator
  std::size_t n_runs = 0;
  bool std_defined = false;  // false when n_runs == 1; std is then reported as 0
};

// Drops the cold-start prefix of a trace.
inline std::vector<double> trim_warmup(const LatencyTrace& trace) {
  if (trace.warmup_count < 0) throw DomainError("warmup_count must be >= 0", "warmup_count");
  const auto skip = static_cast<std::size_t>(trace.warmup_count);
  if (skip >= trace.samples_ms.size()) {
    throw DomainError("warm-up trimming would leave no samples (" + std::to_string(trace.samples_ms.size()) +
                          " samples, warmup_count " + std::to_string(skip) + ")",
                      "warmup_count");
  }
  return {trace.samples_ms.begin() + static_cast<std::ptrdiff_t>(skip), trace.samples_ms.end()};
}

// Linear-interpolation quantile on the sorted values: h = (n-1)q,
// result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
inline double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw DomainError("percentile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile must lie in [0, 1]", "q");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  // The frac == 0 branch keeps results exact at integer positions.
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double median(std::span<const double> values) { return percentile(values, 0.5); }

// Per-run percentile values are combined with the same interpolated median.
inline double aggregate_percentile_across_runs(std::span<const double> per_run_values) {
  if (per_run_values.empty()) throw DomainError("cannot aggregate zero runs");
  return median(per_run_values);
}

inline RunSummary summarize_mean_std(std::span<const double> per_run_values, std::string metric_name = {}) {
  if (per_run_values.empty()) throw DomainError("cannot summarize zero runs");
  RunSummary s;
  s.metric_name = std::move(metric_name);
  s.n_runs = per_run_values.size();
  s.mean = std::accumulate(per_run_values.begin(), per_run_values.end(), 0.0) / static_cast<double>(s.n_runs);
  if (s.n_runs == 1) return s;
  double ss = 0.0;
  for (double v : per_run_values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n_runs - 1));
  s.std_defined = true;
  return s;
}

// p50/p95/p99 of a trace after warm-up trimming.
inline LatencyPercentiles derive_percentiles(const LatencyTrace& trace) {
  const auto kept = trim_warmup(trace);
  return {percentile(kept, 0.50), percentile(kept, 0.95), percentile(kept, 0.99)};
}

inline LatencyPercentiles to_percentiles(const Latency& latency) {
  if (const auto* t = std::get_if<LatencyTrace>(&latency)) return derive_percentiles(*t);
  return std::get<LatencyPercentiles>(latency);
}

// Median of per-run p50s, p95s and p99s taken separately.
inline LatencyPercentiles aggregate_runs(std::span<const LatencyPercentiles> runs) {
  if (runs.empty()) throw DomainError("cannot aggregate zero runs");
  std::vector<double> p50, p95, p99;
  for (const auto& r : runs) {
    p50.push_back(r.p50_ms);
    p95.push_back(r.p95_ms);
    p99.push_back(r.p99_ms);
  }
  return {aggregate_percentile_across_runs(p50), aggregate_percentile_across_runs(p95),
          aggregate_percentile_across_runs(p99)};
}

}  // namespace tradeoff::stats
