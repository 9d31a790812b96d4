#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tradeoff/costing.hpp"
#include "tradeoff/decision.hpp"
#include "tradeoff/measurements.hpp"
#include "tradeoff/stats.hpp"

namespace tradeoff {

// All runs of one model configuration (model_id + paradigm) on one dataset,
// reduced per the measurement protocol: quality as mean +- std across runs,
// latency percentiles as the median of per-run percentiles.
struct ConfigSummary {
  std::string model_id;
  std::string dataset_id;
  Paradigm paradigm = Paradigm::fine_tuned;
  std::size_t record_count = 0;
  std::int64_t run_count = 0;
  stats::RunSummary f1;
  stats::RunSummary precision;
  stats::RunSummary recall;
  stats::RunSummary accuracy;
  LatencyPercentiles latency;
  std::optional<LatencyPercentiles> ttft;
  std::optional<TokenUsage> tokens;
  std::optional<ResourceAllocation> resources;

  std::string label() const { return config_label(model_id, paradigm); }
};

// Groups are returned sorted by dataset_id, then label. Records repeating a
// run_id within a group are skipped (validate_consistency reports them).
inline std::vector<ConfigSummary> summarize_configs(const std::vector<MeasurementRecord>& records) {
  struct Acc {
    std::set<std::string> run_ids;
    std::vector<const MeasurementRecord*> recs;
  };
  std::map<std::tuple<std::string, std::string, Paradigm>, Acc> groups;
  for (const auto& r : records) {
    auto& acc = groups[{r.dataset_id(), r.model_id(), r.paradigm()}];
    if (acc.run_ids.insert(to_string(r.run_id())).second) acc.recs.push_back(&r);
  }

  std::vector<ConfigSummary> out;
  for (const auto& [key, acc] : groups) {
    const auto& [dataset, model, paradigm] = key;
    ConfigSummary s;
    s.model_id = model;
    s.dataset_id = dataset;
    s.paradigm = paradigm;
    s.record_count = acc.recs.size();

    std::vector<double> f1, precision, recall, accuracy, in_tok, out_tok;
    std::vector<LatencyPercentiles> lat, ttft;
    for (const MeasurementRecord* r : acc.recs) {
      s.run_count += r->runs_aggregated();
      f1.push_back(r->quality().f1_macro);
      precision.push_back(r->quality().precision_macro);
      recall.push_back(r->quality().recall_macro);
      accuracy.push_back(r->quality().accuracy);
      lat.push_back(stats::to_percentiles(r->latency()));
      if (r->ttft()) ttft.push_back(stats::to_percentiles(*r->ttft()));
      if (r->tokens()) {
        in_tok.push_back(r->tokens()->avg_input_tokens_per_request);
        out_tok.push_back(r->tokens()->avg_output_tokens_per_request);
      }
      if (r->resources()) {
        if (s.resources && !(*s.resources == *r->resources()))
          throw InvariantError(s.label() + " on " + dataset + ": runs disagree on resource allocation", "resources");
        s.resources = r->resources();
      }
    }
    s.f1 = stats::summarize_mean_std(f1, "f1_macro");
    s.precision = stats::summarize_mean_std(precision, "precision_macro");
    s.recall = stats::summarize_mean_std(recall, "recall_macro");
    s.accuracy = stats::summarize_mean_std(accuracy, "accuracy");
    s.latency = stats::aggregate_runs(lat);
    if (!ttft.empty()) s.ttft = stats::aggregate_runs(ttft);
    if (!in_tok.empty()) {
      s.tokens = TokenUsage{stats::summarize_mean_std(in_tok).mean, stats::summarize_mean_std(out_tok).mean};
    }
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const ConfigSummary& a, const ConfigSummary& b) {
    return std::tie(a.dataset_id, a.model_id, a.paradigm) < std::tie(b.dataset_id, b.model_id, b.paradigm);
  });
  return out;
}

// Encoder configurations are priced by serverless compute time at p50 latency;
// prompted configurations by token usage. TTFT never enters cost.
inline costing::CostEstimate estimate_cost(const ConfigSummary& s, const costing::PricingSnapshot& pricing) {
  costing::CostEstimate est =
      is_prompted(s.paradigm)
          ? costing::llm_cost_per_million(*s.tokens, costing::token_price_for(pricing, s.model_id))
          : costing::encoder_cost_per_million(s.latency.p50_ms, *s.resources, pricing.serving_prices);
  est.model_id = s.model_id;
  est.dataset_id = s.dataset_id;
  est.paradigm = s.paradigm;
  return est;
}

inline decision::Candidate to_candidate(const ConfigSummary& s, const costing::CostEstimate& cost) {
  return {s.model_id, s.dataset_id, s.paradigm, s.f1.mean, cost.usd_per_million_requests, s.latency.p50_ms};
}

struct EvaluatedConfig {
  ConfigSummary summary;
  costing::CostEstimate cost;
  decision::Candidate candidate;
};

inline std::vector<EvaluatedConfig> evaluate_configs(const std::vector<ConfigSummary>& summaries,
                                                     const costing::PricingSnapshot& pricing) {
  std::vector<EvaluatedConfig> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) {
    auto cost = estimate_cost(s, pricing);
    auto cand = to_candidate(s, cost);
    out.push_back({s, std::move(cost), std::move(cand)});
  }
  return out;
}

// Dataset ids in alphabetical order.
inline std::vector<std::string> dataset_ids(const std::vector<EvaluatedConfig>& configs) {
  std::set<std::string> ids;
  for (const auto& c : configs) ids.insert(c.summary.dataset_id);
  return {ids.begin(), ids.end()};
}

inline std::vector<decision::Candidate> candidates_for(const std::vector<EvaluatedConfig>& configs,
                                                       const std::string& dataset_id) {
  std::vector<decision::Candidate> out;
  for (const auto& c : configs) {
    if (c.summary.dataset_id == dataset_id) out.push_back(c.candidate);
  }
  return out;
}

}  // namespace tradeoff
