#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tradeoff/error.hpp"
#include "tradeoff/measurements.hpp"

namespace tradeoff::decision {

inline const std::vector<double>& default_taus_ms() {
  static const std::vector<double> taus = {250.0, 500.0, 1000.0};
  return taus;
}

// One model configuration on one dataset, reduced to the three decision objectives.
struct Candidate {
  std::string model_id;
  std::string dataset_id;
  Paradigm paradigm = Paradigm::fine_tuned;
  double f1 = 0.0;  // fraction
  double cost_usd_per_million = 0.0;
  double p50_latency_ms = 0.0;

  std::string label() const { return config_label(model_id, paradigm); }

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

inline void validate(const Candidate& c) {
  const std::string who = c.label() + " on " + c.dataset_id;
  if (!(std::isfinite(c.f1) && c.f1 >= 0.0 && c.f1 <= 1.0))
    throw InvariantError(who + ": f1 must be a fraction in [0, 1]", "f1");
  if (!(std::isfinite(c.cost_usd_per_million) && c.cost_usd_per_million >= 0.0))
    throw InvariantError(who + ": cost must be a finite value >= 0", "cost_usd_per_million");
  if (!(std::isfinite(c.p50_latency_ms) && c.p50_latency_ms >= 0.0))
    throw InvariantError(who + ": latency must be a finite value >= 0", "p50_latency_ms");
}

// ---------------------------------------------------------------------------
// Utility

// Round half away from zero to two decimals.
inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

struct UtilityScore {
  Candidate candidate;
  double tau_ms = 0.0;
  double utility = 0.0;        // full precision
  double display_value = 0.0;  // 100 * utility, rounded to 2 decimals
  int rank = 0;                // 0 until ranked; 1 is best
};

//   U = (f1 / cost) * exp(-p50 / tau)
inline UtilityScore utility_score(const Candidate& c, double tau_ms) {
  validate(c);
  if (!(c.cost_usd_per_million > 0.0))
    throw DomainError(c.label() + " on " + c.dataset_id + ": utility needs cost > 0", "cost_usd_per_million");
  if (!(std::isfinite(tau_ms) && tau_ms > 0.0)) throw DomainError("tau must be a finite value > 0", "tau_ms");
  UtilityScore s;
  s.candidate = c;
  s.tau_ms = tau_ms;
  s.utility = (c.f1 / c.cost_usd_per_million) * std::exp(-c.p50_latency_ms / tau_ms);
  s.display_value = round2(100.0 * s.utility);
  return s;
}

// Strict "ranks ahead of" relation: higher utility first, then lower cost,
// lower latency, and label as the final tie-break.
inline bool ranks_ahead(const UtilityScore& a, const UtilityScore& b) {
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.candidate.cost_usd_per_million != b.candidate.cost_usd_per_million)
    return a.candidate.cost_usd_per_million < b.candidate.cost_usd_per_million;
  if (a.candidate.p50_latency_ms != b.candidate.p50_latency_ms)
    return a.candidate.p50_latency_ms < b.candidate.p50_latency_ms;
  return a.candidate.label() < b.candidate.label();
}

// Sorts by rank and assigns ranks 1..n. Ranks come from full-precision
// utilities; display values never participate.
inline std::vector<UtilityScore> rank_by_utility(std::vector<UtilityScore> scores) {
  if (scores.empty()) throw DomainError("cannot rank an empty score list");
  for (const auto& s : scores) {
    if (s.tau_ms != scores.front().tau_ms || s.candidate.dataset_id != scores.front().candidate.dataset_id)
      throw DomainError("scores to rank must share one dataset and one tau");
  }
  std::stable_sort(scores.begin(), scores.end(), ranks_ahead);
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = static_cast<int>(i + 1);
  return scores;
}

struct UtilityTable {
  std::string dataset_id;
  double tau_ms = 0.0;
  std::vector<UtilityScore> scores;  // in rank order
};

inline std::vector<UtilityTable> tau_sweep(std::span<const Candidate> candidates,
                                           std::span<const double> taus = default_taus_ms()) {
  if (candidates.empty()) throw DomainError("tau sweep needs at least one candidate");
  if (taus.empty()) throw DomainError("tau sweep needs at least one tau", "tau_ms");
  const std::string& dataset = candidates.front().dataset_id;
  for (const auto& c : candidates) {
    if (c.dataset_id != dataset)
      throw DomainError("tau sweep mixes datasets '" + dataset + "' and '" + c.dataset_id + "'", "dataset_id");
  }
  std::vector<UtilityTable> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    std::vector<UtilityScore> scores;
    scores.reserve(candidates.size());
    for (const auto& c : candidates) scores.push_back(utility_score(c, tau));
    out.push_back({dataset, tau, rank_by_utility(std::move(scores))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pareto dominance

enum class ObjectiveSpace { f1_latency_cost_3d, f1_vs_cost, cost_vs_latency, f1_vs_latency };

inline constexpr std::array<ObjectiveSpace, 4> kAllSpaces = {
    ObjectiveSpace::f1_latency_cost_3d, ObjectiveSpace::f1_vs_cost, ObjectiveSpace::cost_vs_latency,
    ObjectiveSpace::f1_vs_latency};

inline std::string_view to_string(ObjectiveSpace s) {
  switch (s) {
    case ObjectiveSpace::f1_latency_cost_3d: return "f1_latency_cost_3d";
    case ObjectiveSpace::f1_vs_cost: return "f1_vs_cost";
    case ObjectiveSpace::cost_vs_latency: return "cost_vs_latency";
    case ObjectiveSpace::f1_vs_latency: return "f1_vs_latency";
  }
  return "unknown";
}

inline std::optional<ObjectiveSpace> parse_space(std::string_view s) {
  for (auto space : kAllSpaces) {
    if (to_string(space) == s) return space;
  }
  return std::nullopt;
}

// Objectives of `c` in `space`, sign-adjusted so that larger is always better.
inline std::vector<double> oriented_objectives(const Candidate& c, ObjectiveSpace space) {
  switch (space) {
    case ObjectiveSpace::f1_latency_cost_3d: return {c.f1, -c.p50_latency_ms, -c.cost_usd_per_million};
    case ObjectiveSpace::f1_vs_cost: return {c.f1, -c.cost_usd_per_million};
    case ObjectiveSpace::cost_vs_latency: return {-c.cost_usd_per_million, -c.p50_latency_ms};
    case ObjectiveSpace::f1_vs_latency: return {c.f1, -c.p50_latency_ms};
  }
  return {};
}

// No worse on every objective, strictly better on at least one.
inline bool dominates(const Candidate& a, const Candidate& b, ObjectiveSpace space) {
  const auto oa = oriented_objectives(a, space);
  const auto ob = oriented_objectives(b, space);
  bool strictly = false;
  for (std::size_t i = 0; i < oa.size(); ++i) {
    if (oa[i] < ob[i]) return false;
    if (oa[i] > ob[i]) strictly = true;
  }
  return strictly;
}

struct ParetoResult {
  ObjectiveSpace space = ObjectiveSpace::f1_latency_cost_3d;
  std::vector<Candidate> candidates;           // input order
  std::vector<std::size_t> frontier;           // ascending indices into candidates
  std::map<std::size_t, std::size_t> dominated_by;  // dominated index -> one dominating index

  bool on_frontier(std::size_t i) const { return !dominated_by.count(i); }
};

// Sort-and-sweep: in descending lexicographic order of the oriented objectives
// a dominator always precedes what it dominates, and anything dominated by a
// dominated point is also dominated by a frontier point, so each candidate only
// needs checking against the frontier found so far.
inline ParetoResult pareto_frontier(std::span<const Candidate> candidates, ObjectiveSpace space) {
  if (candidates.empty()) throw DomainError("Pareto frontier of an empty candidate set");
  ParetoResult result;
  result.space = space;
  result.candidates.assign(candidates.begin(), candidates.end());

  std::vector<std::vector<double>> obj;
  obj.reserve(candidates.size());
  for (const auto& c : candidates) {
    validate(c);
    obj.push_back(oriented_objectives(c, space));
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return obj[a] > obj[b]; });

  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    const auto witness = std::find_if(front.begin(), front.end(), [&](std::size_t f) {
      return dominates(candidates[f], candidates[idx], space);
    });
    if (witness != front.end()) {
      result.dominated_by.emplace(idx, *witness);
    } else {
      front.push_back(idx);
    }
  }
  std::sort(front.begin(), front.end());
  result.frontier = std::move(front);
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoint selection

struct EpochRecord {
  int epoch_index = 1;
  double f1_train = 0.0;
  double f1_val = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// f1_val - |f1_val - f1_train|: equals f1_val at zero gap and penalizes
// over- and underfitting alike.
inline double gap_penalized_score(const EpochRecord& e) { return e.f1_val - std::abs(e.f1_val - e.f1_train); }

// Highest score wins; ties go to the earliest epoch.
inline EpochRecord select_best_epoch(std::span<const EpochRecord> epochs) {
  if (epochs.empty()) throw DomainError("no epochs to select from");
  for (const auto& e : epochs) {
    if (e.epoch_index < 1) throw InvariantError("epoch_index must be >= 1", "epoch_index");
    if (!(e.f1_train >= 0.0 && e.f1_train <= 1.0)) throw InvariantError("f1_train must be in [0, 1]", "f1_train");
    if (!(e.f1_val >= 0.0 && e.f1_val <= 1.0)) throw InvariantError("f1_val must be in [0, 1]", "f1_val");
  }
  const EpochRecord* best = &epochs.front();
  double best_score = gap_penalized_score(*best);
  for (const auto& e : epochs.subspan(1)) {
    const double s = gap_penalized_score(e);
    if (s > best_score || (s == best_score && e.epoch_index < best->epoch_index)) {
      best = &e;
      best_score = s;
    }
  }
  return *best;
}

}  // namespace tradeoff::decision
