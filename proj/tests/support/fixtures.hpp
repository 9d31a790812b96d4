#pragma once

#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tradeoff/costing.hpp"
#include "tradeoff/pipeline.hpp"

namespace tradeoff::testing {

// Candidates for one dataset with costs recomputed from the bundled records.
inline std::vector<decision::Candidate> fixture_candidates(const std::string& dataset) {
  const auto configs =
      evaluate_configs(summarize_configs(load_records(fixture_records())), costing::load_pricing(fixture_pricing()));
  return candidates_for(configs, dataset);
}

inline const decision::Candidate& find(const std::vector<decision::Candidate>& cs, const std::string& label) {
  for (const auto& c : cs) {
    if (c.label() == label) return c;
  }
  throw LookupError("no candidate labelled " + label);
}

inline std::size_t index_of(const std::vector<decision::Candidate>& cs, const std::string& label) {
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i].label() == label) return i;
  }
  throw LookupError("no candidate labelled " + label);
}

}  // namespace tradeoff::testing
