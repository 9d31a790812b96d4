#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "tradeoff/costing.hpp"
#include "tradeoff/decision.hpp"
#include "tradeoff/measurements.hpp"
#include "tradeoff/pipeline.hpp"
#include "tradeoff/report.hpp"

namespace tradeoff::verify {

inline constexpr double kCostTolerance = 0.02;     // USD per 1M requests
inline constexpr double kUtilityTolerance = 0.01;  // display units (100 x U)
inline constexpr double kFloatSlack = 1e-9;

struct ExpectedCost {
  std::string dataset_id;
  std::string model_id;
  Paradigm paradigm = Paradigm::fine_tuned;
  double usd_per_million_requests = 0.0;
};

struct ExpectedUtility {
  std::string dataset_id;
  std::string model_id;
  Paradigm paradigm = Paradigm::fine_tuned;
  double tau_ms = 0.0;
  double display_value = 0.0;
  std::optional<int> rank;
};

namespace detail {

template <class Fn>
auto parse_lines(std::istream& in, Fn&& parse_one) {
  std::vector<decltype(parse_one(json{}))> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (tradeoff::detail::is_skippable(line)) continue;
    try {
      out.push_back(parse_one(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw SyntaxError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what(), line_no);
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what(), e.field());
    }
  }
  return out;
}

inline Paradigm read_paradigm(tradeoff::detail::ObjectReader& r) {
  const std::string s = r.string("paradigm");
  const auto p = parse_paradigm(s);
  if (!p) throw SchemaError("field 'paradigm': unknown value '" + s + "'", "paradigm");
  return *p;
}

}  // namespace detail

inline std::vector<ExpectedCost> parse_expected_costs(std::istream& in) {
  return detail::parse_lines(in, [](const json& j) {
    tradeoff::detail::ObjectReader r(j, "");
    ExpectedCost e;
    e.dataset_id = r.string("dataset_id");
    e.model_id = r.string("model_id");
    e.paradigm = detail::read_paradigm(r);
    e.usd_per_million_requests = r.number("usd_per_million_requests");
    r.finish();
    return e;
  });
}

inline std::vector<ExpectedUtility> parse_expected_utility(std::istream& in) {
  return detail::parse_lines(in, [](const json& j) {
    tradeoff::detail::ObjectReader r(j, "");
    ExpectedUtility e;
    e.dataset_id = r.string("dataset_id");
    e.model_id = r.string("model_id");
    e.paradigm = detail::read_paradigm(r);
    e.tau_ms = r.number("tau_ms");
    e.display_value = r.number("display_value");
    if (const json* rk = r.optional("rank")) {
      if (!rk->is_number_integer()) throw SchemaError("field 'rank': expected an integer", "rank");
      e.rank = rk->get<int>();
    }
    r.finish();
    return e;
  });
}

struct Check {
  enum class Kind { cost, utility, rank };
  Kind kind;
  std::string dataset_id;
  std::string label;
  std::optional<double> tau_ms;
  double expected = 0.0;
  std::optional<double> actual;  // empty when the configuration is missing
  double tolerance = 0.0;
  bool pass = false;
};

inline std::string_view to_string(Check::Kind k) {
  switch (k) {
    case Check::Kind::cost: return "cost";
    case Check::Kind::utility: return "utility";
    case Check::Kind::rank: return "rank";
  }
  return "?";
}

struct Result {
  std::vector<Check> checks;
  std::vector<std::string> warnings;

  std::size_t count(Check::Kind k) const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [&](const Check& c) { return c.kind == k; }));
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
  }
  bool ok() const { return failures() == 0; }
};

inline bool within(double actual, double expected, double tol) { return std::abs(actual - expected) <= tol + kFloatSlack; }

// Recomputes every expected cost from the record inputs, then every expected
// utility cell and rank. Utility takes the expected cost cell as its cost input;
// configurations without one fall back to the recomputed cost.
inline Result verify_tables(const std::vector<MeasurementRecord>& records, const costing::PricingSnapshot& pricing,
                            const std::vector<ExpectedCost>& expected_costs,
                            const std::vector<ExpectedUtility>& expected_utility) {
  Result res;
  const auto configs = evaluate_configs(summarize_configs(records), pricing);
  using Key = std::tuple<std::string, std::string, Paradigm>;
  std::map<Key, const EvaluatedConfig*> by_key;
  for (const auto& c : configs) by_key[{c.summary.dataset_id, c.summary.model_id, c.summary.paradigm}] = &c;

  std::map<Key, double> published_cost;
  for (const auto& e : expected_costs) {
    const Key key{e.dataset_id, e.model_id, e.paradigm};
    published_cost[key] = e.usd_per_million_requests;
    Check chk{Check::Kind::cost, e.dataset_id, config_label(e.model_id, e.paradigm), std::nullopt,
              e.usd_per_million_requests, std::nullopt, kCostTolerance, false};
    if (const auto it = by_key.find(key); it != by_key.end()) {
      chk.actual = it->second->cost.usd_per_million_requests;
      chk.pass = within(*chk.actual, chk.expected, kCostTolerance);
    }
    res.checks.push_back(chk);
  }

  // Group expected utility cells by dataset; each dataset is swept over its taus.
  std::map<std::string, std::vector<const ExpectedUtility*>> by_dataset;
  for (const auto& e : expected_utility) by_dataset[e.dataset_id].push_back(&e);
  bool warned_rank = false;
  for (const auto& [ds, cells] : by_dataset) {
    std::vector<decision::Candidate> cands;
    for (const auto& c : configs) {
      if (c.summary.dataset_id != ds) continue;
      decision::Candidate cand = c.candidate;
      const Key key{ds, c.summary.model_id, c.summary.paradigm};
      if (const auto it = published_cost.find(key); it != published_cost.end()) {
        cand.cost_usd_per_million = it->second;
      } else {
        res.warnings.push_back(fmt::format("{} on {}: no published cost; utility uses the recomputed cost",
                                           c.summary.label(), ds));
      }
      cands.push_back(cand);
    }
    std::set<double> tau_set;
    for (const auto* e : cells) tau_set.insert(e->tau_ms);
    const std::vector<double> taus(tau_set.begin(), tau_set.end());
    std::vector<decision::UtilityTable> tables;
    if (!cands.empty()) tables = decision::tau_sweep(cands, taus);

    for (const auto* e : cells) {
      const std::string label = config_label(e->model_id, e->paradigm);
      const decision::UtilityScore* found = nullptr;
      for (const auto& t : tables) {
        if (t.tau_ms != e->tau_ms) continue;
        for (const auto& s : t.scores) {
          if (s.candidate.model_id == e->model_id && s.candidate.paradigm == e->paradigm) found = &s;
        }
      }
      Check u{Check::Kind::utility, ds, label, e->tau_ms, e->display_value, std::nullopt, kUtilityTolerance, false};
      if (found) {
        u.actual = found->display_value;
        u.pass = within(*u.actual, u.expected, kUtilityTolerance);
      }
      res.checks.push_back(u);
      if (!e->rank) {
        if (!warned_rank) res.warnings.push_back("expected ranks missing; rank checks skipped for those cells");
        warned_rank = true;
        continue;
      }
      Check r{Check::Kind::rank, ds, label, e->tau_ms, static_cast<double>(*e->rank), std::nullopt, 0.0, false};
      if (found) {
        r.actual = found->rank;
        r.pass = found->rank == *e->rank;
      }
      res.checks.push_back(r);
    }
  }
  return res;
}

struct FixturePaths {
  std::filesystem::path records;
  std::filesystem::path pricing;
  std::filesystem::path expected_costs;
  std::filesystem::path expected_utility;
};

inline FixturePaths bundled_fixtures(const std::filesystem::path& root) {
  return {root / "data" / "fixtures" / "paper_records.jsonl", root / "pricing" / "paper_snapshot.json",
          root / "data" / "fixtures" / "paper_expected_costs.jsonl",
          root / "data" / "fixtures" / "paper_expected_utility.jsonl"};
}

inline Result verify_files(const FixturePaths& p) {
  auto open = [](const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LookupError("cannot open fixture file '" + path.string() + "'", path.string());
    return in;
  };
  auto records = load_records(p.records);
  auto pricing = costing::load_pricing(p.pricing);
  auto ec_in = open(p.expected_costs);
  auto eu_in = open(p.expected_utility);
  return verify_tables(records, pricing, parse_expected_costs(ec_in), parse_expected_utility(eu_in));
}

inline std::string render(const Result& r, report::Format f) {
  if (f == report::Format::json) {
    json checks = json::array();
    for (const auto& c : r.checks) {
      checks.push_back(json{{"kind", std::string(to_string(c.kind))},
                            {"dataset_id", c.dataset_id},
                            {"label", c.label},
                            {"tau_ms", c.tau_ms ? json(*c.tau_ms) : json(nullptr)},
                            {"expected", c.expected},
                            {"actual", c.actual ? json(*c.actual) : json(nullptr)},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass}});
    }
    return json{{"ok", r.ok()}, {"failures", r.failures()}, {"checks", checks}, {"warnings", r.warnings}}.dump(2) + "\n";
  }
  std::string out;
  if (f == report::Format::csv) {
    out = "kind,dataset_id,label,tau_ms,expected,actual,tolerance,pass\n";
    for (const auto& c : r.checks) {
      out += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(c.kind), c.dataset_id, c.label,
                         c.tau_ms ? report::num(*c.tau_ms) : "", report::num(c.expected),
                         c.actual ? report::num(*c.actual) : "", report::num(c.tolerance), c.pass ? "true" : "false");
    }
    return out;
  }
  for (const auto& c : r.checks) {
    if (c.pass) continue;
    out += fmt::format("FAIL {:<7} {:<8} {:<26} {:<10} expected {} actual {} (tolerance {})\n", to_string(c.kind),
                       c.dataset_id, c.label, c.tau_ms ? fmt::format("tau={}", report::num(*c.tau_ms)) : "",
                       report::num(c.expected), c.actual ? report::num(*c.actual) : "missing", report::num(c.tolerance));
  }
  for (auto k : {Check::Kind::cost, Check::Kind::utility, Check::Kind::rank}) {
    std::size_t fails = 0;
    for (const auto& c : r.checks) fails += (c.kind == k && !c.pass);
    out += fmt::format("{:<8} {} checked, {} failed\n", to_string(k), r.count(k), fails);
  }
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  out += r.ok() ? "verify-paper: all checks passed\n" : "verify-paper: MISMATCH\n";
  return out;
}

}  // namespace tradeoff::verify
