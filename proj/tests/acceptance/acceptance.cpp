// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/service_harness.hpp"
#include "tradeoff/costing.hpp"
#include "tradeoff/decision.hpp"
#include "tradeoff/pipeline.hpp"
#include "tradeoff/stats.hpp"
#include "tradeoff/verify.hpp"

using namespace tradeoff;
using decision::Candidate;
using decision::ObjectiveSpace;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Key = std::tuple<std::string, std::string, Paradigm>;

struct Fixtures {
  std::vector<MeasurementRecord> records = load_records(testing::fixture_records());
  costing::PricingSnapshot pricing = costing::load_pricing(testing::fixture_pricing());
  std::vector<EvaluatedConfig> configs = evaluate_configs(summarize_configs(records), pricing);
  std::vector<verify::ExpectedCost> costs;
  std::vector<verify::ExpectedUtility> utility;

  Fixtures() {
    std::ifstream c(testing::fixture_costs());
    costs = verify::parse_expected_costs(c);
    std::ifstream u(testing::fixture_utility());
    utility = verify::parse_expected_utility(u);
  }

  std::map<Key, double> published_costs() const {
    std::map<Key, double> out;
    for (const auto& e : costs) out[{e.dataset_id, e.model_id, e.paradigm}] = e.usd_per_million_requests;
    return out;
  }

  // Utility tables per dataset; with published = true the cost input is the printed cost cell.
  std::map<std::pair<std::string, double>, decision::UtilityTable> tables(bool published) const {
    const auto pc = published_costs();
    std::map<std::pair<std::string, double>, decision::UtilityTable> out;
    for (const auto& ds : dataset_ids(configs)) {
      auto cands = candidates_for(configs, ds);
      if (published) {
        for (auto& c : cands) c.cost_usd_per_million = pc.at({c.dataset_id, c.model_id, c.paradigm});
      }
      for (auto& t : decision::tau_sweep(cands)) out[{ds, t.tau_ms}] = std::move(t);
    }
    return out;
  }
};

const decision::UtilityScore* find_score(const decision::UtilityTable& t, const std::string& model, Paradigm p) {
  for (const auto& s : t.scores) {
    if (s.candidate.model_id == model && s.candidate.paradigm == p) return &s;
  }
  return nullptr;
}

Verdict cost_reproduction(const Fixtures& fx) {
  std::size_t ok = 0;
  double worst = 0;
  std::string misses;
  for (const auto& e : fx.costs) {
    const EvaluatedConfig* hit = nullptr;
    for (const auto& c : fx.configs) {
      if (c.summary.dataset_id == e.dataset_id && c.summary.model_id == e.model_id && c.summary.paradigm == e.paradigm)
        hit = &c;
    }
    if (!hit) {
      misses += " missing:" + e.dataset_id + "/" + config_label(e.model_id, e.paradigm);
      continue;
    }
    const double d = std::abs(hit->cost.usd_per_million_requests - e.usd_per_million_requests);
    worst = std::max(worst, d);
    if (d <= 0.02 + 1e-9) {
      ++ok;
    } else {
      misses += fmt::format(" {}/{}:{:.4f}", e.dataset_id, config_label(e.model_id, e.paradigm), d);
    }
  }
  return {ok == 28 && fx.costs.size() == 28,
          fmt::format("{}/28 cost cells within +-0.02 USD, max |dev| {:.4f}{}", ok, worst, misses)};
}

Verdict utility_reproduction(const Fixtures& fx, bool published) {
  const auto tables = fx.tables(published);
  std::size_t ok = 0;
  double worst = 0;
  std::string misses;
  for (const auto& e : fx.utility) {
    const auto it = tables.find({e.dataset_id, e.tau_ms});
    const auto* s = it == tables.end() ? nullptr : find_score(it->second, e.model_id, e.paradigm);
    if (!s) continue;
    const double d = std::abs(s->display_value - e.display_value);
    worst = std::max(worst, d);
    if (d <= 0.01 + 1e-9) {
      ++ok;
    } else {
      misses += fmt::format(" {}/{}@{}:{:.2f}vs{:.2f}", e.dataset_id, config_label(e.model_id, e.paradigm), e.tau_ms,
                            s->display_value, e.display_value);
    }
  }
  return {ok == 84 && fx.utility.size() == 84,
          fmt::format("{}/84 utility cells within +-0.01, max |dev| {:.4f}{}", ok, worst, misses)};
}

Verdict rank_reproduction(const Fixtures& fx, bool published) {
  const auto tables = fx.tables(published);
  std::size_t ok = 0;
  std::string misses;
  for (const auto& e : fx.utility) {
    const auto it = tables.find({e.dataset_id, e.tau_ms});
    const auto* s = it == tables.end() ? nullptr : find_score(it->second, e.model_id, e.paradigm);
    if (s && e.rank && s->rank == *e.rank) {
      ++ok;
    } else {
      misses += fmt::format(" {}/{}@{}", e.dataset_id, config_label(e.model_id, e.paradigm), e.tau_ms);
    }
  }
  // the two cases called out explicitly
  const auto& sst2 = tables.at({"sst2", 250.0});
  const auto* cfs = find_score(sst2, "claude-sonnet-4.5", Paradigm::few_shot);
  const auto* czs = find_score(sst2, "claude-sonnet-4.5", Paradigm::zero_shot);
  const bool sst2_case = cfs && czs && cfs->rank == 6 && czs->rank == 7 && cfs->display_value == 0.0 &&
                         czs->display_value == 0.0;
  const auto& dbp = tables.at({"dbpedia", 1000.0});
  const auto* dczs = find_score(dbp, "claude-sonnet-4.5", Paradigm::zero_shot);
  const auto* dgfs = find_score(dbp, "gpt-4o", Paradigm::few_shot);
  const bool dbp_case = dczs && dgfs && dczs->rank < dgfs->rank;
  return {ok == 84 && sst2_case && dbp_case,
          fmt::format("{}/84 ranks exact; sst2 tau=250 Claude FS 6 / ZS 7 at 0.00: {}; dbpedia tau=1000 Claude ZS above "
                      "GPT-4o FS: {}{}",
                      ok, sst2_case ? "yes" : "no", dbp_case ? "yes" : "no", misses)};
}

Verdict distilbert_first(const Fixtures& fx) {
  std::size_t ok = 0, total = 0;
  std::string misses;
  for (const auto& [key, t] : fx.tables(false)) {
    ++total;
    if (t.scores.front().candidate.model_id == "distilbert") {
      ++ok;
    } else {
      misses += fmt::format(" {}@{}", key.first, key.second);
    }
  }
  return {ok == total && total == 12, fmt::format("distilbert rank 1 in {}/{} (dataset, tau) tables{}", ok, total, misses)};
}

Verdict pareto_oracle() {
  std::mt19937_64 rng(1001);
  std::size_t mismatches = 0, idempotence = 0, max_f1 = 0;
  for (int set = 0; set < 1000; ++set) {
    const auto cs = testing::random_candidates(rng, 10);
    for (auto space : decision::kAllSpaces) {
      const auto r = decision::pareto_frontier(cs, space);
      if (std::set<std::size_t>(r.frontier.begin(), r.frontier.end()) != testing::brute_force_frontier(cs, space))
        ++mismatches;
      std::vector<Candidate> front;
      for (auto i : r.frontier) front.push_back(cs[i]);
      if (decision::pareto_frontier(front, space).frontier.size() != front.size()) ++idempotence;
      if (space != ObjectiveSpace::cost_vs_latency) {
        const double best = std::max_element(cs.begin(), cs.end(), [](auto& a, auto& b) { return a.f1 < b.f1; })->f1;
        bool found = false;
        for (auto i : r.frontier) found = found || cs[i].f1 == best;
        if (!found) ++max_f1;
      }
    }
  }
  return {mismatches + idempotence + max_f1 == 0,
          fmt::format("1000 sets x 4 spaces: {} oracle mismatches, {} idempotence failures, {} max-F1 exclusions",
                      mismatches, idempotence, max_f1)};
}

Verdict frontier_facts() {
  auto dominated = [](const std::string& ds, ObjectiveSpace space) {
    const auto cs = testing::fixture_candidates(ds);
    const auto r = decision::pareto_frontier(cs, space);
    std::set<std::string> out;
    for (const auto& [i, w] : r.dominated_by) out.insert(cs[i].label());
    return std::make_pair(out, cs.size());
  };
  const auto [imdb_2d, n_imdb] = dominated("imdb", ObjectiveSpace::f1_vs_cost);
  const bool imdb_ok = imdb_2d == std::set<std::string>{"gpt-4o (FS)"};
  const auto [sst2_2d, n_sst2] = dominated("sst2", ObjectiveSpace::f1_vs_cost);
  bool sst2_ok = true;
  for (const char* l : {"claude-sonnet-4.5 (FS)", "gpt-4o (ZS)", "gpt-4o (FS)"}) sst2_ok = sst2_ok && sst2_2d.count(l);
  const auto [imdb_3d, n3] = dominated("imdb", ObjectiveSpace::f1_latency_cost_3d);
  const bool imdb3_ok = imdb_3d.empty() && n3 == 7;
  std::string sst2_list;
  for (const auto& l : sst2_2d) sst2_list += (sst2_list.empty() ? "" : ", ") + l;
  return {imdb_ok && sst2_ok && imdb3_ok,
          fmt::format("imdb f1_vs_cost dominated = {{{}}}; sst2 f1_vs_cost dominated = {{{}}}; imdb 3-D frontier {}/{}",
                      imdb_2d.empty() ? "" : *imdb_2d.begin(), sst2_list, n3 - imdb_3d.size(), n3)};
}

Verdict statistics() {
  const double alphabet[] = {0.0, 1.0, 3.5};
  std::vector<double> qs;
  for (int k = 0; k <= 20; ++k) qs.push_back(k / 20.0);
  qs.push_back(0.99);
  std::size_t lists = 0, disagreements = 0;
  std::vector<double> v;
  std::function<void(std::size_t)> walk = [&](std::size_t len) {
    if (v.size() == len) {
      ++lists;
      for (double q : qs) {
        if (std::abs(stats::percentile(v, q) - testing::percentile_oracle(v, q)) > 1e-12) ++disagreements;
      }
      return;
    }
    for (double a : alphabet) {
      v.push_back(a);
      walk(len);
      v.pop_back();
    }
  };
  for (std::size_t len = 1; len <= 8; ++len) walk(len);

  const auto s = stats::summarize_mean_std(std::vector<double>{1, 2, 3});
  const bool mean_std = s.mean == 2.0 && std::abs(s.std - 1.0) < 1e-15 && s.std_defined;

  // per-run percentiles then median, against the oracle applied to the same traces
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ms(5, 2000);
  std::uniform_int_distribution<int> runs_n(1, 5), len_n(12, 60);
  std::size_t agg_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<LatencyPercentiles> runs;
    std::vector<double> p50, p95, p99;
    const int n_runs = runs_n(rng);
    for (int r = 0; r < n_runs; ++r) {
      LatencyTrace t;
      const int n = len_n(rng);
      for (int i = 0; i < n; ++i) t.samples_ms.push_back(ms(rng));
      runs.push_back(stats::derive_percentiles(t));
      const std::vector<double> kept(t.samples_ms.begin() + 10, t.samples_ms.end());
      p50.push_back(testing::percentile_oracle(kept, 0.50));
      p95.push_back(testing::percentile_oracle(kept, 0.95));
      p99.push_back(testing::percentile_oracle(kept, 0.99));
    }
    const auto agg = stats::aggregate_runs(runs);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1 + std::abs(b)); };
    if (!close(agg.p50_ms, testing::percentile_oracle(p50, 0.5)) ||
        !close(agg.p95_ms, testing::percentile_oracle(p95, 0.5)) ||
        !close(agg.p99_ms, testing::percentile_oracle(p99, 0.5)))
      ++agg_bad;
  }
  return {disagreements == 0 && mean_std && agg_bad == 0,
          fmt::format("percentile vs oracle: {} lists x {} quantiles, {} disagreements; {{1,2,3}} -> ({}, {}); "
                      "per-run-then-median: {} of 500 synthetic trace sets differ",
                      lists, qs.size(), disagreements, s.mean, s.std, agg_bad)};
}

Verdict utility_properties() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> bump(1e-3, 0.5), scale(0.01, 100), tau_d(50, 5000);
  std::size_t mono_bad = 0, scale_bad = 0, limit_bad = 0;
  auto order = [](const decision::UtilityTable& t) {
    std::vector<std::string> out;
    for (const auto& s : t.scores) out.push_back(s.candidate.label());
    return out;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto cs = testing::random_candidates(rng);
    const double tau = tau_d(rng);
    for (const auto& c : cs) {
      const double u = decision::utility_score(c, tau).utility;
      auto f = c;
      f.f1 = c.f1 + bump(rng) * (1 - c.f1);
      if (f.f1 > c.f1 && !(decision::utility_score(f, tau).utility > u)) ++mono_bad;
      auto k = c;
      k.cost_usd_per_million *= 1 + bump(rng);
      if (!(decision::utility_score(k, tau).utility < u)) ++mono_bad;
      auto l = c;
      l.p50_latency_ms += 1 + 100 * bump(rng);
      if (!(decision::utility_score(l, tau).utility < u)) ++mono_bad;
    }
    auto scaled = cs;
    const double c = scale(rng);
    for (auto& x : scaled) x.cost_usd_per_million *= c;
    const auto a = decision::tau_sweep(cs), b = decision::tau_sweep(scaled);
    for (std::size_t i = 0; i < a.size(); ++i) scale_bad += order(a[i]) != order(b[i]);

    const std::vector<double> huge{1e9};
    const auto t = decision::tau_sweep(cs, huge).front();
    for (std::size_t i = 1; i < t.scores.size(); ++i) {
      const auto& x = t.scores[i - 1].candidate;
      const auto& y = t.scores[i].candidate;
      if (x.f1 / x.cost_usd_per_million < (y.f1 / y.cost_usd_per_million) * (1 - 1e-6)) ++limit_bad;
    }
  }
  return {mono_bad + scale_bad + limit_bad == 0,
          fmt::format("1000 random sets: {} monotonicity violations, {} rank changes under cost scaling, {} positions "
                      "off the f1/cost order at tau=1e9",
                      mono_bad, scale_bad, limit_bad)};
}

Verdict gap_properties() {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t iff_bad = 0, decrease_bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double val = u(rng);
    const double train = trial % 4 == 0 ? val : u(rng);
    const double s = decision::gap_penalized_score({1, train, val});
    if ((s == val) != (train == val)) ++iff_bad;
    const double g1 = 0.3 * u(rng), g2 = g1 + 1e-3 + 0.3 * u(rng);
    const bool up = val + g2 <= 1.0;
    const double t1 = up ? val + g1 : val - g1;
    const double t2 = up ? val + g2 : val - g2;
    if (t2 >= 0.0 && t2 <= 1.0 &&
        !(decision::gap_penalized_score({1, t2, val}) < decision::gap_penalized_score({1, t1, val})))
      ++decrease_bad;
  }

  // every list of length <= 6 over a 3 x 3 grid of (train, val)
  const double grid[] = {0.90, 0.93, 0.96};
  std::vector<decision::EpochRecord> options;
  for (double t : grid) {
    for (double v : grid) options.push_back({1, t, v});
  }
  std::size_t lists = 0, select_bad = 0;
  std::vector<decision::EpochRecord> es;
  std::function<void(std::size_t)> walk = [&](std::size_t len) {
    if (es.size() == len) {
      ++lists;
      std::size_t best = 0;
      for (std::size_t i = 1; i < es.size(); ++i) {
        const double si = es[i].f1_val - std::abs(es[i].f1_val - es[i].f1_train);
        const double sb = es[best].f1_val - std::abs(es[best].f1_val - es[best].f1_train);
        if (si > sb) best = i;
      }
      if (!(decision::select_best_epoch(es) == es[best])) ++select_bad;
      return;
    }
    for (const auto& o : options) {
      es.push_back(o);
      es.back().epoch_index = static_cast<int>(es.size());
      walk(len);
      es.pop_back();
    }
  };
  for (std::size_t len = 1; len <= 6; ++len) walk(len);
  return {iff_bad + decrease_bad + select_bad == 0,
          fmt::format("{} iff violations, {} non-decreasing cases over 10000 draws; select_best_epoch vs exhaustive "
                      "scoring: {} of {} lists differ",
                      iff_bad, decrease_bad, select_bad, lists)};
}

Verdict service_differential(const Fixtures& fx) {
  const service::ScenarioEngine engine(fx.records, fx.pricing);
  testing::LiveServer live(engine);
  auto cli = live.client();
  std::mt19937_64 rng(4242);
  std::size_t equal = 0;
  std::string first_diff;
  for (int i = 0; i < 100; ++i) {
    const auto body = testing::random_request_body(rng);
    auto res = cli.Post("/api/scenario", body.dump(), "application/json");
    if (!res || res->status != 200) {
      if (first_diff.empty()) first_diff = " first failure: HTTP error on " + body.dump();
      continue;
    }
    const auto over_http = json::parse(res->body);
    const auto direct = testing::direct_scenario(fx.records, fx.pricing, service::parse_request(body));
    if (over_http == direct) {
      ++equal;
    } else if (first_diff.empty()) {
      first_diff = " first difference: " + json::diff(direct, over_http).dump();
    }
  }
  return {equal == 100, fmt::format("{}/100 random scenario requests equal field for field{}", equal, first_diff)};
}

}  // namespace

int main() {
  Fixtures fx;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"cost reproduction", [&] { return cost_reproduction(fx); }},
      {"utility reproduction", [&] { return utility_reproduction(fx, false); }},
      {"rank reproduction", [&] { return rank_reproduction(fx, false); }},
      {"distilbert ranks first", [&] { return distilbert_first(fx); }},
      {"pareto oracle equivalence", pareto_oracle},
      {"fixture frontier facts", frontier_facts},
      {"statistics oracles", statistics},
      {"utility properties", utility_properties},
      {"gap-score properties", gap_properties},
      {"service differential", [&] { return service_differential(fx); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << name << ": " << v.detail << "\n";
  }
  // informational: the same tables with the printed cost cells as the utility input (what verify-paper does)
  const auto u = utility_reproduction(fx, true);
  const auto r = rank_reproduction(fx, true);
  std::cout << "[INFO] utility with printed costs: " << u.detail << "\n";
  std::cout << "[INFO] ranks with printed costs: " << r.detail << "\n";
  std::cout << (failed ? fmt::format("{} of {} criteria failed\n", failed, criteria.size())
                       : fmt::format("all {} criteria passed\n", criteria.size()));
  return failed ? 1 : 0;
}
