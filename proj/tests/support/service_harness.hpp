#pragma once

#include <chrono>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "support/oracles.hpp"
#include "tradeoff/service.hpp"

namespace tradeoff::testing {

// Runs the scenario routes on an ephemeral loopback port for the lifetime of the object.
class LiveServer {
 public:
  explicit LiveServer(const service::ScenarioEngine& engine) {
    service::install_routes(server_, engine);
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("could not bind a loopback port");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_connection_timeout(std::chrono::seconds(5));
    c.set_read_timeout(std::chrono::seconds(10));
    return c;
  }
  int port() const { return port_; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

// The scenario computed by calling the costing and decision operations directly.
inline json direct_scenario(const std::vector<MeasurementRecord>& records, const costing::PricingSnapshot& base,
                            const service::ScenarioRequest& req) {
  const auto pricing = costing::apply_pricing_overrides(base, req.pricing_overrides);
  json costs = json::array();
  std::vector<decision::Candidate> cands;
  for (const auto& s : summarize_configs(records)) {
    if (s.dataset_id != req.dataset_id) continue;
    costing::CostEstimate est;
    if (s.paradigm == Paradigm::fine_tuned) {
      est = costing::encoder_cost_per_million(s.latency.p50_ms, *s.resources, pricing.serving_prices);
    } else {
      est = costing::llm_cost_per_million(*s.tokens, costing::token_price_for(pricing, s.model_id));
    }
    est.model_id = s.model_id;
    est.dataset_id = s.dataset_id;
    est.paradigm = s.paradigm;
    costs.push_back(costing::to_json(est));
    cands.push_back({s.model_id, s.dataset_id, s.paradigm, s.f1.mean, est.usd_per_million_requests, s.latency.p50_ms});
  }
  std::vector<decision::UtilityScore> scores;
  for (const auto& c : cands) scores.push_back(decision::utility_score(c, req.tau_ms));
  json utilities = json::array();
  for (const auto& s : decision::rank_by_utility(scores)) utilities.push_back(report::to_json(s));
  json pareto = json::array();
  for (auto space : req.spaces) pareto.push_back(report::to_json(decision::pareto_frontier(cands, space)));
  std::vector<Warning> warnings;
  for (const auto& w : validate_consistency(records)) {
    if (w.dataset_id == req.dataset_id) warnings.push_back(w);
  }
  return json{{"dataset_id", req.dataset_id},
              {"tau_ms", req.tau_ms},
              {"snapshot_date", costing::format_date(pricing.snapshot_date)},
              {"pricing_overrides", costing::to_json(req.pricing_overrides)},
              {"costs", costs},
              {"utilities", utilities},
              {"pareto", pareto},
              {"warnings", report::warnings_json(warnings)}};
}

// Random valid request over the bundled datasets; returns the wire body.
inline json random_request_body(std::mt19937_64& rng) {
  static const char* datasets[] = {"imdb", "sst2", "agnews", "dbpedia"};
  static const char* models[] = {"gpt-4o", "claude-sonnet-4.5"};
  std::uniform_int_distribution<int> pick4(0, 3);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> log_tau(1.0, 5.0);
  std::uniform_real_distribution<double> price(0.0, 40.0);
  json body{{"dataset_id", datasets[pick4(rng)]}, {"tau_ms", std::pow(10.0, log_tau(rng))}};
  if (coin(rng)) {
    json o = json::object();
    if (coin(rng)) o["snapshot_date"] = "2026-0" + std::to_string(1 + pick4(rng)) + "-15";
    if (coin(rng)) {
      json tp = json::object();
      for (const char* m : models) {
        if (!coin(rng)) continue;
        json e = json::object();
        if (coin(rng)) e["input_usd_per_million_tokens"] = price(rng);
        if (coin(rng)) e["output_usd_per_million_tokens"] = price(rng);
        tp[m] = e;
      }
      o["token_prices"] = tp;
    }
    if (coin(rng)) {
      json sp = json::object();
      if (coin(rng)) sp["vcpu_usd_per_million_vcpu_seconds"] = 0.5 + price(rng);
      if (coin(rng)) sp["gib_usd_per_million_gib_seconds"] = 0.5 + price(rng);
      o["serving_prices"] = sp;
    }
    body["pricing_overrides"] = o;
  }
  if (coin(rng)) {
    json spaces = json::array();
    for (auto s : decision::kAllSpaces) {
      if (coin(rng)) spaces.push_back(std::string(decision::to_string(s)));
    }
    body["spaces"] = spaces;
  }
  return body;
}

}  // namespace tradeoff::testing
