#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "tradeoff/costing.hpp"
#include "tradeoff/decision.hpp"
#include "tradeoff/measurements.hpp"
#include "tradeoff/pipeline.hpp"
#include "tradeoff/report.hpp"

namespace tradeoff::service {

struct ScenarioRequest {
  std::string dataset_id;
  double tau_ms = 500.0;
  costing::PricingOverrides pricing_overrides;
  std::vector<decision::ObjectiveSpace> spaces;
};

struct ScenarioResponse {
  std::string dataset_id;
  double tau_ms = 0.0;
  std::string snapshot_date;  // date of the pricing in effect
  costing::PricingOverrides overrides_applied;
  std::vector<costing::CostEstimate> costs;       // catalog order
  std::vector<decision::UtilityScore> utilities;  // rank order
  std::vector<decision::ParetoResult> pareto;     // request order
  std::vector<Warning> warnings;
};

// Spaces default to all four projections when the request omits them.
inline ScenarioRequest parse_request(const json& body) {
  tradeoff::detail::ObjectReader r(body, "");
  ScenarioRequest req;
  req.dataset_id = r.string("dataset_id");
  req.tau_ms = r.number("tau_ms");
  if (const json* o = r.optional("pricing_overrides")) req.pricing_overrides = costing::overrides_from_json(*o);
  if (const json* s = r.optional("spaces")) {
    if (!s->is_array()) throw SchemaError("field 'spaces': expected an array", "spaces");
    for (std::size_t i = 0; i < s->size(); ++i) {
      const std::string path = "spaces[" + std::to_string(i) + "]";
      const json& v = (*s)[i];
      if (!v.is_string()) throw SchemaError("field '" + path + "': expected a string", path);
      const auto space = decision::parse_space(v.get<std::string>());
      if (!space) throw SchemaError("field '" + path + "': unknown objective space '" + v.get<std::string>() + "'", path);
      req.spaces.push_back(*space);
    }
  } else {
    req.spaces.assign(decision::kAllSpaces.begin(), decision::kAllSpaces.end());
  }
  r.finish();
  return req;
}

inline json to_json(const ScenarioRequest& req) {
  json spaces = json::array();
  for (auto s : req.spaces) spaces.push_back(std::string(decision::to_string(s)));
  return json{{"dataset_id", req.dataset_id},
              {"tau_ms", req.tau_ms},
              {"pricing_overrides", costing::to_json(req.pricing_overrides)},
              {"spaces", spaces}};
}

inline json to_json(const ScenarioResponse& resp) {
  json costs = json::array();
  for (const auto& c : resp.costs) costs.push_back(costing::to_json(c));
  json utilities = json::array();
  for (const auto& u : resp.utilities) utilities.push_back(report::to_json(u));
  json pareto = json::array();
  for (const auto& p : resp.pareto) pareto.push_back(report::to_json(p));
  return json{{"dataset_id", resp.dataset_id},
              {"tau_ms", resp.tau_ms},
              {"snapshot_date", resp.snapshot_date},
              {"pricing_overrides", costing::to_json(resp.overrides_applied)},
              {"costs", costs},
              {"utilities", utilities},
              {"pareto", pareto},
              {"warnings", report::warnings_json(resp.warnings)}};
}

// Immutable record set plus base snapshot. evaluate() is const and touches no
// shared mutable state.
class ScenarioEngine {
 public:
  ScenarioEngine(std::vector<MeasurementRecord> records, costing::PricingSnapshot base)
      : records_(std::move(records)),
        base_(std::move(base)),
        summaries_(summarize_configs(records_)),
        warnings_(validate_consistency(records_)) {
    for (const auto& s : summaries_) datasets_.insert(s.dataset_id);
  }

  const costing::PricingSnapshot& base_pricing() const noexcept { return base_; }
  const std::vector<ConfigSummary>& summaries() const noexcept { return summaries_; }
  const std::vector<Warning>& warnings() const noexcept { return warnings_; }

  // One entry per model configuration x dataset with its base-snapshot cost.
  json catalog() const {
    json models = json::array();
    for (const auto& s : summaries_) {
      json m{{"dataset_id", s.dataset_id},
             {"model_id", s.model_id},
             {"paradigm", std::string(to_string(s.paradigm))},
             {"label", s.label()},
             {"runs", s.run_count},
             {"f1", s.f1.mean},
             {"f1_std", s.f1.std},
             {"latency_ms", json{{"p50", s.latency.p50_ms}, {"p95", s.latency.p95_ms}, {"p99", s.latency.p99_ms}}}};
      if (s.ttft) m["ttft_ms"] = json{{"p50", s.ttft->p50_ms}, {"p95", s.ttft->p95_ms}, {"p99", s.ttft->p99_ms}};
      try {
        const auto cost = estimate_cost(s, base_);
        m["cost_usd_per_million"] = cost.usd_per_million_requests;
        m["cost_basis"] = std::string(costing::to_string(cost.cost_basis));
      } catch (const LookupError&) {
        m["cost_usd_per_million"] = nullptr;
      }
      models.push_back(m);
    }
    return json{{"snapshot_date", costing::format_date(base_.snapshot_date)},
                {"models", models},
                {"warnings", report::warnings_json(warnings_)}};
  }

  ScenarioResponse evaluate(const ScenarioRequest& req) const {
    if (!datasets_.count(req.dataset_id))
      throw LookupError("unknown dataset '" + req.dataset_id + "'", "dataset_id");
    if (!(std::isfinite(req.tau_ms) && req.tau_ms > 0.0)) throw DomainError("tau_ms must be > 0", "tau_ms");

    const auto pricing = costing::apply_pricing_overrides(base_, req.pricing_overrides);
    ScenarioResponse resp;
    resp.dataset_id = req.dataset_id;
    resp.tau_ms = req.tau_ms;
    resp.snapshot_date = costing::format_date(pricing.snapshot_date);
    resp.overrides_applied = req.pricing_overrides;

    std::vector<decision::Candidate> cands;
    for (const auto& s : summaries_) {
      if (s.dataset_id != req.dataset_id) continue;
      auto cost = estimate_cost(s, pricing);
      cands.push_back(to_candidate(s, cost));
      resp.costs.push_back(std::move(cost));
    }
    const double taus[] = {req.tau_ms};
    resp.utilities = decision::tau_sweep(cands, taus).front().scores;
    for (auto space : req.spaces) resp.pareto.push_back(decision::pareto_frontier(cands, space));
    for (const auto& w : warnings_) {
      if (w.dataset_id == req.dataset_id) resp.warnings.push_back(w);
    }
    return resp;
  }

 private:
  std::vector<MeasurementRecord> records_;
  costing::PricingSnapshot base_;
  std::vector<ConfigSummary> summaries_;
  std::vector<Warning> warnings_;
  std::set<std::string> datasets_;
};

inline std::string_view error_kind(const Error& e) {
  if (dynamic_cast<const SyntaxError*>(&e)) return "syntax_error";
  if (dynamic_cast<const SchemaError*>(&e)) return "schema_error";
  if (dynamic_cast<const InvariantError*>(&e)) return "invariant_error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  if (dynamic_cast<const LookupError*>(&e)) return "lookup_error";
  return "error";
}

inline json error_body(std::string_view kind, const std::string& message, const std::string& field) {
  return json{{"error", json{{"kind", kind}, {"message", message}, {"field", field}}}};
}

inline constexpr const char* kFallbackIndex =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>tradeoff</title></head><body>"
    "<h1>tradeoff scenario service</h1><p>No UI assets mounted. API: "
    "<code>GET /api/health</code>, <code>GET /api/models</code>, <code>POST /api/scenario</code>.</p></body></html>";

// Routes the API onto `server`. The engine must outlive the server.
inline void install_routes(httplib::Server& server, const ScenarioEngine& engine,
                           const std::optional<std::filesystem::path>& ui_dir = std::nullopt) {
  server.Get("/api/health", [&engine](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"status", "ok"},
                         {"snapshot_date", costing::format_date(engine.base_pricing().snapshot_date)},
                         {"configurations", engine.summaries().size()}}
                        .dump(),
                    "application/json");
  });
  server.Get("/api/models", [&engine](const httplib::Request&, httplib::Response& res) {
    res.set_content(engine.catalog().dump(), "application/json");
  });
  server.Post("/api/scenario", [&engine](const httplib::Request& req, httplib::Response& res) {
    try {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("malformed JSON body: ") + e.what(), 1);
      }
      res.set_content(to_json(engine.evaluate(parse_request(body))).dump(), "application/json");
    } catch (const LookupError& e) {
      res.status = e.field() == "dataset_id" ? 404 : 400;
      res.set_content(error_body(error_kind(e), e.what(), e.field()).dump(), "application/json");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(error_body(error_kind(e), e.what(), e.field()).dump(), "application/json");
    }
  });
  if (ui_dir && std::filesystem::is_directory(*ui_dir)) {
    server.set_mount_point("/", ui_dir->string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content(kFallbackIndex, "text/html"); });
  }
}

}  // namespace tradeoff::service
