#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tradeoff/error.hpp"
#include "tradeoff/measurements.hpp"

namespace tradeoff::costing {

using Date = std::chrono::year_month_day;

inline Date parse_date(std::string_view s, const std::string& field = "snapshot_date") {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  const std::string str(s);
  if (str.size() != 10 || std::sscanf(str.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
    throw SchemaError("field '" + field + "': expected a YYYY-MM-DD date, got '" + str + "'", field);
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw InvariantError("field '" + field + "': not a calendar date: '" + str + "'", field);
  return date;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

struct TokenPrice {
  double input_usd_per_million_tokens = 0.0;
  double output_usd_per_million_tokens = 0.0;

  friend bool operator==(const TokenPrice&, const TokenPrice&) = default;
};

// Serverless prices per one million resource-seconds.
struct ServingPrice {
  double vcpu_usd_per_million_vcpu_seconds = 0.0;
  double gib_usd_per_million_gib_seconds = 0.0;

  friend bool operator==(const ServingPrice&, const ServingPrice&) = default;
};

struct PricingSnapshot {
  Date snapshot_date{};
  std::map<std::string, TokenPrice> token_prices;  // keyed by model_id
  ServingPrice serving_prices;

  friend bool operator==(const PricingSnapshot&, const PricingSnapshot&) = default;
};

// Every field optional; absent means "keep the base value".
struct PricingOverrides {
  struct TokenPricePatch {
    std::optional<double> input_usd_per_million_tokens;
    std::optional<double> output_usd_per_million_tokens;
  };
  std::optional<Date> snapshot_date;
  std::map<std::string, TokenPricePatch> token_prices;
  std::optional<double> vcpu_usd_per_million_vcpu_seconds;
  std::optional<double> gib_usd_per_million_gib_seconds;

  bool empty() const {
    return !snapshot_date && token_prices.empty() && !vcpu_usd_per_million_vcpu_seconds &&
           !gib_usd_per_million_gib_seconds;
  }
};

enum class CostBasis { serverless_compute, token_usage };

inline std::string_view to_string(CostBasis b) {
  return b == CostBasis::serverless_compute ? "serverless_compute" : "token_usage";
}

// Echo of the values a cost was computed from.
struct CostInputs {
  std::optional<double> p50_latency_ms;
  std::optional<ResourceAllocation> resources;
  std::optional<ServingPrice> serving_prices;
  std::optional<TokenUsage> tokens;
  std::optional<TokenPrice> token_price;
};

struct CostEstimate {
  std::string model_id;
  std::string dataset_id;
  Paradigm paradigm = Paradigm::fine_tuned;
  double usd_per_million_requests = 0.0;
  CostBasis cost_basis = CostBasis::serverless_compute;
  CostInputs inputs_used;
};

namespace detail {

inline void require_price(double v, const std::string& field) {
  if (!std::isfinite(v) || v < 0.0) throw InvariantError("field '" + field + "': price must be a finite value >= 0", field);
}

inline void validate(const PricingSnapshot& s) {
  if (!s.snapshot_date.ok()) throw InvariantError("field 'snapshot_date': missing or invalid", "snapshot_date");
  for (const auto& [model, p] : s.token_prices) {
    require_price(p.input_usd_per_million_tokens, "token_prices." + model + ".input_usd_per_million_tokens");
    require_price(p.output_usd_per_million_tokens, "token_prices." + model + ".output_usd_per_million_tokens");
  }
  require_price(s.serving_prices.vcpu_usd_per_million_vcpu_seconds, "serving_prices.vcpu_usd_per_million_vcpu_seconds");
  require_price(s.serving_prices.gib_usd_per_million_gib_seconds, "serving_prices.gib_usd_per_million_gib_seconds");
}

}  // namespace detail

// Cost of serving one million requests on a serverless instance billed per
// resource-second, using p50 latency as the billed time per request.
//
//   usd/1M req = (p50_ms / 1000) * (vcpu * P_vcpu + GiB * P_gib)
//
// Prices are USD per one million resource-seconds, so the 10^6 factors cancel.
inline CostEstimate encoder_cost_per_million(double p50_latency_ms, const ResourceAllocation& resources,
                                             const ServingPrice& prices) {
  if (!std::isfinite(p50_latency_ms) || p50_latency_ms < 0.0)
    throw DomainError("p50 latency must be a finite value >= 0", "p50_latency_ms");
  if (!(resources.vcpu > 0.0) || !(resources.memory_gib > 0.0))
    throw DomainError("resources must be positive", "resources");
  detail::require_price(prices.vcpu_usd_per_million_vcpu_seconds, "serving_prices.vcpu_usd_per_million_vcpu_seconds");
  detail::require_price(prices.gib_usd_per_million_gib_seconds, "serving_prices.gib_usd_per_million_gib_seconds");

  CostEstimate est;
  est.cost_basis = CostBasis::serverless_compute;
  est.usd_per_million_requests =
      (p50_latency_ms / 1000.0) * (resources.vcpu * prices.vcpu_usd_per_million_vcpu_seconds +
                                   resources.memory_gib * prices.gib_usd_per_million_gib_seconds);
  est.inputs_used.p50_latency_ms = p50_latency_ms;
  est.inputs_used.resources = resources;
  est.inputs_used.serving_prices = prices;
  return est;
}

// Per-request token averages times USD-per-million-token prices give USD per
// million requests directly.
inline CostEstimate llm_cost_per_million(const TokenUsage& tokens, const TokenPrice& price) {
  if (!std::isfinite(tokens.avg_input_tokens_per_request) || tokens.avg_input_tokens_per_request < 0.0 ||
      !std::isfinite(tokens.avg_output_tokens_per_request) || tokens.avg_output_tokens_per_request < 0.0)
    throw DomainError("token counts must be finite values >= 0", "tokens");
  detail::require_price(price.input_usd_per_million_tokens, "input_usd_per_million_tokens");
  detail::require_price(price.output_usd_per_million_tokens, "output_usd_per_million_tokens");

  CostEstimate est;
  est.cost_basis = CostBasis::token_usage;
  est.usd_per_million_requests = tokens.avg_input_tokens_per_request * price.input_usd_per_million_tokens +
                                 tokens.avg_output_tokens_per_request * price.output_usd_per_million_tokens;
  est.inputs_used.tokens = tokens;
  est.inputs_used.token_price = price;
  return est;
}

inline const TokenPrice& token_price_for(const PricingSnapshot& snapshot, const std::string& model_id) {
  const auto it = snapshot.token_prices.find(model_id);
  if (it == snapshot.token_prices.end())
    throw LookupError("pricing snapshot " + format_date(snapshot.snapshot_date) + " has no token price for model '" +
                          model_id + "'",
                      "token_prices." + model_id);
  return it->second;
}

inline PricingSnapshot apply_pricing_overrides(const PricingSnapshot& base, const PricingOverrides& overrides) {
  PricingSnapshot out = base;
  if (overrides.snapshot_date) out.snapshot_date = *overrides.snapshot_date;
  for (const auto& [model, patch] : overrides.token_prices) {
    auto it = out.token_prices.find(model);
    if (it == out.token_prices.end())
      throw LookupError("override references unknown model '" + model + "'", "pricing_overrides.token_prices." + model);
    if (patch.input_usd_per_million_tokens) it->second.input_usd_per_million_tokens = *patch.input_usd_per_million_tokens;
    if (patch.output_usd_per_million_tokens)
      it->second.output_usd_per_million_tokens = *patch.output_usd_per_million_tokens;
  }
  if (overrides.vcpu_usd_per_million_vcpu_seconds)
    out.serving_prices.vcpu_usd_per_million_vcpu_seconds = *overrides.vcpu_usd_per_million_vcpu_seconds;
  if (overrides.gib_usd_per_million_gib_seconds)
    out.serving_prices.gib_usd_per_million_gib_seconds = *overrides.gib_usd_per_million_gib_seconds;
  detail::validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON encoding

inline PricingSnapshot pricing_from_json(const json& j) {
  tradeoff::detail::ObjectReader r(j, "");
  PricingSnapshot s;
  s.snapshot_date = parse_date(r.string("snapshot_date"));
  const json& tp = r.required("token_prices");
  if (!tp.is_object()) throw SchemaError("field 'token_prices': expected an object", "token_prices");
  for (const auto& [model, entry] : tp.items()) {
    tradeoff::detail::ObjectReader er(entry, "token_prices." + model);
    s.token_prices[model] = {er.number("input_usd_per_million_tokens"), er.number("output_usd_per_million_tokens")};
    er.finish();
  }
  tradeoff::detail::ObjectReader sr(r.required("serving_prices"), "serving_prices");
  s.serving_prices = {sr.number("vcpu_usd_per_million_vcpu_seconds"), sr.number("gib_usd_per_million_gib_seconds")};
  sr.finish();
  r.finish();
  detail::validate(s);
  return s;
}

inline json to_json(const TokenPrice& p) {
  return json{{"input_usd_per_million_tokens", p.input_usd_per_million_tokens},
              {"output_usd_per_million_tokens", p.output_usd_per_million_tokens}};
}

inline json to_json(const ServingPrice& p) {
  return json{{"vcpu_usd_per_million_vcpu_seconds", p.vcpu_usd_per_million_vcpu_seconds},
              {"gib_usd_per_million_gib_seconds", p.gib_usd_per_million_gib_seconds}};
}

inline json to_json(const PricingSnapshot& s) {
  json tp = json::object();
  for (const auto& [model, p] : s.token_prices) tp[model] = to_json(p);
  return json{{"snapshot_date", format_date(s.snapshot_date)}, {"token_prices", tp}, {"serving_prices", to_json(s.serving_prices)}};
}

// Overrides use the snapshot layout with every member optional. Field paths in
// errors are prefixed with `path`.
inline PricingOverrides overrides_from_json(const json& j, const std::string& path = "pricing_overrides") {
  tradeoff::detail::ObjectReader r(j, path);
  PricingOverrides o;
  if (const json* d = r.optional("snapshot_date")) {
    if (!d->is_string()) throw SchemaError("field '" + path + ".snapshot_date': expected a string", path + ".snapshot_date");
    o.snapshot_date = parse_date(d->get<std::string>(), path + ".snapshot_date");
  }
  if (const json* tp = r.optional("token_prices")) {
    if (!tp->is_object()) throw SchemaError("field '" + path + ".token_prices': expected an object", path + ".token_prices");
    for (const auto& [model, entry] : tp->items()) {
      const std::string epath = path + ".token_prices." + model;
      tradeoff::detail::ObjectReader er(entry, epath);
      PricingOverrides::TokenPricePatch patch;
      if (const json* v = er.optional("input_usd_per_million_tokens"))
        patch.input_usd_per_million_tokens =
            tradeoff::detail::ObjectReader::as_number(*v, epath + ".input_usd_per_million_tokens");
      if (const json* v = er.optional("output_usd_per_million_tokens"))
        patch.output_usd_per_million_tokens =
            tradeoff::detail::ObjectReader::as_number(*v, epath + ".output_usd_per_million_tokens");
      er.finish();
      o.token_prices[model] = patch;
    }
  }
  if (const json* sp = r.optional("serving_prices")) {
    tradeoff::detail::ObjectReader sr(*sp, path + ".serving_prices");
    if (const json* v = sr.optional("vcpu_usd_per_million_vcpu_seconds"))
      o.vcpu_usd_per_million_vcpu_seconds = tradeoff::detail::ObjectReader::as_number(
          *v, path + ".serving_prices.vcpu_usd_per_million_vcpu_seconds");
    if (const json* v = sr.optional("gib_usd_per_million_gib_seconds"))
      o.gib_usd_per_million_gib_seconds =
          tradeoff::detail::ObjectReader::as_number(*v, path + ".serving_prices.gib_usd_per_million_gib_seconds");
    sr.finish();
  }
  r.finish();
  return o;
}

inline json to_json(const PricingOverrides& o) {
  json j = json::object();
  if (o.snapshot_date) j["snapshot_date"] = format_date(*o.snapshot_date);
  if (!o.token_prices.empty()) {
    json tp = json::object();
    for (const auto& [model, patch] : o.token_prices) {
      json e = json::object();
      if (patch.input_usd_per_million_tokens) e["input_usd_per_million_tokens"] = *patch.input_usd_per_million_tokens;
      if (patch.output_usd_per_million_tokens) e["output_usd_per_million_tokens"] = *patch.output_usd_per_million_tokens;
      tp[model] = e;
    }
    j["token_prices"] = tp;
  }
  if (o.vcpu_usd_per_million_vcpu_seconds || o.gib_usd_per_million_gib_seconds) {
    json sp = json::object();
    if (o.vcpu_usd_per_million_vcpu_seconds) sp["vcpu_usd_per_million_vcpu_seconds"] = *o.vcpu_usd_per_million_vcpu_seconds;
    if (o.gib_usd_per_million_gib_seconds) sp["gib_usd_per_million_gib_seconds"] = *o.gib_usd_per_million_gib_seconds;
    j["serving_prices"] = sp;
  }
  return j;
}

inline json to_json(const CostEstimate& c) {
  json inputs = json::object();
  const auto& in = c.inputs_used;
  if (in.p50_latency_ms) inputs["p50_latency_ms"] = *in.p50_latency_ms;
  if (in.resources) inputs["resources"] = json{{"vcpu", in.resources->vcpu}, {"memory_gib", in.resources->memory_gib}};
  if (in.serving_prices) inputs["serving_prices"] = to_json(*in.serving_prices);
  if (in.tokens)
    inputs["tokens"] = json{{"avg_input_tokens_per_request", in.tokens->avg_input_tokens_per_request},
                            {"avg_output_tokens_per_request", in.tokens->avg_output_tokens_per_request}};
  if (in.token_price) inputs["token_price"] = to_json(*in.token_price);
  return json{{"model_id", c.model_id},
              {"dataset_id", c.dataset_id},
              {"paradigm", std::string(tradeoff::to_string(c.paradigm))},
              {"usd_per_million_requests", c.usd_per_million_requests},
              {"cost_basis", std::string(to_string(c.cost_basis))},
              {"inputs_used", inputs}};
}

inline PricingSnapshot load_pricing(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open pricing file '" + path.string() + "'", path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SyntaxError("pricing file '" + path.string() + "': malformed JSON: " + e.what(), 0);
  }
  return pricing_from_json(j);
}

}  // namespace tradeoff::costing
