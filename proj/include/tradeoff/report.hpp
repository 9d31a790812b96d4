#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "tradeoff/costing.hpp"
#include "tradeoff/decision.hpp"
#include "tradeoff/measurements.hpp"
#include "tradeoff/pipeline.hpp"

namespace tradeoff::report {

enum class Format { table, csv, json };

inline std::optional<Format> parse_format(std::string_view s) {
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  return std::nullopt;
}

// Shortest representation that round-trips; used for every machine-readable number.
inline std::string num(double v) { return fmt::format("{}", v); }

// Human-readable 2-decimal form of the same value.
inline std::string fixed2(double v) { return fmt::format("{:.2f}", decision::round2(v)); }

inline json to_json(const Warning& w) {
  return json{{"kind", std::string(to_string(w.kind))},
              {"model", w.model_id},
              {"dataset_id", w.dataset_id},
              {"message", w.message}};
}

inline json warnings_json(std::span<const Warning> ws) {
  json arr = json::array();
  for (const auto& w : ws) arr.push_back(to_json(w));
  return arr;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto days = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{now - days};
  return fmt::format("{}T{:02}:{:02}:{:02}Z", costing::format_date(ymd), hms.hours().count(), hms.minutes().count(),
                     hms.seconds().count());
}

// Everything a command needs: parsed inputs reduced to evaluated configurations.
struct Inputs {
  std::vector<MeasurementRecord> records;
  costing::PricingSnapshot pricing;
  std::vector<Warning> warnings;
  std::vector<EvaluatedConfig> configs;  // sorted by dataset, model_id, paradigm
};

inline Inputs prepare(std::vector<MeasurementRecord> records, costing::PricingSnapshot pricing,
                      const std::optional<std::string>& dataset_filter = std::nullopt) {
  Inputs in;
  in.records = std::move(records);
  in.pricing = std::move(pricing);
  in.warnings = validate_consistency(in.records);
  auto summaries = summarize_configs(in.records);
  if (dataset_filter) {
    std::erase_if(summaries, [&](const ConfigSummary& s) { return s.dataset_id != *dataset_filter; });
    std::erase_if(in.warnings, [&](const Warning& w) { return w.dataset_id != *dataset_filter; });
  }
  in.configs = evaluate_configs(summaries, in.pricing);
  return in;
}

inline std::string header_line(const Inputs& in, std::string_view title) {
  return fmt::format("{} | pricing snapshot {} | generated {}\n", title, costing::format_date(in.pricing.snapshot_date),
                     utc_timestamp());
}

inline void append_warnings(std::string& out, const Inputs& in) {
  for (const auto& w : in.warnings) out += fmt::format("warning: {}\n", w.message);
}

// ---------------------------------------------------------------------------
// cost

inline json cost_json(const Inputs& in) {
  json datasets = json::array();
  for (const auto& ds : dataset_ids(in.configs)) {
    json rows = json::array();
    for (const auto& c : in.configs) {
      if (c.summary.dataset_id != ds) continue;
      json row = costing::to_json(c.cost);
      row["label"] = c.summary.label();
      row["display_usd_per_million_requests"] = decision::round2(c.cost.usd_per_million_requests);
      rows.push_back(row);
    }
    datasets.push_back(json{{"dataset_id", ds}, {"costs", rows}});
  }
  return json{{"snapshot_date", costing::format_date(in.pricing.snapshot_date)},
              {"datasets", datasets},
              {"warnings", warnings_json(in.warnings)}};
}

inline std::string render_cost(const Inputs& in, Format fmt_kind) {
  if (fmt_kind == Format::json) return cost_json(in).dump(2) + "\n";
  std::string out;
  if (fmt_kind == Format::csv) {
    out += "dataset_id,model_id,paradigm,label,cost_basis,usd_per_million_requests\n";
    for (const auto& c : in.configs) {
      out += fmt::format("{},{},{},{},{},{}\n", c.summary.dataset_id, c.summary.model_id, to_string(c.summary.paradigm),
                         c.summary.label(), costing::to_string(c.cost.cost_basis), num(c.cost.usd_per_million_requests));
    }
    return out;
  }
  out += header_line(in, "Estimated cost (USD / 1M requests)");
  for (const auto& ds : dataset_ids(in.configs)) {
    out += fmt::format("\n[{}]\n{:<28} {:<20} {:>14}\n", ds, "model", "basis", "USD / 1M req");
    for (const auto& c : in.configs) {
      if (c.summary.dataset_id != ds) continue;
      out += fmt::format("{:<28} {:<20} {:>14}\n", c.summary.label(), costing::to_string(c.cost.cost_basis),
                         fixed2(c.cost.usd_per_million_requests));
    }
  }
  append_warnings(out, in);
  return out;
}

// ---------------------------------------------------------------------------
// rank

inline std::vector<decision::UtilityTable> rank_tables(const Inputs& in, std::span<const double> taus) {
  std::vector<decision::UtilityTable> tables;
  for (const auto& ds : dataset_ids(in.configs)) {
    const auto cands = candidates_for(in.configs, ds);
    for (auto& t : decision::tau_sweep(cands, taus)) tables.push_back(std::move(t));
  }
  return tables;
}

inline json to_json(const decision::UtilityScore& s) {
  return json{{"label", s.candidate.label()},
              {"model_id", s.candidate.model_id},
              {"paradigm", std::string(to_string(s.candidate.paradigm))},
              {"f1", s.candidate.f1},
              {"cost_usd_per_million", s.candidate.cost_usd_per_million},
              {"p50_latency_ms", s.candidate.p50_latency_ms},
              {"utility", s.utility},
              {"display_value", s.display_value},
              {"rank", s.rank}};
}

inline json rank_json(const Inputs& in, std::span<const double> taus) {
  const auto tables = rank_tables(in, taus);
  json datasets = json::array();
  for (const auto& ds : dataset_ids(in.configs)) {
    json per_tau = json::array();
    for (const auto& t : tables) {
      if (t.dataset_id != ds) continue;
      json scores = json::array();
      for (const auto& s : t.scores) scores.push_back(to_json(s));
      per_tau.push_back(json{{"tau_ms", t.tau_ms}, {"scores", scores}});
    }
    datasets.push_back(json{{"dataset_id", ds}, {"tables", per_tau}});
  }
  return json{{"snapshot_date", costing::format_date(in.pricing.snapshot_date)},
              {"taus_ms", std::vector<double>(taus.begin(), taus.end())},
              {"datasets", datasets},
              {"warnings", warnings_json(in.warnings)}};
}

inline std::string render_rank(const Inputs& in, std::span<const double> taus, Format fmt_kind) {
  if (fmt_kind == Format::json) return rank_json(in, taus).dump(2) + "\n";
  const auto tables = rank_tables(in, taus);
  std::string out;
  if (fmt_kind == Format::csv) {
    out += "dataset_id,tau_ms,rank,model_id,paradigm,label,utility,display_value\n";
    for (const auto& t : tables) {
      for (const auto& s : t.scores) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", t.dataset_id, num(t.tau_ms), s.rank, s.candidate.model_id,
                           to_string(s.candidate.paradigm), s.candidate.label(), num(s.utility),
                           fixed2(s.display_value));
      }
    }
    return out;
  }
  out += header_line(in, "Utility ranking, 100 x U (rank)");
  for (const auto& ds : dataset_ids(in.configs)) {
    out += fmt::format("\n[{}]\n{:<28}", ds, "model");
    for (double tau : taus) out += fmt::format(" {:>16}", fmt::format("tau={}ms", num(tau)));
    out += "\n";
    for (const auto& c : in.configs) {
      if (c.summary.dataset_id != ds) continue;
      out += fmt::format("{:<28}", c.summary.label());
      for (const auto& t : tables) {
        if (t.dataset_id != ds) continue;
        for (const auto& s : t.scores) {
          if (s.candidate == c.candidate) out += fmt::format(" {:>16}", fmt::format("{} ({})", fixed2(s.display_value), s.rank));
        }
      }
      out += "\n";
    }
  }
  append_warnings(out, in);
  return out;
}

// ---------------------------------------------------------------------------
// pareto

inline std::vector<decision::ParetoResult> pareto_results(const Inputs& in,
                                                          std::span<const decision::ObjectiveSpace> spaces) {
  std::vector<decision::ParetoResult> out;
  for (const auto& ds : dataset_ids(in.configs)) {
    const auto cands = candidates_for(in.configs, ds);
    for (auto space : spaces) out.push_back(decision::pareto_frontier(cands, space));
  }
  return out;
}

inline json to_json(const decision::ParetoResult& r) {
  json points = json::array();
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto& c = r.candidates[i];
    json p{{"label", c.label()},
           {"model_id", c.model_id},
           {"paradigm", std::string(to_string(c.paradigm))},
           {"f1", c.f1},
           {"cost_usd_per_million", c.cost_usd_per_million},
           {"p50_latency_ms", c.p50_latency_ms},
           {"frontier", r.on_frontier(i)}};
    const auto it = r.dominated_by.find(i);
    p["dominated_by"] = it == r.dominated_by.end() ? json(nullptr) : json(r.candidates[it->second].label());
    points.push_back(p);
  }
  json frontier = json::array();
  for (auto i : r.frontier) frontier.push_back(r.candidates[i].label());
  return json{{"space", std::string(decision::to_string(r.space))}, {"frontier", frontier}, {"points", points}};
}

inline json pareto_json(const Inputs& in, std::span<const decision::ObjectiveSpace> spaces) {
  const auto results = pareto_results(in, spaces);
  json datasets = json::array();
  for (const auto& ds : dataset_ids(in.configs)) {
    json projections = json::array();
    for (const auto& r : results) {
      if (!r.candidates.empty() && r.candidates.front().dataset_id == ds) projections.push_back(to_json(r));
    }
    datasets.push_back(json{{"dataset_id", ds}, {"projections", projections}});
  }
  return json{{"snapshot_date", costing::format_date(in.pricing.snapshot_date)},
              {"datasets", datasets},
              {"warnings", warnings_json(in.warnings)}};
}

// One point per candidate per space, with frontier flag: the scatter data file.
inline std::string scatter_csv(std::span<const decision::ParetoResult> results) {
  std::string out = "dataset_id,space,model_id,paradigm,label,f1,cost_usd_per_million,p50_latency_ms,frontier,dominated_by\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const auto& c = r.candidates[i];
      const auto it = r.dominated_by.find(i);
      out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", c.dataset_id, decision::to_string(r.space), c.model_id,
                         to_string(c.paradigm), c.label(), num(c.f1), num(c.cost_usd_per_million),
                         num(c.p50_latency_ms), r.on_frontier(i) ? "true" : "false",
                         it == r.dominated_by.end() ? "" : r.candidates[it->second].label());
    }
  }
  return out;
}

inline std::string render_pareto(const Inputs& in, std::span<const decision::ObjectiveSpace> spaces, Format fmt_kind) {
  if (fmt_kind == Format::json) return pareto_json(in, spaces).dump(2) + "\n";
  const auto results = pareto_results(in, spaces);
  if (fmt_kind == Format::csv) return scatter_csv(results);
  std::string out = header_line(in, "Pareto frontiers");
  for (const auto& r : results) {
    out += fmt::format("\n[{}] {}\n", r.candidates.front().dataset_id, decision::to_string(r.space));
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
      const auto& c = r.candidates[i];
      const auto it = r.dominated_by.find(i);
      out += fmt::format("  {:<28} F1 {:>6}  cost {:>9}  p50 {:>8} ms  {}\n", c.label(), fixed2(100.0 * c.f1),
                         fixed2(c.cost_usd_per_million), fixed2(c.p50_latency_ms),
                         it == r.dominated_by.end() ? std::string("frontier")
                                                    : "dominated by " + r.candidates[it->second].label());
    }
  }
  append_warnings(out, in);
  return out;
}

// Minimal self-contained SVG scatter for a 2-D projection. Cost axes are log-scaled.
inline std::string render_svg(const decision::ParetoResult& r) {
  using decision::ObjectiveSpace;
  struct Axis {
    std::string name;
    bool log = false;
    double (*get)(const decision::Candidate&);
  };
  const Axis f1{"F1 (fraction)", false, [](const decision::Candidate& c) { return c.f1; }};
  const Axis cost{"Cost (USD / 1M req)", true, [](const decision::Candidate& c) { return c.cost_usd_per_million; }};
  const Axis lat{"p50 latency (ms)", false, [](const decision::Candidate& c) { return c.p50_latency_ms; }};
  Axis x, y;
  switch (r.space) {
    case ObjectiveSpace::f1_vs_cost: x = cost; y = f1; break;
    case ObjectiveSpace::cost_vs_latency: x = lat; y = cost; break;
    case ObjectiveSpace::f1_vs_latency: x = lat; y = f1; break;
    case ObjectiveSpace::f1_latency_cost_3d: throw DomainError("SVG output needs a 2-D projection", "space");
  }
  constexpr double W = 640, H = 480, L = 70, R = 180, T = 40, B = 60;
  auto tr = [](const Axis& a, double v) { return a.log ? std::log10(std::max(v, 1e-12)) : v; };
  auto range = [&](const Axis& a) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& c : r.candidates) {
      lo = std::min(lo, tr(a, a.get(c)));
      hi = std::max(hi, tr(a, a.get(c)));
    }
    const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
    return std::pair{lo - pad, hi + pad};
  };
  const auto [x0, x1] = range(x);
  const auto [y0, y1] = range(y);
  auto px = [&](double v) { return L + (tr(x, v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (tr(y, v) - y0) / (y1 - y0) * (H - T - B); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"11\">\n",
      W, H);
  out += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{}: {}</text>\n", L, r.candidates.front().dataset_id,
                     decision::to_string(r.space));
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", L, H - B, W - R);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", L, T, H - B);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}{}</text>\n", (L + W - R) / 2, H - 20, x.name,
                     x.log ? " [log]" : "");
  out += fmt::format("<text x=\"15\" y=\"{0}\" transform=\"rotate(-90 15 {0})\" text-anchor=\"middle\">{1}{2}</text>\n",
                     (T + H - B) / 2, y.name, y.log ? " [log]" : "");
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    const double xs = L + (W - L - R) * i / 4.0;
    const double ys = H - B - (H - T - B) * i / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n", xs, H - B + 15,
                       x.log ? std::pow(10.0, xv) : xv);
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", L - 5, ys + 4,
                       y.log ? std::pow(10.0, yv) : yv);
  }
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto& c = r.candidates[i];
    const bool front = r.on_frontier(i);
    const double cx = px(x.get(c));
    const double cy = py(y.get(c));
    out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"5\" fill=\"{}\" stroke=\"#1f4e79\"><title>{}{}</title></circle>\n",
                       cx, cy, front ? "#1f4e79" : "white", c.label(),
                       front ? " (frontier)" : " (dominated by " + r.candidates[r.dominated_by.at(i)].label() + ")");
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", cx + 7, cy - 4, c.label());
  }
  out += "</svg>\n";
  return out;
}

}  // namespace tradeoff::report
