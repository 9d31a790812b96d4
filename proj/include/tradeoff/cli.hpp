#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tradeoff/costing.hpp"
#include "tradeoff/decision.hpp"
#include "tradeoff/measurements.hpp"
#include "tradeoff/report.hpp"
#include "tradeoff/service.hpp"
#include "tradeoff/verify.hpp"

namespace tradeoff::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kVerificationMismatch = 2 };

#ifndef TRADEOFF_DATA_ROOT
#define TRADEOFF_DATA_ROOT "."
#endif

inline std::filesystem::path default_data_root() { return TRADEOFF_DATA_ROOT; }

struct CommonOptions {
  std::string records;
  std::string pricing;
  std::vector<double> taus = decision::default_taus_ms();
  std::string dataset;
  std::string format = "table";
  std::string out;
};

inline std::filesystem::path resolve_pricing(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("TRADEOFF_PRICING"); env && *env) return env;
  return verify::bundled_fixtures(default_data_root()).pricing;
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw LookupError("cannot write output file '" + out_path + "'", out_path);
  f << text;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LookupError("cannot write file '" + path.string() + "'", path.string());
  f << text;
}

inline report::Format format_of(const CommonOptions& o) {
  const auto f = report::parse_format(o.format);
  if (!f) throw DomainError("unknown format '" + o.format + "' (expected table, csv or json)", "format");
  return *f;
}

inline report::Inputs load_inputs(const CommonOptions& o) {
  auto records = load_records(o.records);
  auto pricing = costing::load_pricing(resolve_pricing(o.pricing));
  std::optional<std::string> filter;
  if (!o.dataset.empty()) filter = o.dataset;
  return report::prepare(std::move(records), std::move(pricing), filter);
}

// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Cost-aware model selection: costs, utility ranking and Pareto frontiers over benchmark records"};
  app.require_subcommand(1);

  CommonOptions opt;
  auto add_common = [&](CLI::App* sub, bool with_tau) {
    sub->add_option("--records", opt.records, "Records file (JSON Lines, or CSV by extension)")->required();
    sub->add_option("--pricing", opt.pricing, "Pricing snapshot JSON (default: $TRADEOFF_PRICING, then bundled)");
    if (with_tau) sub->add_option("--tau", opt.taus, "Latency tolerances in ms, comma separated")->delimiter(',');
    sub->add_option("--dataset", opt.dataset, "Only report this dataset id");
    sub->add_option("--format", opt.format, "Output format: table, csv or json");
    sub->add_option("--out", opt.out, "Write output to this path instead of stdout");
  };

  auto* cost = app.add_subcommand("cost", "Estimated USD per 1M requests for every model configuration");
  add_common(cost, false);

  auto* rank = app.add_subcommand("rank", "Utility ranking (100 x U) per dataset and tau");
  add_common(rank, true);

  std::vector<std::string> spaces;
  std::string scatter_path;
  std::string svg_dir;
  auto* pareto = app.add_subcommand("pareto", "Pareto frontiers in the 3-D space and its 2-D projections");
  add_common(pareto, false);
  pareto->add_option("--space", spaces, "Objective space(s): f1_latency_cost_3d, f1_vs_cost, cost_vs_latency, f1_vs_latency")
      ->delimiter(',');
  pareto->add_option("--scatter", scatter_path, "Also write scatter points (CSV with frontier flags) here");
  pareto->add_option("--svg-dir", svg_dir, "Also write one SVG scatter per dataset and 2-D projection here");

  verify::FixturePaths fixtures = verify::bundled_fixtures(default_data_root());
  std::string verify_format = "table";
  std::string verify_out;
  auto* vp = app.add_subcommand("verify-paper", "Check costs, utilities and ranks against the bundled reference tables");
  vp->add_option("--records", fixtures.records, "Fixture records");
  vp->add_option("--pricing", fixtures.pricing, "Fixture pricing snapshot");
  vp->add_option("--expected-costs", fixtures.expected_costs, "Expected cost cells");
  vp->add_option("--expected-utility", fixtures.expected_utility, "Expected utility cells and ranks");
  vp->add_option("--format", verify_format, "Output format: table, csv or json");
  vp->add_option("--out", verify_out, "Write output to this path instead of stdout");

  std::string serve_records;
  std::string serve_pricing;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "Serve the scenario API and UI assets over HTTP");
  serve->add_option("--records", serve_records, "Records file")->required();
  serve->add_option("--pricing", serve_pricing, "Pricing snapshot JSON (default: $TRADEOFF_PRICING, then bundled)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--ui-dir", ui_dir, "Directory of static UI assets mounted at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (cost->parsed()) {
      const auto fmt_kind = format_of(opt);
      emit(report::render_cost(load_inputs(opt), fmt_kind), opt.out, out);
    } else if (rank->parsed()) {
      const auto fmt_kind = format_of(opt);
      if (opt.taus.empty()) throw DomainError("at least one tau is required", "tau");
      for (double t : opt.taus) {
        if (!(t > 0.0)) throw DomainError("tau must be > 0", "tau");
      }
      emit(report::render_rank(load_inputs(opt), opt.taus, fmt_kind), opt.out, out);
    } else if (pareto->parsed()) {
      const auto fmt_kind = format_of(opt);
      std::vector<decision::ObjectiveSpace> chosen;
      for (const auto& s : spaces) {
        const auto sp = decision::parse_space(s);
        if (!sp) throw DomainError("unknown objective space '" + s + "'", "space");
        chosen.push_back(*sp);
      }
      if (chosen.empty()) chosen.assign(decision::kAllSpaces.begin(), decision::kAllSpaces.end());
      const auto in = load_inputs(opt);
      emit(report::render_pareto(in, chosen, fmt_kind), opt.out, out);
      if (!scatter_path.empty() || !svg_dir.empty()) {
        const auto results = report::pareto_results(in, chosen);
        if (!scatter_path.empty()) write_file(scatter_path, report::scatter_csv(results));
        if (!svg_dir.empty()) {
          std::filesystem::create_directories(svg_dir);
          for (const auto& r : results) {
            if (r.space == decision::ObjectiveSpace::f1_latency_cost_3d) continue;
            write_file(std::filesystem::path(svg_dir) /
                           (r.candidates.front().dataset_id + "_" + std::string(decision::to_string(r.space)) + ".svg"),
                       report::render_svg(r));
          }
        }
      }
    } else if (vp->parsed()) {
      const auto f = report::parse_format(verify_format);
      if (!f) throw DomainError("unknown format '" + verify_format + "'", "format");
      const auto result = verify::verify_files(fixtures);
      emit(verify::render(result, *f), verify_out, out);
      return result.ok() ? kSuccess : kVerificationMismatch;
    } else if (serve->parsed()) {
      service::ScenarioEngine engine(load_records(serve_records), costing::load_pricing(resolve_pricing(serve_pricing)));
      httplib::Server server;
      std::optional<std::filesystem::path> ui;
      if (!ui_dir.empty()) ui = ui_dir;
      service::install_routes(server, engine, ui);
      err << "serving on http://" << host << ":" << port << " (pricing snapshot "
          << costing::format_date(engine.base_pricing().snapshot_date) << ")\n";
      if (!server.listen(host, port)) {
        err << "error: cannot listen on " << host << ":" << port << "\n";
        return kValidationError;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kSuccess;
}

}  // namespace tradeoff::cli
