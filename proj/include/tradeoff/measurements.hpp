#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tradeoff/error.hpp"

namespace tradeoff {

using json = nlohmann::json;

enum class Paradigm { fine_tuned, zero_shot, few_shot };

inline std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::fine_tuned: return "fine_tuned";
    case Paradigm::zero_shot: return "zero_shot";
    case Paradigm::few_shot: return "few_shot";
  }
  return "unknown";
}

inline std::optional<Paradigm> parse_paradigm(std::string_view s) {
  if (s == "fine_tuned") return Paradigm::fine_tuned;
  if (s == "zero_shot") return Paradigm::zero_shot;
  if (s == "few_shot") return Paradigm::few_shot;
  return std::nullopt;
}

// "FT", "ZS", "FS" as used in result tables.
inline std::string_view short_name(Paradigm p) {
  switch (p) {
    case Paradigm::fine_tuned: return "FT";
    case Paradigm::zero_shot: return "ZS";
    case Paradigm::few_shot: return "FS";
  }
  return "?";
}

inline bool is_prompted(Paradigm p) { return p != Paradigm::fine_tuned; }

// All quality metrics are fractions in [0, 1], not percentages.
struct QualityMetrics {
  double f1_macro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double accuracy = 0.0;

  friend bool operator==(const QualityMetrics&, const QualityMetrics&) = default;
};

struct TokenUsage {
  double avg_input_tokens_per_request = 0.0;
  double avg_output_tokens_per_request = 0.0;

  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

struct ResourceAllocation {
  double vcpu = 0.0;
  double memory_gib = 0.0;

  friend bool operator==(const ResourceAllocation&, const ResourceAllocation&) = default;
};

inline constexpr std::int64_t kDefaultWarmupCount = 10;

// Raw per-request latencies in arrival order; the first warmup_count are cold-start samples.
struct LatencyTrace {
  std::vector<double> samples_ms;
  std::int64_t warmup_count = kDefaultWarmupCount;

  friend bool operator==(const LatencyTrace&, const LatencyTrace&) = default;
};

struct LatencyPercentiles {
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;

  friend bool operator==(const LatencyPercentiles&, const LatencyPercentiles&) = default;
};

using Latency = std::variant<LatencyTrace, LatencyPercentiles>;

// Metadata only; never used in any computation.
struct DecodingConfig {
  double temperature = 0.0;
  std::optional<double> top_p;

  friend bool operator==(const DecodingConfig&, const DecodingConfig&) = default;
};

using RunId = std::variant<std::int64_t, std::string>;

inline std::string to_string(const RunId& id) {
  return std::visit(
      [](const auto& v) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::string>) {
          return v;
        } else {
          return std::to_string(v);
        }
      },
      id);
}

// Plain field bundle. Becomes a MeasurementRecord only after validation.
struct RecordFields {
  std::string model_id;
  std::string dataset_id;
  Paradigm paradigm = Paradigm::fine_tuned;
  RunId run_id = std::int64_t{0};
  QualityMetrics quality;
  Latency latency = LatencyPercentiles{};
  std::optional<Latency> ttft;
  std::optional<TokenUsage> tokens;
  std::optional<ResourceAllocation> resources;
  std::optional<DecodingConfig> decoding;
  // How many protocol runs this record already summarizes (1 for a single run;
  // >1 for transcriptions of published mean values).
  std::int64_t runs_aggregated = 1;

  friend bool operator==(const RecordFields&, const RecordFields&) = default;
};

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvariantError("field '" + field + "': " + what, field);
}

inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
inline bool fraction(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

inline void check_latency(const Latency& latency, const std::string& field) {
  if (const auto* trace = std::get_if<LatencyTrace>(&latency)) {
    require(trace->warmup_count >= 0, field + ".warmup_count", "must be >= 0");
    require(static_cast<std::size_t>(trace->warmup_count) < trace->samples_ms.size(), field + ".warmup_count",
            "must be smaller than the number of samples");
    for (std::size_t i = 0; i < trace->samples_ms.size(); ++i) {
      require(finite_nonneg(trace->samples_ms[i]), field + ".samples_ms[" + std::to_string(i) + "]",
              "must be a finite value >= 0");
    }
  } else {
    const auto& p = std::get<LatencyPercentiles>(latency);
    require(finite_nonneg(p.p50_ms), field + ".p50_ms", "must be a finite value >= 0");
    require(finite_nonneg(p.p95_ms), field + ".p95_ms", "must be a finite value >= 0");
    require(finite_nonneg(p.p99_ms), field + ".p99_ms", "must be a finite value >= 0");
    require(p.p50_ms <= p.p95_ms && p.p95_ms <= p.p99_ms, field, "requires p50_ms <= p95_ms <= p99_ms");
  }
}

}  // namespace detail

// Throws SchemaError or InvariantError describing the first violated rule.
inline void validate_fields(const RecordFields& r) {
  using detail::require;
  if (r.model_id.empty()) throw SchemaError("field 'model_id': must not be empty", "model_id");
  if (r.dataset_id.empty()) throw SchemaError("field 'dataset_id': must not be empty", "dataset_id");
  if (is_prompted(r.paradigm)) {
    if (!r.tokens) throw SchemaError("field 'tokens': required for paradigm " + std::string(to_string(r.paradigm)), "tokens");
    if (r.resources)
      throw SchemaError("field 'resources': not allowed for paradigm " + std::string(to_string(r.paradigm)), "resources");
  } else {
    if (!r.resources) throw SchemaError("field 'resources': required for paradigm fine_tuned", "resources");
    if (r.tokens) throw SchemaError("field 'tokens': not allowed for paradigm fine_tuned", "tokens");
  }
  require(detail::fraction(r.quality.f1_macro), "quality.f1_macro", "must be in [0, 1]");
  require(detail::fraction(r.quality.precision_macro), "quality.precision_macro", "must be in [0, 1]");
  require(detail::fraction(r.quality.recall_macro), "quality.recall_macro", "must be in [0, 1]");
  require(detail::fraction(r.quality.accuracy), "quality.accuracy", "must be in [0, 1]");
  detail::check_latency(r.latency, "latency");
  if (r.ttft) detail::check_latency(*r.ttft, "ttft");
  if (r.tokens) {
    require(detail::finite_nonneg(r.tokens->avg_input_tokens_per_request), "tokens.avg_input_tokens_per_request",
            "must be a finite value >= 0");
    require(detail::finite_nonneg(r.tokens->avg_output_tokens_per_request), "tokens.avg_output_tokens_per_request",
            "must be a finite value >= 0");
  }
  if (r.resources) {
    require(std::isfinite(r.resources->vcpu) && r.resources->vcpu > 0.0, "resources.vcpu", "must be > 0");
    require(std::isfinite(r.resources->memory_gib) && r.resources->memory_gib > 0.0, "resources.memory_gib",
            "must be > 0");
  }
  if (r.decoding) {
    require(detail::finite_nonneg(r.decoding->temperature), "decoding.temperature", "must be a finite value >= 0");
    if (r.decoding->top_p) require(detail::fraction(*r.decoding->top_p), "decoding.top_p", "must be in [0, 1]");
  }
  require(r.runs_aggregated >= 1, "runs_aggregated", "must be >= 1");
}

// One model x dataset x run observation. Construction validates every invariant,
// so any MeasurementRecord value in the program is known-good.
class MeasurementRecord {
 public:
  explicit MeasurementRecord(RecordFields fields) : f_(std::move(fields)) { validate_fields(f_); }

  const RecordFields& fields() const noexcept { return f_; }
  const std::string& model_id() const noexcept { return f_.model_id; }
  const std::string& dataset_id() const noexcept { return f_.dataset_id; }
  Paradigm paradigm() const noexcept { return f_.paradigm; }
  const RunId& run_id() const noexcept { return f_.run_id; }
  const QualityMetrics& quality() const noexcept { return f_.quality; }
  const Latency& latency() const noexcept { return f_.latency; }
  const std::optional<Latency>& ttft() const noexcept { return f_.ttft; }
  const std::optional<TokenUsage>& tokens() const noexcept { return f_.tokens; }
  const std::optional<ResourceAllocation>& resources() const noexcept { return f_.resources; }
  const std::optional<DecodingConfig>& decoding() const noexcept { return f_.decoding; }
  std::int64_t runs_aggregated() const noexcept { return f_.runs_aggregated; }

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;

 private:
  RecordFields f_;
};

// ---------------------------------------------------------------------------
// JSON Lines encoding

namespace detail {

// Reads members of one JSON object, tracking which keys were consumed so that
// unknown keys can be reported as schema errors.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw SchemaError("field '" + display() + "': expected an object", path_);
  }

  bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  const json& required(const std::string& key) {
    if (!obj_.contains(key)) throw SchemaError("missing field '" + join(key) + "'", join(key));
    seen_.insert(key);
    return obj_.at(key);
  }

  const json* optional(const std::string& key) {
    if (!obj_.contains(key)) return nullptr;
    seen_.insert(key);
    const json& v = obj_.at(key);
    return v.is_null() ? nullptr : &v;
  }

  double number(const std::string& key) { return as_number(required(key), join(key)); }

  std::string string(const std::string& key) {
    const json& v = required(key);
    if (!v.is_string()) throw SchemaError("field '" + join(key) + "': expected a string", join(key));
    return v.get<std::string>();
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw SchemaError("unknown field '" + join(key) + "'", join(key));
    }
  }

  static double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw SchemaError("field '" + field + "': expected a number", field);
    return v.get<double>();
  }

 private:
  std::string display() const { return path_.empty() ? "<record>" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Latency latency_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  const bool trace = r.has("samples_ms");
  const bool pct = r.has("p50_ms") || r.has("p95_ms") || r.has("p99_ms");
  if (trace && pct)
    throw SchemaError("field '" + path + "': holds both a raw trace and precomputed percentiles", path);
  if (!trace && !pct)
    throw SchemaError("field '" + path + "': needs either samples_ms or p50_ms/p95_ms/p99_ms", path);
  if (trace) {
    LatencyTrace t;
    const json& s = r.required("samples_ms");
    if (!s.is_array()) throw SchemaError("field '" + r.join("samples_ms") + "': expected an array", r.join("samples_ms"));
    t.samples_ms.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      t.samples_ms.push_back(ObjectReader::as_number(s[i], r.join("samples_ms") + "[" + std::to_string(i) + "]"));
    }
    if (const json* w = r.optional("warmup_count")) {
      if (!w->is_number_integer())
        throw SchemaError("field '" + r.join("warmup_count") + "': expected an integer", r.join("warmup_count"));
      t.warmup_count = w->get<std::int64_t>();
    }
    r.finish();
    return t;
  }
  LatencyPercentiles p;
  p.p50_ms = r.number("p50_ms");
  p.p95_ms = r.number("p95_ms");
  p.p99_ms = r.number("p99_ms");
  r.finish();
  return p;
}

inline json latency_to_json(const Latency& latency) {
  if (const auto* t = std::get_if<LatencyTrace>(&latency)) {
    return json{{"samples_ms", t->samples_ms}, {"warmup_count", t->warmup_count}};
  }
  const auto& p = std::get<LatencyPercentiles>(latency);
  return json{{"p50_ms", p.p50_ms}, {"p95_ms", p.p95_ms}, {"p99_ms", p.p99_ms}};
}

}  // namespace detail

inline RecordFields record_fields_from_json(const json& j) {
  detail::ObjectReader r(j, "");
  RecordFields f;
  f.model_id = r.string("model_id");
  f.dataset_id = r.string("dataset_id");
  const std::string paradigm = r.string("paradigm");
  const auto p = parse_paradigm(paradigm);
  if (!p) throw SchemaError("field 'paradigm': unknown value '" + paradigm + "'", "paradigm");
  f.paradigm = *p;

  const json& run = r.required("run_id");
  if (run.is_number_integer()) {
    f.run_id = run.get<std::int64_t>();
  } else if (run.is_string()) {
    f.run_id = run.get<std::string>();
  } else {
    throw SchemaError("field 'run_id': expected an integer or a string", "run_id");
  }

  {
    detail::ObjectReader q(r.required("quality"), "quality");
    f.quality.f1_macro = q.number("f1_macro");
    f.quality.precision_macro = q.number("precision_macro");
    f.quality.recall_macro = q.number("recall_macro");
    f.quality.accuracy = q.number("accuracy");
    q.finish();
  }

  f.latency = detail::latency_from_json(r.required("latency"), "latency");
  if (const json* t = r.optional("ttft")) f.ttft = detail::latency_from_json(*t, "ttft");

  if (const json* t = r.optional("tokens")) {
    detail::ObjectReader tr(*t, "tokens");
    f.tokens = TokenUsage{tr.number("avg_input_tokens_per_request"), tr.number("avg_output_tokens_per_request")};
    tr.finish();
  }
  if (const json* res = r.optional("resources")) {
    detail::ObjectReader rr(*res, "resources");
    f.resources = ResourceAllocation{rr.number("vcpu"), rr.number("memory_gib")};
    rr.finish();
  }
  if (const json* d = r.optional("decoding")) {
    detail::ObjectReader dr(*d, "decoding");
    DecodingConfig cfg;
    cfg.temperature = dr.number("temperature");
    if (const json* tp = dr.optional("top_p")) cfg.top_p = detail::ObjectReader::as_number(*tp, "decoding.top_p");
    dr.finish();
    f.decoding = cfg;
  }
  if (const json* n = r.optional("runs_aggregated")) {
    if (!n->is_number_integer()) throw SchemaError("field 'runs_aggregated': expected an integer", "runs_aggregated");
    f.runs_aggregated = n->get<std::int64_t>();
  }
  r.finish();
  return f;
}

inline json to_json(const MeasurementRecord& rec) {
  const auto& f = rec.fields();
  json j;
  j["model_id"] = f.model_id;
  j["dataset_id"] = f.dataset_id;
  j["paradigm"] = std::string(to_string(f.paradigm));
  std::visit([&](const auto& v) { j["run_id"] = v; }, f.run_id);
  j["quality"] = json{{"f1_macro", f.quality.f1_macro},
                      {"precision_macro", f.quality.precision_macro},
                      {"recall_macro", f.quality.recall_macro},
                      {"accuracy", f.quality.accuracy}};
  j["latency"] = detail::latency_to_json(f.latency);
  if (f.ttft) j["ttft"] = detail::latency_to_json(*f.ttft);
  if (f.tokens)
    j["tokens"] = json{{"avg_input_tokens_per_request", f.tokens->avg_input_tokens_per_request},
                       {"avg_output_tokens_per_request", f.tokens->avg_output_tokens_per_request}};
  if (f.resources) j["resources"] = json{{"vcpu", f.resources->vcpu}, {"memory_gib", f.resources->memory_gib}};
  if (f.decoding) {
    json d{{"temperature", f.decoding->temperature}};
    if (f.decoding->top_p) d["top_p"] = *f.decoding->top_p;
    j["decoding"] = d;
  }
  if (f.runs_aggregated != 1) j["runs_aggregated"] = f.runs_aggregated;
  return j;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Blank lines and lines starting with '#' (provenance headers) carry no record.
inline bool is_skippable(std::string_view line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

inline std::string record_context(std::size_t index, std::size_t line) {
  return "record " + std::to_string(index) + " (line " + std::to_string(line) + ")";
}

template <class Fn>
MeasurementRecord build_record(std::size_t index, std::size_t line, Fn&& make_fields) {
  try {
    return MeasurementRecord(make_fields());
  } catch (const SchemaError& e) {
    throw SchemaError(record_context(index, line) + ": " + e.what(), e.field());
  } catch (const InvariantError& e) {
    throw InvariantError(record_context(index, line) + ": " + e.what(), e.field());
  }
}

}  // namespace detail

// Parses a JSON Lines records stream. Order is preserved; the first bad line aborts.
inline std::vector<MeasurementRecord> parse_records(std::istream& in) {
  std::vector<MeasurementRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SyntaxError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what(), line_no);
    }
    out.push_back(detail::build_record(out.size() + 1, line_no, [&] { return record_fields_from_json(j); }));
  }
  return out;
}

inline std::vector<MeasurementRecord> parse_records(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_records(in);
}

inline void write_records(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// CSV import. Only precomputed percentiles are representable; an empty cell
// means "absent". Header order is free, but the header must name exactly
// these columns.

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "model_id",         "dataset_id",      "paradigm",
      "run_id",           "f1_macro",        "precision_macro",
      "recall_macro",     "accuracy",        "p50_ms",
      "p95_ms",           "p99_ms",          "ttft_p50_ms",
      "ttft_p95_ms",      "ttft_p99_ms",     "avg_input_tokens_per_request",
      "avg_output_tokens_per_request",       "vcpu",
      "memory_gib",       "temperature",     "top_p",
      "runs_aggregated"};
  return cols;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  if (line.find('"') != std::string::npos)
    throw SyntaxError("line " + std::to_string(line_no) + ": quoted CSV cells are not supported", line_no);
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_csv_number(const std::string& cell, const std::string& column, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw SyntaxError("line " + std::to_string(line_no) + ": column '" + column + "': not a number: '" + cell + "'",
                      line_no, column);
  }
}

}  // namespace detail

inline std::vector<MeasurementRecord> parse_records_csv(std::istream& in) {
  std::vector<MeasurementRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> index;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_skippable(line)) continue;
    auto cells = detail::split_csv_line(detail::trim(line), line_no);
    if (!have_header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& known = csv_columns();
        if (std::find(known.begin(), known.end(), cells[i]) == known.end())
          throw SchemaError("unknown CSV column '" + cells[i] + "'", cells[i]);
        if (!index.emplace(cells[i], i).second) throw SchemaError("duplicate CSV column '" + cells[i] + "'", cells[i]);
      }
      for (const auto& c : csv_columns()) {
        if (!index.count(c)) throw SchemaError("missing CSV column '" + c + "'", c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != index.size())
      throw SyntaxError("line " + std::to_string(line_no) + ": expected " + std::to_string(index.size()) +
                            " cells, found " + std::to_string(cells.size()),
                        line_no);
    auto cell = [&](const std::string& c) -> const std::string& { return cells[index.at(c)]; };
    auto num = [&](const std::string& c) -> std::optional<double> {
      if (cell(c).empty()) return std::nullopt;
      return detail::parse_csv_number(cell(c), c, line_no);
    };
    auto need = [&](const std::string& c, const std::string& field) -> double {
      auto v = num(c);
      if (!v) throw SchemaError("missing field '" + field + "'", field);
      return *v;
    };

    out.push_back(detail::build_record(out.size() + 1, line_no, [&] {
      RecordFields f;
      f.model_id = cell("model_id");
      f.dataset_id = cell("dataset_id");
      const auto p = parse_paradigm(cell("paradigm"));
      if (!p) throw SchemaError("field 'paradigm': unknown value '" + cell("paradigm") + "'", "paradigm");
      f.paradigm = *p;
      const std::string& run = cell("run_id");
      if (run.empty()) throw SchemaError("missing field 'run_id'", "run_id");
      if (std::all_of(run.begin(), run.end(), [](char c) { return c >= '0' && c <= '9'; }) && run.size() < 19) {
        f.run_id = static_cast<std::int64_t>(std::stoll(run));
      } else {
        f.run_id = run;
      }
      f.quality = {need("f1_macro", "quality.f1_macro"), need("precision_macro", "quality.precision_macro"),
                   need("recall_macro", "quality.recall_macro"), need("accuracy", "quality.accuracy")};
      f.latency = LatencyPercentiles{need("p50_ms", "latency.p50_ms"), need("p95_ms", "latency.p95_ms"),
                                     need("p99_ms", "latency.p99_ms")};
      if (num("ttft_p50_ms") || num("ttft_p95_ms") || num("ttft_p99_ms")) {
        f.ttft = LatencyPercentiles{need("ttft_p50_ms", "ttft.p50_ms"), need("ttft_p95_ms", "ttft.p95_ms"),
                                    need("ttft_p99_ms", "ttft.p99_ms")};
      }
      if (num("avg_input_tokens_per_request") || num("avg_output_tokens_per_request")) {
        f.tokens = TokenUsage{need("avg_input_tokens_per_request", "tokens.avg_input_tokens_per_request"),
                              need("avg_output_tokens_per_request", "tokens.avg_output_tokens_per_request")};
      }
      if (num("vcpu") || num("memory_gib")) {
        f.resources = ResourceAllocation{need("vcpu", "resources.vcpu"), need("memory_gib", "resources.memory_gib")};
      }
      if (num("temperature") || num("top_p")) {
        f.decoding = DecodingConfig{need("temperature", "decoding.temperature"), num("top_p")};
      }
      if (auto n = num("runs_aggregated")) {
        if (*n != std::floor(*n)) throw SchemaError("field 'runs_aggregated': expected an integer", "runs_aggregated");
        f.runs_aggregated = static_cast<std::int64_t>(*n);
      }
      return f;
    }));
  }
  return out;
}

// Loads a records file, choosing CSV for a ".csv" extension and JSON Lines otherwise.
inline std::vector<MeasurementRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open records file '" + path.string() + "'", path.string());
  if (path.extension() == ".csv") return parse_records_csv(in);
  return parse_records(in);
}

// ---------------------------------------------------------------------------
// Consistency checks across records

inline constexpr std::int64_t kProtocolRunCount = 3;

struct Warning {
  enum class Kind { run_count_below_protocol, mixed_latency_representation, unexpected_ttft, duplicate_record };

  Kind kind;
  std::string model_id;
  std::string dataset_id;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

inline std::string_view to_string(Warning::Kind k) {
  switch (k) {
    case Warning::Kind::run_count_below_protocol: return "run_count_below_protocol";
    case Warning::Kind::mixed_latency_representation: return "mixed_latency_representation";
    case Warning::Kind::unexpected_ttft: return "unexpected_ttft";
    case Warning::Kind::duplicate_record: return "duplicate_record";
  }
  return "unknown";
}

// Display label for a model configuration: "distilbert" or "gpt-4o (ZS)".
inline std::string config_label(const std::string& model_id, Paradigm p) {
  if (!is_prompted(p)) return model_id;
  return model_id + " (" + std::string(short_name(p)) + ")";
}

inline std::vector<Warning> validate_consistency(const std::vector<MeasurementRecord>& records) {
  using GroupKey = std::tuple<std::string, std::string, Paradigm>;  // dataset, model, paradigm
  struct Group {
    std::int64_t runs = 0;
    bool has_trace = false;
    bool has_percentiles = false;
    std::set<std::string> run_ids;
  };
  std::map<GroupKey, Group> groups;
  std::vector<Warning> warnings;

  for (const auto& r : records) {
    auto& g = groups[{r.dataset_id(), r.model_id(), r.paradigm()}];
    const std::string label = config_label(r.model_id(), r.paradigm());
    if (!g.run_ids.insert(to_string(r.run_id())).second) {
      warnings.push_back({Warning::Kind::duplicate_record, label, r.dataset_id(),
                          label + " on " + r.dataset_id() + ": duplicate run_id '" + to_string(r.run_id()) +
                              "' (later record ignored)"});
      continue;
    }
    g.runs += r.runs_aggregated();
    (std::holds_alternative<LatencyTrace>(r.latency()) ? g.has_trace : g.has_percentiles) = true;
    if (r.paradigm() == Paradigm::fine_tuned && r.ttft()) {
      warnings.push_back({Warning::Kind::unexpected_ttft, label, r.dataset_id(),
                          label + " on " + r.dataset_id() + " run " + to_string(r.run_id()) +
                              ": unexpected TTFT on a fine-tuned record"});
    }
  }
  for (const auto& [key, g] : groups) {
    const auto& [dataset, model, paradigm] = key;
    const std::string label = config_label(model, paradigm);
    if (g.runs < kProtocolRunCount) {
      warnings.push_back({Warning::Kind::run_count_below_protocol, label, dataset,
                          label + " on " + dataset + ": run count below protocol (" + std::to_string(g.runs) + " < " +
                              std::to_string(kProtocolRunCount) + ")"});
    }
    if (g.has_trace && g.has_percentiles) {
      warnings.push_back({Warning::Kind::mixed_latency_representation, label, dataset,
                          label + " on " + dataset + ": mixed raw traces and precomputed percentiles"});
    }
  }
  return warnings;
}

}  // namespace tradeoff
