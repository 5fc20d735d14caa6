#pragma once

// Report serialization. Field order is fixed and floats carry 6 decimals.
//
// JSON: {"observed_f1", "chance_f1", "corrected_f1", "difficulty", "model",
//        "mode", "per_type": {label: {"observed_f1", "chance_f1",
//        "corrected_f1", "difficulty"}}, "runtime_seconds"}
// CSV:  header, then one row per scope ("overall" first, then each type);
//       columns follow the JSON key order with the scope label last.
// Missing values (degenerate corrected_f1, absent difficulty) are JSON null
// and empty CSV cells.

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "agreement.hpp"
#include "types.hpp"

namespace seqagree {

enum class ReportFormat { json, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw InvalidArgument("unknown format '" + s + "'");
}

inline std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

namespace detail {

inline std::string json_number(const std::optional<double>& v) {
  return v ? format_fixed(*v) : std::string("null");
}

inline std::string csv_number(const std::optional<double>& v) { return v ? format_fixed(*v) : std::string(); }

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void json_scores(std::ostream& out, const Scores& s, const std::string& indent) {
  out << indent << "\"observed_f1\": " << format_fixed(s.observed_f1) << ",\n"
      << indent << "\"chance_f1\": " << format_fixed(s.chance_f1) << ",\n"
      << indent << "\"corrected_f1\": " << json_number(s.corrected_f1) << ",\n"
      << indent << "\"difficulty\": " << json_number(s.difficulty);
}

}  // namespace detail

inline const char* kReportCsvHeader =
    "observed_f1,chance_f1,corrected_f1,difficulty,model,mode,runtime_seconds,scope";

/// Writes the JSON object without a trailing newline so callers can append keys.
inline void write_report_json_body(const AgreementReport& report, std::ostream& out) {
  out << "{\n";
  detail::json_scores(out, report.scores(), "  ");
  out << ",\n  \"model\": " << detail::json_string(to_string(report.model)) << ",\n"
      << "  \"mode\": " << detail::json_string(to_string(report.mode)) << ",\n"
      << "  \"per_type\": {";
  bool first = true;
  for (const auto& [label, scores] : report.per_type) {
    out << (first ? "\n" : ",\n") << "    " << detail::json_string(label) << ": {\n";
    detail::json_scores(out, scores, "      ");
    out << "\n    }";
    first = false;
  }
  out << (report.per_type.empty() ? "}" : "\n  }") << ",\n"
      << "  \"runtime_seconds\": " << format_fixed(report.runtime_seconds);
}

inline void emit_report(const AgreementReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::json) {
    write_report_json_body(report, out);
    out << "\n}\n";
  } else {
    const std::string model = to_string(report.model);
    const std::string mode = to_string(report.mode);
    const std::string runtime = format_fixed(report.runtime_seconds);
    auto row = [&](const Scores& s, const std::string& scope) {
      out << format_fixed(s.observed_f1) << ',' << format_fixed(s.chance_f1) << ','
          << detail::csv_number(s.corrected_f1) << ',' << detail::csv_number(s.difficulty) << ','
          << model << ',' << mode << ',' << runtime << ',' << detail::csv_field(scope) << '\n';
    };
    out << kReportCsvHeader << '\n';
    row(report.scores(), "overall");
    for (const auto& [label, scores] : report.per_type) row(scores, label);
  }
  out.flush();
  if (!out) throw Error("failed to write report");
}

inline std::string report_to_string(const AgreementReport& report, ReportFormat format) {
  std::ostringstream out;
  emit_report(report, format, out);
  return out.str();
}

namespace detail {

inline std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

inline Scores scores_from_json(const nlohmann::json& j) {
  return {j.at("observed_f1").get<double>(), j.at("chance_f1").get<double>(),
          optional_number(j, "corrected_f1"), optional_number(j, "difficulty")};
}

}  // namespace detail

/// Inverse of the JSON emitter (extra keys such as "config" are ignored).
inline AgreementReport parse_report_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  AgreementReport r;
  r.set_scores(detail::scores_from_json(j));
  r.model = parse_model(j.at("model").get<std::string>());
  r.mode = parse_compute_mode(j.at("mode").get<std::string>());
  for (const auto& [label, value] : j.at("per_type").items())
    r.per_type.emplace(label, detail::scores_from_json(value));
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  return r;
}

/// Report with every float rounded as the emitters print it.
inline AgreementReport rounded(AgreementReport r) {
  auto round6 = [](double v) { return std::stod(format_fixed(v)); };
  auto round_scores = [&](Scores s) {
    s.observed_f1 = round6(s.observed_f1);
    s.chance_f1 = round6(s.chance_f1);
    if (s.corrected_f1) s.corrected_f1 = round6(*s.corrected_f1);
    if (s.difficulty) s.difficulty = round6(*s.difficulty);
    return s;
  };
  r.set_scores(round_scores(r.scores()));
  for (auto& [label, s] : r.per_type) s = round_scores(s);
  r.runtime_seconds = round6(r.runtime_seconds);
  return r;
}

}  // namespace seqagree
