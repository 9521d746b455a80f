#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "icmup/error.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

struct ReportItem {
  std::string name;
  double original_bits = 0.0;
  double encoded_bits = 0.0;

  friend bool operator==(const ReportItem&, const ReportItem&) = default;
};

struct MetricsReport {
  std::string subject;
  double original_bits = 0.0;
  double encoded_bits = 0.0;
  double ratio = 1.0;
  std::vector<ReportItem> breakdown;
  std::optional<double> wall_seconds;  // only when timing was asked for

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// encoded / original; 1 when nothing was there to compress.
inline double compression_ratio(double original, double encoded) {
  if (original > 0.0) return encoded / original;
  return 1.0;
}

inline MetricsReport make_report(std::string subject, double original, double encoded,
                                 std::vector<ReportItem> breakdown = {}) {
  MetricsReport r;
  r.subject = std::move(subject);
  r.original_bits = original;
  r.encoded_bits = encoded;
  r.ratio = compression_ratio(original, encoded);
  r.breakdown = std::move(breakdown);
  return r;
}

enum class ReportFormat { text, structured };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "text") return ReportFormat::text;
  if (s == "json" || s == "structured") return ReportFormat::structured;
  throw invalid_argument("unknown report format '" + std::string(s) + "' (expected text|json)");
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Text: aligned `key value` lines. Structured: one JSON object per line,
/// first the summary, then one record per breakdown item.
inline std::string emit_report(const MetricsReport& r, ReportFormat format) {
  if (format == ReportFormat::text) {
    std::string out = "report " + r.subject + "\n";
    out += "original_bits " + format_bits(r.original_bits) + "\n";
    out += "encoded_bits " + format_bits(r.encoded_bits) + "\n";
    out += "ratio " + fixed6(r.ratio) + "\n";
    for (const auto& it : r.breakdown)
      out += "item " + it.name + " " + format_bits(it.original_bits) + " " + format_bits(it.encoded_bits) + " " +
             fixed6(compression_ratio(it.original_bits, it.encoded_bits)) + "\n";
    if (r.wall_seconds) out += "wall_seconds " + fixed6(*r.wall_seconds) + "\n";
    return out;
  }
  nlohmann::ordered_json head;
  head["record"] = "report";
  head["subject"] = r.subject;
  head["original_bits"] = r.original_bits;
  head["encoded_bits"] = r.encoded_bits;
  head["ratio"] = r.ratio;
  head["items"] = r.breakdown.size();
  if (r.wall_seconds) head["wall_seconds"] = *r.wall_seconds;
  std::string out = head.dump() + "\n";
  for (const auto& it : r.breakdown) {
    nlohmann::ordered_json rec;
    rec["record"] = "item";
    rec["name"] = it.name;
    rec["original_bits"] = it.original_bits;
    rec["encoded_bits"] = it.encoded_bits;
    out += rec.dump() + "\n";
  }
  return out;
}

/// Reads back the structured form.
inline MetricsReport parse_report(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  MetricsReport r;
  std::size_t expected = 0;
  bool have_head = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "report") {
        if (have_head) throw ParseError(lineno, "second report record");
        have_head = true;
        r.subject = j.at("subject").get<std::string>();
        r.original_bits = j.at("original_bits").get<double>();
        r.encoded_bits = j.at("encoded_bits").get<double>();
        r.ratio = j.at("ratio").get<double>();
        expected = j.at("items").get<std::size_t>();
        if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
      } else if (kind == "item") {
        if (!have_head) throw ParseError(lineno, "item before the report record");
        r.breakdown.push_back(ReportItem{j.at("name").get<std::string>(), j.at("original_bits").get<double>(),
                                         j.at("encoded_bits").get<double>()});
      } else {
        throw ParseError(lineno, "unknown record '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_head) throw ParseError(lineno == 0 ? 1 : lineno, "no report record");
  if (r.breakdown.size() != expected)
    throw ParseError(lineno, "report announces " + std::to_string(expected) + " items, found " +
                                 std::to_string(r.breakdown.size()));
  return r;
}

}  // namespace icmup
