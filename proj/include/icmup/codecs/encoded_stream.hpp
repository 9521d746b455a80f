#pragma once

#include <istream>
#include <sstream>
#include <string>
#include <variant>

#include "icmup/codecs/chunking.hpp"
#include "icmup/codecs/encoded.hpp"
#include "icmup/codecs/run_length.hpp"
#include "icmup/codecs/schema.hpp"
#include "icmup/error.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

using EncodedStream =
    std::variant<Encoded<ChunkPayload>, Encoded<SchemaPayload>, Encoded<RunLengthStream>>;

inline std::string_view codec_name(const EncodedStream& stream) {
  switch (stream.index()) {
    case 0: return "chunk";
    case 1: return "spc";
    default: return "rle";
  }
}

inline double original_bits(const EncodedStream& s) {
  return std::visit([](const auto& e) { return e.original_bits; }, s);
}

inline double encoded_bits(const EncodedStream& s) {
  return std::visit([](const auto& e) { return e.encoded_bits; }, s);
}

// Text form, one item per line:
//
//   codec <chunk|spc|rle>
//   original_bits <bits>
//   encoded_bits <bits>
//   chunk: code_prefix <p> / dictionary <n> / n x "<code>\t<chunk>" / residual <m> / "<symbols>"
//   spc:   schema <name> / choices <n> / n x "<slot>\t<index>"
//   rle:   runs <n> / n x "<count>\t<unit>"
//
// Bit sizes are written as the shortest text that reads back to the same
// double, so output is byte-for-byte reproducible.

inline std::string serialize(const EncodedStream& stream) {
  std::string out = "codec " + std::string(codec_name(stream)) + "\n";
  out += "original_bits " + format_bits(original_bits(stream)) + "\n";
  out += "encoded_bits " + format_bits(encoded_bits(stream)) + "\n";
  if (const auto* chunk = std::get_if<Encoded<ChunkPayload>>(&stream)) {
    const auto& p = chunk->payload;
    out += "code_prefix " + p.code_prefix + "\n";
    out += "dictionary " + std::to_string(p.dictionary.entries.size()) + "\n";
    for (const auto& e : p.dictionary.entries) out += e.code + "\t" + join_symbols(e.chunk) + "\n";
    out += "residual " + std::to_string(p.residual.size()) + "\n";
    out += join_symbols(p.residual) + "\n";
  } else if (const auto* spc = std::get_if<Encoded<SchemaPayload>>(&stream)) {
    out += "schema " + spc->payload.schema_name + "\n";
    out += "choices " + std::to_string(spc->payload.choices.size()) + "\n";
    for (const auto& c : spc->payload.choices) out += c.slot + "\t" + std::to_string(c.filler) + "\n";
  } else {
    const auto& rs = std::get<Encoded<RunLengthStream>>(stream).payload;
    out += "runs " + std::to_string(rs.runs.size()) + "\n";
    for (const auto& r : rs.runs) out += std::to_string(r.count) + "\t" + join_symbols(r.unit) + "\n";
  }
  return out;
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : in_(std::string(text)) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(lineno_ + 1, "unexpected end of encoded stream");
    ++lineno_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // `<key> <value>` line.
  std::string field(std::string_view key) {
    auto line = next();
    auto parts = split_symbols(line);
    if (parts.size() != 2 || parts[0] != key) throw ParseError(lineno_, "expected '" + std::string(key) + " <value>'");
    return parts[1];
  }

  double number(std::string_view key) {
    auto v = field(key);
    return parse_double(v, lineno_);
  }

  std::size_t count(std::string_view key) {
    auto v = field(key);
    return parse_count(v, lineno_);
  }

  std::pair<std::string, std::string> tabbed() {
    auto line = next();
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno_, "expected a tab-separated record");
    return {line.substr(0, tab), line.substr(tab + 1)};
  }

  std::size_t line() const { return lineno_; }

 private:
  std::istringstream in_;
  std::size_t lineno_ = 0;
};

}  // namespace detail

inline EncodedStream parse_encoded_stream(std::string_view text) {
  detail::LineReader r(text);
  const std::string codec = r.field("codec");
  const double original = r.number("original_bits");
  const double encoded = r.number("encoded_bits");

  if (codec == "chunk") {
    Encoded<ChunkPayload> e;
    e.original_bits = original;
    e.encoded_bits = encoded;
    e.payload.code_prefix = r.field("code_prefix");
    const std::size_t n = r.count("dictionary");
    for (std::size_t i = 0; i < n; ++i) {
      auto [code, chunk] = r.tabbed();
      e.payload.dictionary.entries.push_back(ChunkEntry{code, split_symbols(chunk)});
    }
    const std::size_t m = r.count("residual");
    e.payload.residual = split_symbols(r.next());
    if (e.payload.residual.size() != m)
      throw ParseError(r.line(), "residual has " + std::to_string(e.payload.residual.size()) +
                                     " symbols, header says " + std::to_string(m));
    return e;
  }
  if (codec == "spc") {
    Encoded<SchemaPayload> e;
    e.original_bits = original;
    e.encoded_bits = encoded;
    e.payload.schema_name = r.field("schema");
    const std::size_t n = r.count("choices");
    for (std::size_t i = 0; i < n; ++i) {
      auto [slot, index] = r.tabbed();
      e.payload.choices.push_back(SlotChoice{slot, parse_count(index, r.line())});
    }
    return e;
  }
  if (codec == "rle") {
    Encoded<RunLengthStream> e;
    e.original_bits = original;
    e.encoded_bits = encoded;
    const std::size_t n = r.count("runs");
    for (std::size_t i = 0; i < n; ++i) {
      auto [count, unit] = r.tabbed();
      Run run{split_symbols(unit), parse_count(count, r.line())};
      if (run.count == 0 || run.unit.empty()) throw ParseError(r.line(), "run needs a unit and a count >= 1");
      e.payload.runs.push_back(std::move(run));
    }
    return e;
  }
  throw ParseError(1, "unknown codec '" + codec + "'");
}

}  // namespace icmup
