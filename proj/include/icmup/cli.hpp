#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "icmup/alignment/decode.hpp"
#include "icmup/alignment/render.hpp"
#include "icmup/alignment/search.hpp"
#include "icmup/codecs/encoded_stream.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/report.hpp"
#include "icmup/segmentation.hpp"

namespace icmup::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 2,
  exit_parse = 3,
  exit_no_decode = 4,
  exit_io = 5,
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return exit_usage;
    case ErrorKind::parse: return exit_parse;
    case ErrorKind::no_decode: return exit_no_decode;
    case ErrorKind::io: return exit_io;
  }
  return exit_usage;
}

inline std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "usage";
    case ErrorKind::parse: return "parse";
    case ErrorKind::no_decode: return "no-decode";
    case ErrorKind::io: return "io";
  }
  return "usage";
}

struct RunConfig {
  std::string command;  // compress decompress align encode decode segment stats
  std::string codec = "chunk";
  std::filesystem::path input;
  std::filesystem::path output;  // empty: standard output
  std::filesystem::path grammar;
  std::filesystem::path schema;
  std::filesystem::path gold;
  std::filesystem::path lexicon;
  std::string new_text;
  std::string code_text;
  CostMode cost = CostMode::uniform;
  SearchOptions search;
  std::size_t min_len = 2;
  std::size_t max_unit = 4;
  std::size_t max_iter = 1000;
  double min_gain = 0.0;
  ReportFormat format = ReportFormat::text;
  bool timing = false;
};

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::io, "error writing " + path.string());
}

namespace detail {

inline void require(bool ok, std::string_view what) {
  if (!ok) throw invalid_argument(std::string(what));
}

inline Sequence read_symbols(const std::filesystem::path& path) {
  auto seq = split_symbols(read_file(path));
  if (seq.empty()) throw invalid_argument(path.string() + " holds no symbols");
  return seq;
}

/// The New pattern: `--new` text, or else the symbols of `--input`.
inline Sequence new_pattern(const RunConfig& c) {
  if (!c.new_text.empty()) {
    auto seq = split_symbols(c.new_text);
    require(!seq.empty(), "--new holds no symbols");
    return seq;
  }
  require(!c.input.empty(), c.command + " needs --new or --input");
  return read_symbols(c.input);
}

inline void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.output.empty()) out << text;
  else write_file(c.output, text);
}

inline std::string report_text(const RunConfig& c, MetricsReport r, std::chrono::steady_clock::time_point t0) {
  if (c.timing) r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return emit_report(r, c.format);
}

inline EncodedStream encode_with(const RunConfig& c, std::string_view codec, const Sequence& seq) {
  const auto cost = CostModel::fit(c.cost, seq);
  if (codec == "chunk") return chunk_encode(seq, ChunkOptions{c.min_len, 2}, cost);
  if (codec == "rle") return rle_encode(seq, c.max_unit, cost);
  if (codec == "spc") {
    require(!c.schema.empty(), "codec spc needs --schema");
    return spc_encode(seq, load_schema(c.schema), cost);
  }
  throw invalid_argument("unknown codec '" + std::string(codec) + "' (expected chunk|spc|rle)");
}

inline PatternStore grammar_store(const RunConfig& c) {
  require(!c.grammar.empty(), c.command + " needs --grammar");
  return load_store(c.grammar, c.cost);
}

inline int compress(const RunConfig& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  require(!c.input.empty(), "compress needs --input");
  const auto seq = read_symbols(c.input);
  const auto enc = encode_with(c, c.codec, seq);
  emit(c, out, serialize(enc));
  auto report = make_report("compress", original_bits(enc), encoded_bits(enc),
                            {ReportItem{std::string(codec_name(enc)), original_bits(enc), encoded_bits(enc)}});
  out << report_text(c, report, t0);
  return exit_ok;
}

inline int decompress(const RunConfig& c, std::ostream& out) {
  require(!c.input.empty(), "decompress needs --input");
  const auto enc = parse_encoded_stream(read_file(c.input));
  Sequence seq;
  if (const auto* e = std::get_if<Encoded<ChunkPayload>>(&enc)) {
    seq = chunk_decode(e->payload);
  } else if (const auto* e = std::get_if<Encoded<SchemaPayload>>(&enc)) {
    require(!c.schema.empty(), "decompressing an spc stream needs --schema");
    const auto schema = load_schema(c.schema);
    if (schema.name != e->payload.schema_name)
      throw invalid_argument("stream was encoded with schema " + e->payload.schema_name + ", not " + schema.name);
    seq = spc_decode(schema, e->payload.choices);
  } else {
    seq = rle_decode(std::get<Encoded<RunLengthStream>>(enc).payload);
  }
  emit(c, out, join_symbols(seq) + "\n");
  return exit_ok;
}

inline int align(const RunConfig& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto store = grammar_store(c);
  const auto seq = new_pattern(c);
  const auto alignments = build_alignments(seq, store, c.search);
  if (alignments.empty()) throw Error(ErrorKind::no_decode, "no New symbol occurs in the grammar");
  const auto probs = alignment_probabilities(alignments);

  std::string text;
  std::vector<ReportItem> items;
  for (std::size_t k = 0; k < alignments.size(); ++k) {
    const auto& ma = alignments[k];
    items.push_back(ReportItem{"alignment" + std::to_string(k + 1), ma.score.new_bits, ma.score.code_bits});
    if (c.format == ReportFormat::structured) {
      nlohmann::ordered_json rec;
      rec["record"] = "alignment";
      rec["rank"] = k + 1;
      rec["complete"] = is_complete(ma, store);
      rec.update(alignment_record(ma, store, probs[k]));
      text += rec.dump() + "\n";
      continue;
    }
    text += "alignment " + std::to_string(k + 1) + "  CD " + format_bits(ma.score.compression_difference) +
            "  B_new " + format_bits(ma.score.new_bits) + "  B_code " + format_bits(ma.score.code_bits) + "  p " +
            format_bits(probs[k]) + (is_complete(ma, store) ? "" : "  (partial)") + "\n";
    std::vector<std::string> ids;
    for (auto r : ma.old_rows) ids.push_back(store.pattern(r).id);
    text += "rows: " + join_symbols(ids, ", ") + "\n";
    text += render_alignment(ma, store);
    text += "encoding: " + join_symbols(derive_encoding(ma, store).symbols) + "\n\n";
  }
  emit(c, out, text);
  if (c.timing) {
    const auto& top = alignments.front().score;
    out << report_text(c, make_report("align", top.new_bits, top.code_bits, items), t0);
  }
  return exit_ok;
}

inline int encode(const RunConfig& c, std::ostream& out) {
  const auto store = grammar_store(c);
  const auto parse = encode_sentence(new_pattern(c), store, c.search);
  if (c.format == ReportFormat::structured) {
    nlohmann::ordered_json rec;
    rec["record"] = "encoding";
    rec["complete"] = is_complete(parse.alignment, store);
    rec["encoding"] = join_symbols(parse.encoding.symbols);
    rec["B_new"] = parse.alignment.score.new_bits;
    rec["B_code"] = parse.alignment.score.code_bits;
    rec["CD"] = parse.alignment.score.compression_difference;
    emit(c, out, rec.dump() + "\n");
  } else {
    emit(c, out, join_symbols(parse.encoding.symbols) + "\n");
  }
  return exit_ok;
}

inline int decode(const RunConfig& c, std::ostream& out) {
  const auto store = grammar_store(c);
  Sequence code;
  if (!c.code_text.empty()) code = split_symbols(c.code_text);
  else if (!c.input.empty()) code = read_symbols(c.input);
  require(!code.empty(), "decode needs --code or --input");
  const auto res = decode_encoding(code, store, c.search);
  if (c.format == ReportFormat::structured) {
    nlohmann::ordered_json rec;
    rec["record"] = "decoding";
    rec["code"] = join_symbols(code);
    rec["symbols"] = join_symbols(res.symbols);
    rec["degenerate"] = res.degenerate;
    emit(c, out, rec.dump() + "\n");
  } else {
    emit(c, out, join_symbols(res.symbols) + "\n");
  }
  return exit_ok;
}

inline int segment(const RunConfig& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  require(!c.input.empty(), "segment needs an input file");
  const auto raw = read_file(c.input);
  const auto corpus = ingest_text(raw, CharPolicy{}, c.input.string());
  DiscoverOptions opt;
  opt.cost = c.cost;
  opt.max_iter = c.max_iter;
  opt.min_gain = c.min_gain;
  const auto res = discover_chunks(corpus, opt);
  emit(c, out, render_segmented(corpus, res));
  if (!c.lexicon.empty()) write_file(c.lexicon, render_lexicon(res));

  const double original = stream_bits(corpus.stream, c.cost);
  const double final_bits = stream_bits(res.stream, c.cost);
  const double lex = lexicon_bits(res.base_alphabet, res.lexicon.size());
  auto report = make_report("segment", original, final_bits + lex,
                            {ReportItem{"stream", original, final_bits}, ReportItem{"lexicon", 0.0, lex}});
  if (!c.gold.empty()) {
    const auto gold = gold_boundaries(read_file(c.gold), corpus);
    const auto s = score_segmentation(res, gold);
    if (c.format == ReportFormat::structured) {
      nlohmann::ordered_json rec;
      rec["record"] = "segmentation";
      rec["boundaries"] = res.boundaries.size();
      rec["gold"] = gold.size();
      rec["precision"] = s.precision;
      rec["recall"] = s.recall;
      rec["f1"] = s.f1;
      out << rec.dump() << "\n";
    } else {
      out << "segmentation boundaries " << res.boundaries.size() << " gold " << gold.size() << " precision "
          << fixed6(s.precision) << " recall " << fixed6(s.recall) << " f1 " << fixed6(s.f1) << "\n";
    }
  }
  out << report_text(c, report, t0);
  return exit_ok;
}

/// Every codec that applies to the input, side by side. The summary line
/// carries the smallest encoding.
inline int stats(const RunConfig& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  require(!c.input.empty(), "stats needs --input");
  const auto seq = read_symbols(c.input);
  std::vector<ReportItem> items;
  for (std::string_view codec : {"chunk", "rle", "spc"}) {
    if (codec == "spc" && c.schema.empty()) continue;
    const auto enc = encode_with(c, codec, seq);
    items.push_back(ReportItem{std::string(codec), original_bits(enc), encoded_bits(enc)});
  }
  double best = items.front().encoded_bits;
  for (const auto& it : items) best = std::min(best, it.encoded_bits);
  out << report_text(c, make_report("stats", items.front().original_bits, best, items), t0);
  return exit_ok;
}

}  // namespace detail

/// Runs one command. Failures are reported on `err` as
/// `error[<kind>]: <message>` and mapped to the exit-code taxonomy.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config.search);
    if (config.command == "compress") return detail::compress(config, out);
    if (config.command == "decompress") return detail::decompress(config, out);
    if (config.command == "align") return detail::align(config, out);
    if (config.command == "encode") return detail::encode(config, out);
    if (config.command == "decode") return detail::decode(config, out);
    if (config.command == "segment") return detail::segment(config, out);
    if (config.command == "stats") return detail::stats(config, out);
    throw invalid_argument("unknown command '" + config.command + "'");
  } catch (const Error& e) {
    err << "error[" << kind_name(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

}  // namespace icmup::cli
