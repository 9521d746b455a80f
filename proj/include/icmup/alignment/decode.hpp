#pragma once

#include <span>
#include <string>
#include <vector>

#include "icmup/alignment/multiple_alignment.hpp"
#include "icmup/alignment/search.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"

namespace icmup {

/// Top alignment of `sentence` and its encoding.
struct ParseResult {
  MultipleAlignment alignment;
  Encoding encoding;
};

inline ParseResult encode_sentence(std::span<const std::string> sentence, const PatternStore& store,
                                   const SearchOptions& opt) {
  auto alignments = build_alignments(sentence, store, opt);
  if (alignments.empty()) throw Error(ErrorKind::no_decode, "no alignment found for the New pattern");
  ParseResult out{alignments.front(), {}};
  out.encoding = derive_encoding(out.alignment, store);
  return out;
}

struct DecodeResult {
  Sequence symbols;
  /// The top alignment unified the whole code but left no content over.
  bool degenerate = false;
  MultipleAlignment alignment;
};

/// Decompression by compression: the code is aligned as a New pattern
/// against the store, and whatever CONTENT the top alignment leaves
/// unlinked, read in column order, is the decoded sequence.
///
/// Fails with `ErrorKind::no_decode` when a code symbol is not in the store
/// or no alignment unifies every code symbol.
inline DecodeResult decode_encoding(std::span<const std::string> code, const PatternStore& store,
                                    const SearchOptions& opt) {
  if (code.empty()) throw invalid_argument("decode_encoding: empty code");
  for (const auto& s : code)
    if (!store.in_alphabet(s)) throw Error(ErrorKind::no_decode, "code symbol '" + s + "' is not in the store");
  auto alignments = build_alignments(code, store, opt);
  if (alignments.empty() || !is_complete(alignments.front(), store))
    throw Error(ErrorKind::no_decode, "no alignment unifies the whole code '" + join_symbols(code) + "'");
  DecodeResult out;
  out.alignment = std::move(alignments.front());
  out.symbols = unmatched_content(out.alignment, store);
  out.degenerate = out.symbols.empty();
  return out;
}

}  // namespace icmup
