#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

struct CharPolicy {
  bool lowercase = true;
};

/// Unsegmented symbol stream, one symbol per retained character.
struct Corpus {
  Sequence stream;
  std::string provenance;
};

/// Keeps ASCII letters only; whitespace, digits, punctuation and any
/// non-ASCII byte are dropped.
inline Corpus ingest_text(std::string_view raw, CharPolicy policy = {}, std::string provenance = "text") {
  Corpus c;
  c.provenance = std::move(provenance);
  for (unsigned char ch : raw) {
    if (ch >= 0x80 || !std::isalpha(ch)) continue;
    c.stream.emplace_back(1, static_cast<char>(policy.lowercase ? std::tolower(ch) : ch));
  }
  if (c.stream.empty()) throw invalid_argument("no letters left in the input text");
  return c;
}

/// Gold word boundaries from the same text with words separated by
/// whitespace. The letters must match `corpus` exactly.
inline std::set<std::size_t> gold_boundaries(std::string_view spaced, const Corpus& corpus, CharPolicy policy = {}) {
  std::set<std::size_t> out;
  std::size_t pos = 0;
  bool word = false;
  for (unsigned char ch : spaced) {
    if (std::isspace(ch)) {
      if (word && pos > 0) out.insert(pos);
      word = false;
      continue;
    }
    if (ch >= 0x80 || !std::isalpha(ch)) continue;
    const std::string s(1, static_cast<char>(policy.lowercase ? std::tolower(ch) : ch));
    if (pos >= corpus.stream.size() || corpus.stream[pos] != s)
      throw invalid_argument("gold text does not match the corpus at position " + std::to_string(pos));
    ++pos;
    word = true;
  }
  if (pos != corpus.stream.size()) throw invalid_argument("gold text is shorter than the corpus");
  out.erase(pos);
  return out;
}

struct LexiconEntry {
  std::string id;
  std::string left;   // constituents, each a base symbol or an earlier id
  std::string right;
  Sequence expansion;  // over the base alphabet
  std::size_t frequency = 0;
  double gain = 0.0;
  double cumulative_saving = 0.0;
};

struct SegmentationResult {
  std::set<std::size_t> boundaries;
  std::vector<LexiconEntry> lexicon;
  double total_saving = 0.0;
  Sequence stream;  // final rewritten stream
  std::size_t base_alphabet = 0;
};

struct DiscoverOptions {
  CostMode cost = CostMode::frequency;
  std::size_t max_iter = 1000;
  double min_gain = 0.0;
};

/// Bits to transmit a stream. FREQUENCY: each symbol at -log2 of its
/// relative frequency in the stream itself. UNIFORM: log2 of the number of
/// distinct symbols (at least 2) per position.
inline double stream_bits(const std::map<std::string, std::size_t, std::less<>>& counts, CostMode mode) {
  std::size_t total = 0;
  for (const auto& [_, n] : counts) total += n;
  if (total == 0) return 0.0;
  if (mode == CostMode::uniform)
    return static_cast<double>(total) * std::log2(static_cast<double>(std::max<std::size_t>(2, counts.size())));
  double bits = static_cast<double>(total) * std::log2(static_cast<double>(total));
  for (const auto& [_, n] : counts)
    if (n > 0) bits -= static_cast<double>(n) * std::log2(static_cast<double>(n));
  return bits;
}

inline double stream_bits(const Sequence& stream, CostMode mode) {
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& s : stream) ++counts[s];
  return stream_bits(counts, mode);
}

/// Lexicon entry `index` (0-based) is two constituents, its id and a
/// separator, each priced uniformly over the alphabet it extends.
inline double lexicon_entry_bits(std::size_t base_alphabet, std::size_t index) {
  return 4.0 * std::log2(static_cast<double>(base_alphabet + index + 1));
}

inline double lexicon_bits(std::size_t base_alphabet, std::size_t entries) {
  double bits = 0.0;
  for (std::size_t i = 0; i < entries; ++i) bits += lexicon_entry_bits(base_alphabet, i);
  return bits;
}

namespace detail {

inline double xlog2x(double n) { return n > 0 ? n * std::log2(n) : 0.0; }

/// Stream bits after replacing `k` occurrences of the pair (a, b) by a new
/// symbol, from the current counts alone.
inline double merged_stream_bits(double current, std::size_t total, std::size_t distinct, std::size_t na,
                                 std::size_t nb, bool same, std::size_t k, CostMode mode) {
  const double n = static_cast<double>(total), kk = static_cast<double>(k);
  if (mode == CostMode::uniform) {
    std::size_t d = distinct + 1;
    if (same) {
      if (na == 2 * k) --d;
    } else {
      if (na == k) --d;
      if (nb == k) --d;
    }
    return (n - kk) * std::log2(static_cast<double>(std::max<std::size_t>(2, d)));
  }
  double bits = current - xlog2x(n) + xlog2x(n - kk);
  if (same) {
    bits += xlog2x(static_cast<double>(na)) - xlog2x(static_cast<double>(na - 2 * k));
  } else {
    bits += xlog2x(static_cast<double>(na)) - xlog2x(static_cast<double>(na - k));
    bits += xlog2x(static_cast<double>(nb)) - xlog2x(static_cast<double>(nb - k));
  }
  return bits - xlog2x(kk);
}

struct PairCount {
  std::size_t count = 0;
  std::size_t first = 0;
  std::size_t last_end = 0;  // one past the last counted occurrence
};

}  // namespace detail

/// Word discovery by repeatedly unifying the adjacent pair whose merger
/// saves the most bits overall (stream plus lexicon), as long as the saving
/// exceeds `min_gain`.
///
/// Occurrences are counted left to right without overlap, and rewriting
/// replaces exactly those occurrences. Ties go to the pair that occurs
/// first, then to the lexicographically smaller one. Boundaries are the
/// edges between top-level symbols of the final stream that touch at least
/// one chunk; letters no chunk absorbed stay together as one leftover run.
inline SegmentationResult discover_chunks(const Corpus& corpus, const DiscoverOptions& opt = {}) {
  if (corpus.stream.empty()) throw invalid_argument("discover_chunks: empty corpus");
  if (!(opt.min_gain >= 0.0)) throw invalid_argument("min_gain must be >= 0");

  // Symbols are interned; ids below `base` are base symbols.
  std::vector<std::string> names;
  std::map<std::string, std::uint32_t, std::less<>> intern;
  std::vector<std::uint32_t> stream;
  stream.reserve(corpus.stream.size());
  for (const auto& s : corpus.stream) {
    auto [it, fresh] = intern.try_emplace(s, static_cast<std::uint32_t>(names.size()));
    if (fresh) names.push_back(s);
    stream.push_back(it->second);
  }
  const std::size_t base = names.size();
  const std::string prefix = fresh_code_prefix(names);

  SegmentationResult res;
  res.base_alphabet = base;
  std::vector<std::size_t> counts(base, 0);
  std::vector<std::size_t> span(base, 1);
  for (auto s : stream) ++counts[s];
  auto current_bits = [&] {
    std::map<std::string, std::size_t, std::less<>> m;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] > 0) m[names[i]] = counts[i];
    return stream_bits(m, opt.cost);
  };

  while (res.lexicon.size() < opt.max_iter) {
    const double bits = current_bits();
    std::size_t distinct = 0;
    for (auto n : counts) distinct += n > 0;

    std::map<std::pair<std::uint32_t, std::uint32_t>, detail::PairCount> pairs;
    for (std::size_t i = 0; i + 1 < stream.size(); ++i) {
      auto [it, fresh] = pairs.try_emplace({stream[i], stream[i + 1]});
      auto& pc = it->second;
      if (fresh) pc.first = i;
      if (!fresh && pc.last_end > i) continue;
      ++pc.count;
      pc.last_end = i + 2;
    }

    const double entry = lexicon_entry_bits(base, res.lexicon.size());
    bool found = false;
    std::pair<std::uint32_t, std::uint32_t> best{};
    detail::PairCount best_pc;
    double best_gain = 0.0;
    for (const auto& [pair, pc] : pairs) {
      if (pc.count < 2) continue;
      const double after = detail::merged_stream_bits(bits, stream.size(), distinct, counts[pair.first],
                                                      counts[pair.second], pair.first == pair.second, pc.count,
                                                      opt.cost);
      const double gain = bits - after - entry;
      bool better = !found || gain > best_gain;
      if (found && gain == best_gain) {
        if (pc.first != best_pc.first) {
          better = pc.first < best_pc.first;
        } else {
          better = std::tie(names[pair.first], names[pair.second]) <
                   std::tie(names[best.first], names[best.second]);
        }
      }
      if (better) {
        found = true;
        best = pair;
        best_pc = pc;
        best_gain = gain;
      }
    }
    if (!found || !(best_gain > opt.min_gain)) break;

    const auto id = static_cast<std::uint32_t>(names.size());
    LexiconEntry e;
    e.id = prefix + std::to_string(res.lexicon.size() + 1);
    e.left = names[best.first];
    e.right = names[best.second];
    e.frequency = best_pc.count;
    e.gain = best_gain;
    res.total_saving += best_gain;
    e.cumulative_saving = res.total_saving;
    auto expand = [&](std::uint32_t s) -> Sequence {
      if (s < base) return {names[s]};
      return res.lexicon[s - base].expansion;
    };
    e.expansion = expand(best.first);
    for (auto& s : expand(best.second)) e.expansion.push_back(std::move(s));
    names.push_back(e.id);
    span.push_back(e.expansion.size());
    res.lexicon.push_back(std::move(e));

    std::vector<std::uint32_t> next;
    next.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size();) {
      if (i + 1 < stream.size() && stream[i] == best.first && stream[i + 1] == best.second) {
        next.push_back(id);
        i += 2;
      } else {
        next.push_back(stream[i]);
        ++i;
      }
    }
    stream = std::move(next);
    counts[best.first] -= best_pc.count;
    counts[best.second] -= best_pc.count;
    counts.push_back(best_pc.count);
  }

  std::size_t pos = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    pos += span[stream[i]];
    if (i + 1 < stream.size() && (stream[i] >= base || stream[i + 1] >= base)) res.boundaries.insert(pos);
    res.stream.push_back(names[stream[i]]);
  }
  return res;
}

/// Expands the final stream through the lexicon back to base symbols.
inline Sequence expand_stream(const SegmentationResult& res) {
  std::map<std::string, const LexiconEntry*, std::less<>> by_id;
  for (const auto& e : res.lexicon) by_id[e.id] = &e;
  Sequence out;
  for (const auto& s : res.stream) {
    if (auto it = by_id.find(s); it != by_id.end()) {
      out.insert(out.end(), it->second->expansion.begin(), it->second->expansion.end());
    } else {
      out.push_back(s);
    }
  }
  return out;
}

struct SegmentationScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const SegmentationScore&, const SegmentationScore&) = default;
};

/// Boundary precision, recall and F1. Precision is 1 when nothing is
/// predicted, recall is 1 when the gold set is empty, and F1 is 0 when both
/// are 0.
inline SegmentationScore score_segmentation(const std::set<std::size_t>& predicted,
                                            const std::set<std::size_t>& gold) {
  std::size_t hit = 0;
  for (auto b : predicted) hit += gold.count(b);
  SegmentationScore s;
  s.precision = predicted.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(predicted.size());
  s.recall = gold.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(gold.size());
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

inline SegmentationScore score_segmentation(const SegmentationResult& res, const std::set<std::size_t>& gold) {
  return score_segmentation(res.boundaries, gold);
}

/// The corpus with a space at every inferred boundary.
inline std::string render_segmented(const Corpus& corpus, const SegmentationResult& res) {
  std::string out;
  for (std::size_t i = 0; i < corpus.stream.size(); ++i) {
    if (res.boundaries.count(i)) out += ' ';
    out += corpus.stream[i];
  }
  return out + "\n";
}

/// Tab-separated: id, left, right, expansion, frequency, gain, cumulative.
inline std::string render_lexicon(const SegmentationResult& res) {
  std::string out = "id\tleft\tright\texpansion\tfrequency\tgain\tcumulative\n";
  for (const auto& e : res.lexicon) {
    out += e.id + "\t" + e.left + "\t" + e.right + "\t" + join_symbols(e.expansion, "") + "\t" +
           std::to_string(e.frequency) + "\t" + format_bits(e.gain) + "\t" + format_bits(e.cumulative_saving) + "\n";
  }
  return out;
}

}  // namespace icmup
