#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "icmup/codecs/encoded.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

// Chunking-with-codes: a repeated subsequence is stored once in a dictionary
// under a fresh code, and every occurrence is replaced by that code.

struct ChunkEntry {
  std::string code;
  Sequence chunk;

  friend bool operator==(const ChunkEntry&, const ChunkEntry&) = default;
};

/// Entries in adoption order. A chunk may contain the codes of earlier
/// entries, never of later ones, so expanding last-to-first decodes.
struct ChunkDictionary {
  std::vector<ChunkEntry> entries;

  friend bool operator==(const ChunkDictionary&, const ChunkDictionary&) = default;
};

struct ChunkPayload {
  std::string code_prefix = "@";
  ChunkDictionary dictionary;
  Sequence residual;

  friend bool operator==(const ChunkPayload&, const ChunkPayload&) = default;
};

struct ChunkOptions {
  std::size_t min_len = 2;
  std::size_t min_occurrences = 2;
};

/// Bits charged for one dictionary entry: code + chunk + one separator.
inline double chunk_entry_bits(const ChunkEntry& entry, const CostModel& cost) {
  double bits = cost.fresh_symbol_cost() * 2.0;  // code and separator
  for (const auto& s : entry.chunk) bits += cost.cost_or_fresh(s);
  return bits;
}

inline double chunk_payload_bits(const ChunkPayload& payload, const CostModel& cost) {
  double bits = 0.0;
  for (const auto& e : payload.dictionary.entries) bits += chunk_entry_bits(e, cost);
  for (const auto& s : payload.residual) bits += cost.cost_or_fresh(s);
  return bits;
}

/// Saving of replacing `count` non-overlapping copies of a chunk costing
/// `chunk_bits` by a code costing `code_bits`, after paying for the entry.
inline double chunk_saving(std::size_t count, double chunk_bits, double code_bits) {
  const auto k = static_cast<double>(count);
  return (k - 1.0) * chunk_bits - (k + 1.0) * code_bits - code_bits;
}

/// Leftmost-greedy non-overlapping placements among sorted start positions.
inline std::vector<std::size_t> non_overlapping(std::span<const std::size_t> starts, std::size_t length) {
  std::vector<std::size_t> chosen;
  for (std::size_t p : starts) {
    if (chosen.empty() || p >= chosen.back() + length) chosen.push_back(p);
  }
  return chosen;
}

namespace detail {

struct ChunkChoice {
  std::size_t length = 0;
  std::vector<std::size_t> placements;
  double saving = 0.0;
};

// Best repeated subsequence of `seq`. Candidate groups are grown one symbol
// at a time; a group is dropped once it has fewer than `min_occurrences`
// (possibly overlapping) starts, which bounds its non-overlapping count.
inline ChunkChoice best_chunk(const std::vector<std::uint32_t>& seq,
                              const std::vector<double>& symbol_bits,
                              const ChunkOptions& opt, double code_bits) {
  const std::size_t n = seq.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + symbol_bits[seq[i]];

  std::vector<std::vector<std::size_t>> groups;
  {
    std::map<std::uint32_t, std::vector<std::size_t>> by_symbol;
    for (std::size_t i = 0; i < n; ++i) by_symbol[seq[i]].push_back(i);
    for (auto& [_, starts] : by_symbol)
      if (starts.size() >= opt.min_occurrences) groups.push_back(std::move(starts));
  }

  ChunkChoice best;
  bool found = false;
  for (std::size_t length = 1; !groups.empty(); ++length) {
    if (length >= opt.min_len) {
      for (const auto& starts : groups) {
        auto placements = non_overlapping(starts, length);
        if (placements.size() < opt.min_occurrences) continue;
        const double chunk_bits = prefix[starts[0] + length] - prefix[starts[0]];
        const double saving = chunk_saving(placements.size(), chunk_bits, code_bits);
        const bool better =
            !found || saving > best.saving ||
            (saving == best.saving &&
             (length > best.length || (length == best.length && placements[0] < best.placements[0])));
        if (better) {
          best = ChunkChoice{length, std::move(placements), saving};
          found = true;
        }
      }
    }
    std::vector<std::vector<std::size_t>> next;
    for (const auto& starts : groups) {
      std::map<std::uint32_t, std::vector<std::size_t>> by_next;
      for (std::size_t p : starts)
        if (p + length < n) by_next[seq[p + length]].push_back(p);
      for (auto& [_, s] : by_next)
        if (s.size() >= opt.min_occurrences) next.push_back(std::move(s));
    }
    groups = std::move(next);
  }
  if (!found) best.saving = 0.0;
  return best;
}

}  // namespace detail

/// Greedy chunking: repeatedly replaces the repeated subsequence with the
/// largest positive bit saving until none is left. Ties prefer the longer
/// chunk, then the leftmost first occurrence. Never expands the input.
inline Encoded<ChunkPayload> chunk_encode(std::span<const std::string> seq,
                                          const ChunkOptions& opt, const CostModel& cost) {
  if (seq.empty()) throw invalid_argument("chunk_encode: empty sequence");
  if (opt.min_len < 2) throw invalid_argument("chunk_encode: min_len must be at least 2");
  if (opt.min_occurrences < 2) throw invalid_argument("chunk_encode: min_occurrences must be at least 2");

  Encoded<ChunkPayload> out;
  out.original_bits = cost.sequence_cost(seq);
  std::set<std::string_view> alphabet(seq.begin(), seq.end());
  out.payload.code_prefix = fresh_code_prefix(alphabet);

  std::vector<std::string> names;
  std::vector<double> bits;
  std::unordered_map<std::string, std::uint32_t> index;
  auto intern = [&](const std::string& s, double b) {
    auto [it, inserted] = index.emplace(s, static_cast<std::uint32_t>(names.size()));
    if (inserted) {
      names.push_back(s);
      bits.push_back(b);
    }
    return it->second;
  };
  std::vector<std::uint32_t> current;
  current.reserve(seq.size());
  for (const auto& s : seq) current.push_back(intern(s, cost.cost(s)));

  const double code_bits = cost.fresh_symbol_cost();
  for (std::size_t next_code = 1;; ++next_code) {
    auto choice = detail::best_chunk(current, bits, opt, code_bits);
    if (choice.placements.empty() || !(choice.saving > 0.0)) break;

    ChunkEntry entry;
    entry.code = out.payload.code_prefix + std::to_string(next_code);
    const std::size_t first = choice.placements[0];
    for (std::size_t i = 0; i < choice.length; ++i) entry.chunk.push_back(names[current[first + i]]);
    const std::uint32_t code = intern(entry.code, code_bits);

    std::vector<std::uint32_t> rewritten;
    rewritten.reserve(current.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < current.size();) {
      if (k < choice.placements.size() && choice.placements[k] == i) {
        rewritten.push_back(code);
        i += choice.length;
        ++k;
      } else {
        rewritten.push_back(current[i++]);
      }
    }
    current = std::move(rewritten);
    out.payload.dictionary.entries.push_back(std::move(entry));
  }

  for (std::uint32_t id : current) out.payload.residual.push_back(names[id]);
  out.encoded_bits = chunk_payload_bits(out.payload, cost);
  return out;
}

inline Sequence chunk_decode(const ChunkPayload& payload) {
  std::map<std::string, std::size_t, std::less<>> position;
  for (std::size_t i = 0; i < payload.dictionary.entries.size(); ++i) {
    const auto& e = payload.dictionary.entries[i];
    if (e.chunk.size() < 2) throw invalid_argument("chunk for code '" + e.code + "' is shorter than 2");
    if (!position.emplace(e.code, i).second) throw invalid_argument("duplicate code '" + e.code + "'");
  }
  for (std::size_t i = 0; i < payload.dictionary.entries.size(); ++i) {
    for (const auto& s : payload.dictionary.entries[i].chunk) {
      auto it = position.find(s);
      if (it != position.end() && it->second >= i)
        throw invalid_argument("chunk for code '" + payload.dictionary.entries[i].code +
                               "' refers to later code '" + s + "'");
      if (it == position.end() && is_code_symbol(s, payload.code_prefix))
        throw invalid_argument("unknown code '" + s + "'");
    }
  }

  Sequence current;
  for (const auto& s : payload.residual) {
    if (is_code_symbol(s, payload.code_prefix) && position.find(s) == position.end())
      throw invalid_argument("unknown code '" + s + "' in residual");
    current.push_back(s);
  }
  for (auto e = payload.dictionary.entries.rbegin(); e != payload.dictionary.entries.rend(); ++e) {
    Sequence expanded;
    expanded.reserve(current.size());
    for (auto& s : current) {
      if (s == e->code) expanded.insert(expanded.end(), e->chunk.begin(), e->chunk.end());
      else expanded.push_back(std::move(s));
    }
    current = std::move(expanded);
  }
  return current;
}

}  // namespace icmup
