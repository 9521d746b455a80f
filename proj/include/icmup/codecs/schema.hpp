#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "icmup/codecs/encoded.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

// Schema-plus-correction: a stored template with slots. An instance is sent
// as the schema name plus the index of the filler chosen at each slot, e.g.
// `Menu1:(3)(5)(1)`.

struct Slot {
  std::string id;
  std::vector<Sequence> fillers;

  friend bool operator==(const Slot&, const Slot&) = default;
};

using SchemaElement = std::variant<std::string, Slot>;

struct Schema {
  std::string name;
  std::vector<SchemaElement> elements;

  std::size_t slot_count() const {
    std::size_t n = 0;
    for (const auto& e : elements) n += std::holds_alternative<Slot>(e) ? 1 : 0;
    return n;
  }
};

/// Filler indices are 1-based, as in `Menu1:(3)(5)(1)`.
struct SlotChoice {
  std::string slot;
  std::size_t filler = 1;

  friend bool operator==(const SlotChoice&, const SlotChoice&) = default;
};

struct SchemaPayload {
  std::string schema_name;
  std::vector<SlotChoice> choices;

  friend bool operator==(const SchemaPayload&, const SchemaPayload&) = default;
};

inline void validate_schema(const Schema& schema) {
  if (!is_valid_symbol_text(schema.name)) throw invalid_argument("schema name must be a single symbol");
  std::set<std::string> seen;
  for (const auto& e : schema.elements) {
    if (const auto* slot = std::get_if<Slot>(&e)) {
      if (!seen.insert(slot->id).second)
        throw invalid_argument("duplicate slot id '" + slot->id + "' in schema " + schema.name);
      if (slot->fillers.empty())
        throw invalid_argument("slot '" + slot->id + "' has no permitted fillers");
      for (const auto& f : slot->fillers)
        if (f.empty()) throw invalid_argument("slot '" + slot->id + "' has an empty filler");
    }
  }
}

/// ceil(log2(n)) bits to name one of `n` fillers.
inline std::size_t slot_index_bits(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

/// cost(name) + sum over slots of ceil(log2 |fillers|).
inline double schema_encoding_bits(const Schema& schema, const CostModel& cost) {
  double bits = cost.cost_or_fresh(schema.name);
  for (const auto& e : schema.elements)
    if (const auto* slot = std::get_if<Slot>(&e))
      bits += static_cast<double>(slot_index_bits(slot->fillers.size()));
  return bits;
}

namespace detail {

class SchemaMatcher {
 public:
  SchemaMatcher(const Schema& schema, std::span<const std::string> seq)
      : schema_(schema), seq_(seq) {}

  // Number of complete parses from (element, position), saturated at 2.
  int count(std::size_t element, std::size_t pos) {
    if (element == schema_.elements.size()) {
      furthest_ = std::max(furthest_, pos);
      return pos == seq_.size() ? 1 : 0;
    }
    const auto key = std::make_pair(element, pos);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    int total = 0;
    const auto& e = schema_.elements[element];
    if (const auto* fixed = std::get_if<std::string>(&e)) {
      if (pos < seq_.size() && seq_[pos] == *fixed) total = count(element + 1, pos + 1);
      else furthest_ = std::max(furthest_, pos);
    } else {
      const auto& slot = std::get<Slot>(e);
      bool any = false;
      for (const auto& filler : slot.fillers) {
        if (matches_at(filler, pos)) {
          any = true;
          total = std::min(2, total + count(element + 1, pos + filler.size()));
        }
      }
      if (!any) furthest_ = std::max(furthest_, pos);
    }
    memo_[key] = total;
    return total;
  }

  // All parses (at most `limit`), each as one filler index per slot.
  void collect(std::size_t element, std::size_t pos, std::vector<std::size_t>& current,
               std::vector<std::vector<std::size_t>>& out, std::size_t limit) {
    if (out.size() >= limit || count(element, pos) == 0) return;
    if (element == schema_.elements.size()) {
      out.push_back(current);
      return;
    }
    const auto& e = schema_.elements[element];
    if (std::holds_alternative<std::string>(e)) {
      collect(element + 1, pos + 1, current, out, limit);
      return;
    }
    const auto& slot = std::get<Slot>(e);
    for (std::size_t f = 0; f < slot.fillers.size(); ++f) {
      if (!matches_at(slot.fillers[f], pos)) continue;
      current.push_back(f);
      collect(element + 1, pos + slot.fillers[f].size(), current, out, limit);
      current.pop_back();
    }
  }

  std::size_t furthest() const { return furthest_; }

 private:
  bool matches_at(const Sequence& filler, std::size_t pos) const {
    if (pos + filler.size() > seq_.size()) return false;
    for (std::size_t i = 0; i < filler.size(); ++i)
      if (seq_[pos + i] != filler[i]) return false;
    return true;
  }

  const Schema& schema_;
  std::span<const std::string> seq_;
  std::map<std::pair<std::size_t, std::size_t>, int> memo_;
  std::size_t furthest_ = 0;
};

}  // namespace detail

/// Encodes `seq` as the filler choices of `schema`. The match must be unique:
/// a sequence that fits the schema in more than one way is rejected, naming
/// the slots whose choices differ.
inline Encoded<SchemaPayload> spc_encode(std::span<const std::string> seq, const Schema& schema,
                                         const CostModel& cost) {
  validate_schema(schema);
  detail::SchemaMatcher matcher(schema, seq);
  const int parses = matcher.count(0, 0);
  if (parses == 0)
    throw invalid_argument("sequence does not match schema " + schema.name + " at position " +
                           std::to_string(matcher.furthest()));

  std::vector<std::vector<std::size_t>> found;
  std::vector<std::size_t> current;
  matcher.collect(0, 0, current, found, 2);

  std::vector<const Slot*> slots;
  for (const auto& e : schema.elements)
    if (const auto* s = std::get_if<Slot>(&e)) slots.push_back(s);

  if (parses > 1) {
    std::string involved;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (found[0][i] == found[1][i]) continue;
      if (!involved.empty()) involved += ", ";
      involved += slots[i]->id + " (slot " + std::to_string(i + 1) + ")";
    }
    throw invalid_argument("ambiguous match against schema " + schema.name + "; slots involved: " + involved);
  }

  Encoded<SchemaPayload> out;
  out.payload.schema_name = schema.name;
  for (std::size_t i = 0; i < slots.size(); ++i)
    out.payload.choices.push_back(SlotChoice{slots[i]->id, found[0][i] + 1});
  out.original_bits = 0.0;
  for (const auto& s : seq) out.original_bits += cost.cost_or_fresh(s);
  out.encoded_bits = schema_encoding_bits(schema, cost);
  return out;
}

inline Sequence spc_decode(const Schema& schema, std::span<const SlotChoice> choices) {
  validate_schema(schema);
  Sequence out;
  std::size_t next = 0;
  for (const auto& e : schema.elements) {
    if (const auto* fixed = std::get_if<std::string>(&e)) {
      out.push_back(*fixed);
      continue;
    }
    const auto& slot = std::get<Slot>(e);
    if (next >= choices.size() || choices[next].slot != slot.id)
      throw invalid_argument("no choice given for slot '" + slot.id + "'");
    const std::size_t f = choices[next++].filler;
    if (f < 1 || f > slot.fillers.size())
      throw invalid_argument("filler index " + std::to_string(f) + " out of range for slot '" + slot.id +
                             "' (1.." + std::to_string(slot.fillers.size()) + ")");
    const auto& filler = slot.fillers[f - 1];
    out.insert(out.end(), filler.begin(), filler.end());
  }
  if (next != choices.size()) throw invalid_argument("more choices than slots in schema " + schema.name);
  return out;
}

/// Schema file:
///
///   schema Menu1
///   fixed Appetiser
///   slot S : soup | melon | prawn cocktail
///   fixed sorbet
///
/// Fillers are separated by `|` and may span several symbols.
inline Schema parse_schema(std::istream& in) {
  Schema schema;
  std::string line;
  std::size_t lineno = 0;
  bool have_name = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '%') continue;
    auto fields = split_symbols(line);
    if (fields.empty()) continue;
    const std::string& kind = fields[0];
    if (kind == "schema") {
      if (fields.size() != 2) throw ParseError(lineno, "expected 'schema <name>'");
      schema.name = fields[1];
      have_name = true;
    } else if (kind == "fixed") {
      if (fields.size() < 2) throw ParseError(lineno, "expected 'fixed <symbols...>'");
      for (std::size_t i = 1; i < fields.size(); ++i) schema.elements.emplace_back(fields[i]);
    } else if (kind == "slot") {
      if (fields.size() < 4 || fields[2] != ":") throw ParseError(lineno, "expected 'slot <id> : <filler> | ...'");
      Slot slot{fields[1], {}};
      Sequence filler;
      for (std::size_t i = 3; i < fields.size(); ++i) {
        if (fields[i] == "|") {
          if (filler.empty()) throw ParseError(lineno, "empty filler in slot '" + slot.id + "'");
          slot.fillers.push_back(std::move(filler));
          filler.clear();
        } else {
          filler.push_back(fields[i]);
        }
      }
      if (filler.empty()) throw ParseError(lineno, "empty filler in slot '" + slot.id + "'");
      slot.fillers.push_back(std::move(filler));
      schema.elements.emplace_back(std::move(slot));
    } else {
      throw ParseError(lineno, "unknown schema directive '" + kind + "'");
    }
  }
  if (!have_name) throw ParseError(lineno == 0 ? 1 : lineno, "schema has no 'schema <name>' line");
  try {
    validate_schema(schema);
  } catch (const Error& e) {
    throw ParseError(lineno, e.what());
  }
  return schema;
}

inline Schema load_schema(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return parse_schema(in);
}

}  // namespace icmup
