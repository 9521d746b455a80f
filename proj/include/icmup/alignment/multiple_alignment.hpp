#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

/// Row 0 is the New pattern; row r >= 1 is the (r-1)th Old row.
struct SymbolRef {
  std::uint32_t row = 0;
  std::uint32_t index = 0;

  friend auto operator<=>(const SymbolRef&, const SymbolRef&) = default;
};

/// Unifies two symbols of different rows. Stored with `a < b`.
struct Link {
  SymbolRef a;
  SymbolRef b;

  friend auto operator<=>(const Link&, const Link&) = default;
};

inline Link make_link(SymbolRef x, SymbolRef y) { return x < y ? Link{x, y} : Link{y, x}; }

struct AlignmentScore {
  double new_bits = 0.0;   // B_new: cost of the New symbols that are linked
  double code_bits = 0.0;  // B_code: cost of the encoding
  double compression_difference = 0.0;

  friend bool operator==(const AlignmentScore&, const AlignmentScore&) = default;
};

/// Unlinked ID and BOUNDARY symbols of the Old rows, in column order.
struct Encoding {
  Sequence symbols;

  friend bool operator==(const Encoding&, const Encoding&) = default;
};

/// A New pattern aligned against rows of Old patterns from a store. Old rows
/// refer to patterns by index into `PatternStore::patterns()`; the same
/// pattern may occupy several rows.
struct MultipleAlignment {
  Sequence new_row;
  std::vector<std::size_t> old_rows;
  std::vector<Link> links;  // sorted
  AlignmentScore score;

  std::size_t row_count() const { return old_rows.size() + 1; }
};

namespace detail {

/// Every symbol of an alignment laid out in one flat array, with the columns
/// induced by the links and a deterministic topological order of them.
class AlignmentLayout {
 public:
  static constexpr std::int32_t unlinked = -1;

  AlignmentLayout(const MultipleAlignment& ma, const PatternStore& store) {
    const std::size_t rows = ma.row_count();
    offset_.reserve(rows + 1);
    offset_.push_back(0);
    auto add_symbol = [&](const std::string& text, Role role, std::uint32_t row, double bits, bool frame) {
      text_.push_back(&text);
      frame_.push_back(frame);
      role_.push_back(role);
      row_of_.push_back(row);
      sym_.push_back(store.symbol_index(text));
      bits_.push_back(bits);
    };
    const auto& cost = store.cost_model();
    for (const auto& s : ma.new_row) add_symbol(s, Role::content, 0, cost.contains(s) ? cost.cost(s) : 0.0, false);
    offset_.push_back(static_cast<std::uint32_t>(text_.size()));
    for (std::size_t r = 0; r < ma.old_rows.size(); ++r) {
      if (ma.old_rows[r] >= store.size()) throw invalid_argument("alignment row refers to a missing pattern");
      const auto& p = store.pattern(ma.old_rows[r]);
      for (std::size_t i = 0; i < p.symbols.size(); ++i)
        add_symbol(p.symbols[i].text, p.symbols[i].role, static_cast<std::uint32_t>(r + 1),
                   cost.cost(p.symbols[i].text), p.is_frame(i));
      offset_.push_back(static_cast<std::uint32_t>(text_.size()));
    }

    partner_.assign(text_.size(), unlinked);
    for (const auto& l : ma.links) {
      const auto x = flat(l.a), y = flat(l.b);
      if (partner_[x] != unlinked || partner_[y] != unlinked) {
        valid_ = false;
        problem_ = "a symbol takes part in two links";
        continue;
      }
      partner_[x] = static_cast<std::int32_t>(y);
      partner_[y] = static_cast<std::int32_t>(x);
    }
    build_columns();
  }

  std::size_t size() const { return text_.size(); }
  std::size_t rows() const { return offset_.size() - 1; }
  std::uint32_t row_begin(std::size_t r) const { return offset_[r]; }
  std::uint32_t row_end(std::size_t r) const { return offset_[r + 1]; }

  std::uint32_t flat(SymbolRef s) const {
    if (s.row >= rows() || offset_[s.row] + s.index >= offset_[s.row + 1])
      throw invalid_argument("link refers to a missing symbol");
    return offset_[s.row] + s.index;
  }
  SymbolRef ref(std::uint32_t f) const { return SymbolRef{row_of_[f], f - offset_[row_of_[f]]}; }

  const std::string& text(std::uint32_t f) const { return *text_[f]; }
  Role role(std::uint32_t f) const { return role_[f]; }
  bool frame(std::uint32_t f) const { return frame_[f]; }
  std::uint32_t row_of(std::uint32_t f) const { return row_of_[f]; }
  std::uint32_t symbol(std::uint32_t f) const { return sym_[f]; }
  double bits(std::uint32_t f) const { return bits_[f]; }
  std::int32_t partner(std::uint32_t f) const { return partner_[f]; }
  bool linked(std::uint32_t f) const { return partner_[f] != unlinked; }

  std::uint32_t column(std::uint32_t f) const { return column_[f]; }
  std::size_t column_count() const { return column_members_.size(); }
  const std::vector<std::uint32_t>& column_members(std::uint32_t c) const { return column_members_[c]; }

  /// Columns in topological order. When several columns are ready the one
  /// holding a symbol of the lowest-numbered row goes first.
  const std::vector<std::uint32_t>& column_order() const { return order_; }

  /// False if the links cross (no column order exists) or a symbol is
  /// linked twice.
  bool acyclic() const { return valid_; }
  const std::string& problem() const { return problem_; }

  /// reach(c, d): column c precedes or equals column d.
  void compute_reachability() {
    const std::size_t n = column_count();
    words_ = (n + 63) / 64;
    reach_.assign(n * words_, 0);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const std::uint32_t c = *it;
      std::uint64_t* row = &reach_[c * words_];
      row[c / 64] |= std::uint64_t{1} << (c % 64);
      for (std::uint32_t d : succ_[c]) {
        const std::uint64_t* other = &reach_[d * words_];
        for (std::size_t w = 0; w < words_; ++w) row[w] |= other[w];
      }
    }
  }
  bool reaches(std::uint32_t c, std::uint32_t d) const {
    return (reach_[c * words_ + d / 64] >> (d % 64)) & 1U;
  }

 private:
  void build_columns() {
    const std::size_t n = size();
    column_.assign(n, 0);
    for (std::uint32_t f = 0; f < n; ++f) {
      if (partner_[f] != unlinked && static_cast<std::uint32_t>(partner_[f]) < f) {
        column_[f] = column_[static_cast<std::uint32_t>(partner_[f])];
        column_members_[column_[f]].push_back(f);
      } else {
        column_[f] = static_cast<std::uint32_t>(column_members_.size());
        column_members_.push_back({f});
      }
    }
    const std::size_t cols = column_members_.size();
    succ_.assign(cols, {});
    std::vector<std::uint32_t> indegree(cols, 0);
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::uint32_t f = offset_[r]; f + 1 < offset_[r + 1]; ++f) {
        const std::uint32_t c = column_[f], d = column_[f + 1];
        if (c == d) {
          valid_ = false;
          problem_ = "a row is linked to itself";
          continue;
        }
        succ_[c].push_back(d);
        ++indegree[d];
      }
    }
    // Priority: lowest row among the column's members, then flat index.
    auto key = [&](std::uint32_t c) {
      std::uint32_t best = UINT32_MAX;
      for (std::uint32_t f : column_members_[c]) best = std::min(best, f);
      return std::make_pair(row_of_[best], best);
    };
    using Item = std::pair<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
    for (std::uint32_t c = 0; c < cols; ++c)
      if (indegree[c] == 0) ready.push({key(c), c});
    while (!ready.empty()) {
      const std::uint32_t c = ready.top().second;
      ready.pop();
      order_.push_back(c);
      for (std::uint32_t d : succ_[c])
        if (--indegree[d] == 0) ready.push({key(d), d});
    }
    if (order_.size() != cols) {
      valid_ = false;
      problem_ = "links cross: no column order is consistent with every row";
    }
  }

  std::vector<std::uint32_t> offset_;
  std::vector<const std::string*> text_;
  std::vector<Role> role_;
  std::vector<bool> frame_;
  std::vector<std::uint32_t> row_of_;
  std::vector<std::uint32_t> sym_;
  std::vector<double> bits_;
  std::vector<std::int32_t> partner_;
  std::vector<std::uint32_t> column_;
  std::vector<std::vector<std::uint32_t>> column_members_;
  std::vector<std::vector<std::uint32_t>> succ_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint64_t> reach_;
  std::size_t words_ = 0;
  bool valid_ = true;
  std::string problem_;
};

inline Encoding encoding_of(const AlignmentLayout& layout) {
  Encoding code;
  for (std::uint32_t c : layout.column_order()) {
    for (std::uint32_t f : layout.column_members(c)) {
      if (layout.row_of(f) != 0 && !layout.linked(f) && layout.role(f) != Role::content)
        code.symbols.push_back(layout.text(f));
    }
  }
  return code;
}

inline AlignmentScore score_of(const AlignmentLayout& layout, const Encoding& code, const CostModel& cost) {
  AlignmentScore s;
  for (std::uint32_t f = layout.row_begin(0); f < layout.row_end(0); ++f)
    if (layout.linked(f)) s.new_bits += layout.bits(f);
  for (const auto& sym : code.symbols) s.code_bits += cost.cost(sym);
  s.compression_difference = s.new_bits - s.code_bits;
  return s;
}

}  // namespace detail

/// Column order: topological over all row orders, ties to the row listed
/// first. The encoding is every unlinked ID/BOUNDARY symbol of the Old rows
/// in that order.
inline Encoding derive_encoding(const MultipleAlignment& ma, const PatternStore& store) {
  detail::AlignmentLayout layout(ma, store);
  if (!layout.acyclic()) throw invalid_argument("invalid alignment: " + layout.problem());
  return detail::encoding_of(layout);
}

/// B_new = cost of linked New symbols, B_code = cost of the encoding,
/// CD = B_new - B_code.
inline AlignmentScore score_alignment(const MultipleAlignment& ma, const PatternStore& store) {
  detail::AlignmentLayout layout(ma, store);
  if (!layout.acyclic()) throw invalid_argument("invalid alignment: " + layout.problem());
  return detail::score_of(layout, detail::encoding_of(layout), store.cost_model());
}

/// Returns a description of the first broken invariant, or nothing if the
/// alignment is legal:
///  - linked symbols have equal text and belong to different rows;
///  - each symbol takes part in at most one link;
///  - rows holding the same pattern are never linked to each other;
///  - CONTENT symbols are only ever linked to New symbols;
///  - a link between two Old rows joins a frame symbol of one (see
///    `Pattern::is_frame`) to a body symbol of the other, i.e. a reference
///    to the pattern it names;
///  - some column order respects every row's order;
///  - every Old row is connected to the New row through links.
inline std::optional<std::string> check_alignment(const MultipleAlignment& ma, const PatternStore& store) {
  if (!std::is_sorted(ma.links.begin(), ma.links.end())) return "links are not sorted";
  detail::AlignmentLayout layout(ma, store);
  if (!layout.acyclic()) return layout.problem();
  for (const auto& l : ma.links) {
    if (!(l.a < l.b)) return "link is not normalized";
    if (l.a.row == l.b.row) return "link joins a row to itself";
    const auto x = layout.flat(l.a), y = layout.flat(l.b);
    if (layout.text(x) != layout.text(y)) return "link joins different symbols";
    if (l.a.row != 0) {
      if (ma.old_rows[l.a.row - 1] == ma.old_rows[l.b.row - 1]) return "link joins two copies of one pattern";
      if (layout.role(x) == Role::content || layout.role(y) == Role::content)
        return "link joins CONTENT symbols of two Old rows";
      if (layout.frame(x) == layout.frame(y)) return "link between Old rows does not join a reference to a frame";
    }
  }
  std::vector<bool> seen(ma.row_count(), false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto r = stack.back();
    stack.pop_back();
    for (std::uint32_t f = layout.row_begin(r); f < layout.row_end(r); ++f) {
      if (!layout.linked(f)) continue;
      const auto other = layout.row_of(static_cast<std::uint32_t>(layout.partner(f)));
      if (!seen[other]) {
        seen[other] = true;
        stack.push_back(other);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return "alignment is not connected";
  return std::nullopt;
}

/// Relative probabilities 2^CD_i / sum_j 2^CD_j.
inline std::vector<double> alignment_probabilities(std::span<const MultipleAlignment> alignments) {
  if (alignments.empty()) throw invalid_argument("alignment_probabilities: empty list");
  double top = alignments[0].score.compression_difference;
  for (const auto& a : alignments) top = std::max(top, a.score.compression_difference);
  std::vector<double> p;
  p.reserve(alignments.size());
  double total = 0.0;
  for (const auto& a : alignments) {
    p.push_back(std::exp2(a.score.compression_difference - top));
    total += p.back();
  }
  for (auto& x : p) x /= total;
  return p;
}

/// True if every New symbol that occurs in the store is linked.
inline bool is_complete(const MultipleAlignment& ma, const PatternStore& store) {
  std::vector<bool> linked(ma.new_row.size(), false);
  for (const auto& l : ma.links)
    if (l.a.row == 0) linked[l.a.index] = true;
  for (std::size_t i = 0; i < ma.new_row.size(); ++i)
    if (!linked[i] && store.in_alphabet(ma.new_row[i])) return false;
  return true;
}

/// CONTENT symbols of the Old rows that are not linked, in column order.
inline Sequence unmatched_content(const MultipleAlignment& ma, const PatternStore& store) {
  detail::AlignmentLayout layout(ma, store);
  if (!layout.acyclic()) throw invalid_argument("invalid alignment: " + layout.problem());
  Sequence out;
  for (std::uint32_t c : layout.column_order())
    for (std::uint32_t f : layout.column_members(c))
      if (layout.row_of(f) != 0 && !layout.linked(f) && layout.role(f) == Role::content)
        out.push_back(layout.text(f));
  return out;
}

}  // namespace icmup
