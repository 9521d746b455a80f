#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "icmup/alignment/multiple_alignment.hpp"
#include "icmup/pattern_store.hpp"

namespace icmup {

/// Plain-text rendering: one line per row (New first) with every symbol in
/// its column, row numbers at both ends, and a bar under each column whose
/// link spans the gap between two rows.
inline std::string render_alignment(const MultipleAlignment& ma, const PatternStore& store) {
  detail::AlignmentLayout layout(ma, store);
  if (!layout.acyclic()) throw invalid_argument("invalid alignment: " + layout.problem());

  const auto& order = layout.column_order();
  std::vector<std::size_t> start(layout.column_count(), 0);
  std::size_t width = 0;
  for (auto c : order) {
    start[c] = width;
    std::size_t w = 0;
    for (auto f : layout.column_members(c)) w = std::max(w, layout.text(f).size());
    width += w + 1;
  }

  const std::size_t rows = layout.rows();
  const std::size_t label = std::to_string(rows - 1).size();
  auto pad_label = [&](std::size_t r) {
    auto s = std::to_string(r);
    return std::string(label - s.size(), ' ') + s;
  };
  auto trim = [](std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };

  std::string out;
  for (std::size_t r = 0; r < rows; ++r) {
    std::string line(width, ' ');
    for (auto f = layout.row_begin(r); f < layout.row_end(r); ++f)
      line.replace(start[layout.column(f)], layout.text(f).size(), layout.text(f));
    out += pad_label(r) + " " + line + " " + pad_label(r) + "\n";
    if (r + 1 == rows) break;
    std::string bars(width, ' ');
    bool any = false;
    for (auto c : order) {
      const auto& m = layout.column_members(c);
      if (m.size() < 2) continue;
      const auto lo = std::min(layout.row_of(m[0]), layout.row_of(m[1]));
      const auto hi = std::max(layout.row_of(m[0]), layout.row_of(m[1]));
      if (lo <= r && r < hi) {
        bars[start[c]] = '|';
        any = true;
      }
    }
    if (any) out += std::string(label, ' ') + " " + trim(bars) + "\n";
  }
  return out;
}

/// One machine-readable record per alignment.
inline nlohmann::ordered_json alignment_record(const MultipleAlignment& ma, const PatternStore& store,
                                               double probability) {
  nlohmann::ordered_json rec;
  rec["new"] = join_symbols(ma.new_row);
  auto ids = nlohmann::ordered_json::array();
  auto texts = nlohmann::ordered_json::array();
  for (auto r : ma.old_rows) {
    ids.push_back(store.pattern(r).id);
    texts.push_back(store.pattern(r).to_string());
  }
  rec["rows"] = ids;
  rec["patterns"] = texts;
  auto links = nlohmann::ordered_json::array();
  for (const auto& l : ma.links) links.push_back({l.a.row, l.a.index, l.b.row, l.b.index});
  rec["links"] = links;
  rec["B_new"] = ma.score.new_bits;
  rec["B_code"] = ma.score.code_bits;
  rec["CD"] = ma.score.compression_difference;
  rec["probability"] = probability;
  rec["encoding"] = join_symbols(derive_encoding(ma, store).symbols);
  return rec;
}

}  // namespace icmup
