#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "icmup/alignment/multiple_alignment.hpp"
#include "icmup/error.hpp"
#include "icmup/pattern_store.hpp"

namespace icmup {

struct SearchOptions {
  std::size_t beam = 50;
  std::size_t nbest = 5;
  /// Upper bound on stages, and so on Old rows: stage k builds alignments
  /// with k + 1 rows.
  std::size_t max_stages = 12;
  /// Best link sets kept per (partial alignment, Old pattern) pair.
  std::size_t max_extensions = 32;
  /// Node budget of one link-set enumeration.
  std::size_t enumeration_limit = 200000;
  /// Worker threads for candidate extension. Results do not depend on it.
  std::size_t threads = 1;
};

inline void validate(const SearchOptions& opt) {
  if (opt.beam < 1) throw invalid_argument("beam must be at least 1");
  if (opt.nbest < 1) throw invalid_argument("nbest must be at least 1");
  if (opt.max_stages < 1) throw invalid_argument("max_stages must be at least 1");
  if (opt.max_extensions < 1) throw invalid_argument("max_extensions must be at least 1");
  if (opt.threads < 1) throw invalid_argument("threads must be at least 1");
}

namespace detail {

/// Canonical identity of a connected alignment: rows are numbered in the
/// order a breadth-first walk from the New row meets them (visiting each
/// row's symbols left to right), which does not depend on how the rows were
/// listed. Returns the permutation old row -> canonical position as well.
struct CanonicalForm {
  std::vector<std::int64_t> key;
  std::vector<std::uint32_t> order;  // canonical position -> original row
  bool connected = true;
};

inline CanonicalForm canonical_form(const MultipleAlignment& ma) {
  const std::size_t rows = ma.row_count();
  std::vector<std::vector<std::pair<std::uint32_t, SymbolRef>>> by_row(rows);
  for (const auto& l : ma.links) {
    by_row[l.a.row].push_back({l.a.index, l.b});
    by_row[l.b.row].push_back({l.b.index, l.a});
  }
  for (auto& v : by_row) std::sort(v.begin(), v.end());

  CanonicalForm cf;
  std::vector<std::int64_t> label(rows, -1);
  label[0] = 0;
  cf.order.push_back(0);
  for (std::size_t q = 0; q < cf.order.size(); ++q) {
    for (const auto& [_, other] : by_row[cf.order[q]]) {
      if (label[other.row] < 0) {
        label[other.row] = static_cast<std::int64_t>(cf.order.size());
        cf.order.push_back(other.row);
      }
    }
  }
  cf.connected = cf.order.size() == rows;
  for (std::size_t r = 0; r < rows; ++r) {
    if (label[r] < 0) {
      label[r] = static_cast<std::int64_t>(cf.order.size());
      cf.order.push_back(static_cast<std::uint32_t>(r));
    }
  }
  for (std::size_t p = 1; p < cf.order.size(); ++p)
    cf.key.push_back(static_cast<std::int64_t>(ma.old_rows[cf.order[p] - 1]));
  cf.key.push_back(-1);
  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>> links;
  for (const auto& l : ma.links) {
    auto x = std::make_pair(label[l.a.row], static_cast<std::int64_t>(l.a.index));
    auto y = std::make_pair(label[l.b.row], static_cast<std::int64_t>(l.b.index));
    if (y < x) std::swap(x, y);
    links.emplace_back(x.first, x.second, y.first, y.second);
  }
  std::sort(links.begin(), links.end());
  for (const auto& [a, b, c, d] : links) cf.key.insert(cf.key.end(), {a, b, c, d});
  return cf;
}

/// Relists the rows of `ma` in canonical order.
inline MultipleAlignment canonicalize(const MultipleAlignment& ma, const CanonicalForm& cf) {
  std::vector<std::uint32_t> position(cf.order.size());
  for (std::size_t p = 0; p < cf.order.size(); ++p) position[cf.order[p]] = static_cast<std::uint32_t>(p);
  MultipleAlignment out;
  out.new_row = ma.new_row;
  for (std::size_t p = 1; p < cf.order.size(); ++p) out.old_rows.push_back(ma.old_rows[cf.order[p] - 1]);
  for (const auto& l : ma.links)
    out.links.push_back(make_link(SymbolRef{position[l.a.row], l.a.index}, SymbolRef{position[l.b.row], l.b.index}));
  std::sort(out.links.begin(), out.links.end());
  out.score = ma.score;
  return out;
}

struct Candidate {
  MultipleAlignment alignment;
  std::vector<std::int64_t> key;
  bool complete = false;
};

/// Ranking: larger CD, then smaller B_code, fewer rows, lexicographically
/// smaller row list, smaller canonical key.
inline bool ranks_before(const Candidate& x, const Candidate& y) {
  const auto& a = x.alignment;
  const auto& b = y.alignment;
  if (a.score.compression_difference != b.score.compression_difference)
    return a.score.compression_difference > b.score.compression_difference;
  if (a.score.code_bits != b.score.code_bits) return a.score.code_bits < b.score.code_bits;
  if (a.old_rows.size() != b.old_rows.size()) return a.old_rows.size() < b.old_rows.size();
  if (a.old_rows != b.old_rows) return a.old_rows < b.old_rows;
  return x.key < y.key;
}

/// One way of attaching a new row: pairs (symbol index in the pattern, flat
/// index of the existing symbol it unifies with).
struct Attachment {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> links;
  double gain = 0.0;
};

/// Enumerates the legal ways to add `pattern` as a new row to the alignment
/// described by `layout`, keeping the `keep` best by CD gain.
///
/// A pattern symbol may unify with an unlinked symbol of equal text that is
/// either in the New row, or an ID/BOUNDARY symbol of an Old row holding a
/// different pattern. In the second case the pattern symbol must not be
/// CONTENT either, and exactly one of the two must be a frame symbol. The
/// chosen targets must not precede one another out of the
/// pattern's order, which keeps the alignment acyclic.
class AttachmentEnumerator {
 public:
  AttachmentEnumerator(const AlignmentLayout& layout, const MultipleAlignment& ma, const PatternStore& store,
                       std::size_t pattern, const SearchOptions& opt)
      : layout_(layout), keep_(opt.max_extensions), budget_(opt.enumeration_limit) {
    const auto& p = store.pattern(pattern);
    const auto& cost = store.cost_model();
    const std::size_t n = p.symbols.size();
    targets_.resize(n);
    best_gain_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& sym = p.symbols[i];
      const bool structural = sym.role != Role::content;
      const double own = structural ? cost.cost(sym.text) : 0.0;
      base_ -= own;
      const bool frame = p.is_frame(i);
      const std::uint32_t id = store.symbol_index(sym.text);
      for (std::uint32_t f = 0; f < layout.size(); ++f) {
        if (layout.linked(f) || layout.symbol(f) != id) continue;
        const auto row = layout.row_of(f);
        if (row != 0) {
          if (!structural || layout.role(f) == Role::content || layout.frame(f) == frame) continue;
          if (ma.old_rows[row - 1] == pattern) continue;
        }
        targets_[i].push_back({f, layout.bits(f) + own});
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      double m = 0.0;
      for (const auto& t : targets_[i]) m = std::max(m, t.second);
      best_gain_[i] = best_gain_[i + 1] + m;
    }
  }

  std::vector<Attachment> run() {
    dfs(0, base_);
    std::sort(kept_.begin(), kept_.end(), [](const Attachment& a, const Attachment& b) {
      if (a.gain != b.gain) return a.gain > b.gain;
      return a.links < b.links;
    });
    return std::move(kept_);
  }

 private:
  void dfs(std::size_t i, double gain) {
    if (budget_ == 0) return;
    --budget_;
    if (kept_.size() >= keep_ && gain + best_gain_[i] < worst_kept()) return;
    if (i == targets_.size()) {
      if (!chosen_.empty()) offer(gain);
      return;
    }
    for (const auto& [f, g] : targets_[i]) {
      if (!compatible(f)) continue;
      chosen_.push_back({static_cast<std::uint32_t>(i), f});
      dfs(i + 1, gain + g);
      chosen_.pop_back();
    }
    dfs(i + 1, gain);
  }

  bool compatible(std::uint32_t f) const {
    const auto col = layout_.column(f);
    for (const auto& [_, g] : chosen_) {
      const auto other = layout_.column(g);
      if (other == col || layout_.reaches(col, other)) return false;
    }
    return true;
  }

  double worst_kept() const {
    double w = kept_.front().gain;
    for (const auto& k : kept_) w = std::min(w, k.gain);
    return w;
  }

  void offer(double gain) {
    Attachment a{chosen_, gain};
    if (kept_.size() < keep_) {
      kept_.push_back(std::move(a));
      return;
    }
    auto worst = kept_.begin();
    for (auto it = kept_.begin(); it != kept_.end(); ++it) {
      if (it->gain < worst->gain || (it->gain == worst->gain && it->links > worst->links)) worst = it;
    }
    if (a.gain > worst->gain || (a.gain == worst->gain && a.links < worst->links)) *worst = std::move(a);
  }

  const AlignmentLayout& layout_;
  std::size_t keep_;
  std::size_t budget_;
  double base_ = 0.0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> targets_;
  std::vector<double> best_gain_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen_;
  std::vector<Attachment> kept_;
};

inline Candidate make_candidate(MultipleAlignment ma, const PatternStore& store) {
  std::sort(ma.links.begin(), ma.links.end());
  auto cf = canonical_form(ma);
  Candidate c;
  c.alignment = canonicalize(ma, cf);
  c.alignment.score = score_alignment(c.alignment, store);
  c.key = std::move(cf.key);
  c.complete = is_complete(c.alignment, store);
  return c;
}

inline std::vector<Candidate> extend(const MultipleAlignment& ma, const PatternStore& store,
                                     const SearchOptions& opt) {
  AlignmentLayout layout(ma, store);
  layout.compute_reachability();
  std::vector<Candidate> out;
  const auto new_row = static_cast<std::uint32_t>(ma.row_count());
  for (std::size_t p = 0; p < store.size(); ++p) {
    AttachmentEnumerator enumerator(layout, ma, store, p, opt);
    for (const auto& att : enumerator.run()) {
      MultipleAlignment next = ma;
      next.old_rows.push_back(p);
      for (const auto& [i, f] : att.links) next.links.push_back(make_link(SymbolRef{new_row, i}, layout.ref(f)));
      out.push_back(make_candidate(std::move(next), store));
    }
  }
  return out;
}

}  // namespace detail

/// Builds multiple alignments of `new_pattern` against the store by staged
/// beam search.
///
/// Stage 0 aligns the New pattern against every Old pattern. Each later
/// stage adds one Old row to every surviving alignment, unifying symbols of
/// the new row with still-unlinked New symbols and ID/BOUNDARY symbols of the
/// rows already present. After each stage the `beam` best alignments (by CD)
/// survive. The search stops after `max_stages` stages or when a stage adds
/// nothing new.
///
/// An alignment is complete when every New symbol that occurs in the store is
/// linked. The result holds up to `nbest` distinct complete alignments,
/// best first; if no complete alignment was reached, the best partial ones
/// are returned instead. The result is empty only if no New symbol occurs in
/// the store.
inline std::vector<MultipleAlignment> build_alignments(std::span<const std::string> new_pattern,
                                                       const PatternStore& store, const SearchOptions& opt) {
  validate(opt);
  if (new_pattern.empty()) throw invalid_argument("build_alignments: New pattern is empty");
  if (store.empty()) throw invalid_argument("build_alignments: store is empty");

  MultipleAlignment root;
  root.new_row.assign(new_pattern.begin(), new_pattern.end());
  std::vector<MultipleAlignment> frontier{root};

  std::vector<detail::Candidate> complete, partial;
  auto keep_best = [&](std::vector<detail::Candidate>& pool, std::vector<detail::Candidate> more) {
    pool.insert(pool.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    std::sort(pool.begin(), pool.end(), detail::ranks_before);
    if (pool.size() > opt.nbest) pool.resize(opt.nbest);
  };

  for (std::size_t stage = 0; stage < opt.max_stages && !frontier.empty(); ++stage) {
    std::vector<std::vector<detail::Candidate>> produced(frontier.size());
    const std::size_t workers = std::min(opt.threads, frontier.size());
    if (workers <= 1) {
      for (std::size_t i = 0; i < frontier.size(); ++i) produced[i] = detail::extend(frontier[i], store, opt);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < frontier.size(); i += workers)
            produced[i] = detail::extend(frontier[i], store, opt);
        });
      }
      for (auto& t : pool) t.join();
    }

    std::vector<detail::Candidate> generated;
    std::set<std::vector<std::int64_t>> seen;
    for (auto& batch : produced)
      for (auto& c : batch)
        if (seen.insert(c.key).second) generated.push_back(std::move(c));
    if (generated.empty()) break;
    std::sort(generated.begin(), generated.end(), detail::ranks_before);

    std::vector<detail::Candidate> done, open;
    for (const auto& c : generated) (c.complete ? done : open).push_back(c);
    keep_best(complete, std::move(done));
    keep_best(partial, std::move(open));

    frontier.clear();
    for (std::size_t i = 0; i < generated.size() && i < opt.beam; ++i)
      frontier.push_back(std::move(generated[i].alignment));
  }

  const auto& chosen = complete.empty() ? partial : complete;
  std::vector<MultipleAlignment> out;
  for (const auto& c : chosen) out.push_back(c.alignment);
  return out;
}

}  // namespace icmup
