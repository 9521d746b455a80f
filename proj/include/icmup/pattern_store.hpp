#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "icmup/error.hpp"
#include "icmup/symbol.hpp"

namespace icmup {

enum class CostMode {
  uniform,
  frequency,
};

inline std::string_view to_string(CostMode mode) {
  return mode == CostMode::uniform ? "uniform" : "frequency";
}

inline CostMode parse_cost_mode(std::string_view text) {
  if (text == "uniform") return CostMode::uniform;
  if (text == "frequency") return CostMode::frequency;
  throw invalid_argument("unknown cost mode '" + std::string(text) + "' (expected uniform|frequency)");
}

inline double uniform_symbol_cost(std::size_t alphabet_size) {
  return std::log2(static_cast<double>(std::max<std::size_t>(2, alphabet_size)));
}

/// Bit cost of every symbol of an alphabet.
///
/// Symbols outside the alphabet (freshly minted codes, separators) are priced
/// at `fresh_symbol_cost()`, the uniform cost of the alphabet under the same
/// scale, so that code symbols are never cheaper than a flat code would make
/// them.
class CostModel {
 public:
  using Table = std::map<std::string, double, std::less<>>;

  CostModel() = default;
  CostModel(CostMode mode, Table table, double fresh_cost)
      : mode_(mode), table_(std::move(table)), fresh_cost_(fresh_cost) {}

  template <typename Range>
  static CostModel uniform_over(const Range& alphabet) {
    Table table;
    for (const auto& s : alphabet) table.emplace(std::string(s), 0.0);
    const double c = uniform_symbol_cost(table.size());
    for (auto& [_, cost] : table) cost = c;
    return CostModel(CostMode::uniform, std::move(table), c);
  }

  /// -log2 of each symbol's share of `weights`.
  static CostModel frequency_over(const std::map<std::string, double, std::less<>>& weights) {
    double total = 0.0;
    for (const auto& [_, w] : weights) total += w;
    Table table;
    for (const auto& [text, w] : weights) table.emplace(text, -std::log2(w / total));
    return CostModel(CostMode::frequency, std::move(table), uniform_symbol_cost(weights.size()));
  }

  /// Model of `mode` fitted to the symbols of one sequence.
  template <typename Range>
  static CostModel fit(CostMode mode, const Range& symbols) {
    std::map<std::string, double, std::less<>> weights;
    for (const auto& s : symbols) weights[std::string(s)] += 1.0;
    if (mode == CostMode::frequency) return frequency_over(weights);
    std::vector<std::string> alphabet;
    for (const auto& [text, _] : weights) alphabet.push_back(text);
    return uniform_over(alphabet);
  }

  CostMode mode() const noexcept { return mode_; }
  const Table& table() const noexcept { return table_; }
  std::size_t alphabet_size() const noexcept { return table_.size(); }
  double fresh_symbol_cost() const noexcept { return fresh_cost_; }

  bool contains(std::string_view symbol) const { return table_.find(symbol) != table_.end(); }

  double cost(std::string_view symbol) const {
    auto it = table_.find(symbol);
    if (it == table_.end())
      throw invalid_argument("unknown symbol '" + std::string(symbol) + "'");
    return it->second;
  }

  double cost_or_fresh(std::string_view symbol) const {
    auto it = table_.find(symbol);
    return it == table_.end() ? fresh_cost_ : it->second;
  }

  template <typename Range>
  double sequence_cost(const Range& symbols) const {
    double total = 0.0;
    for (const auto& s : symbols) total += cost(s);
    return total;
  }

  /// Same model with every cost multiplied by `factor` (> 0).
  CostModel scaled(double factor) const {
    if (!(factor > 0.0)) throw invalid_argument("cost scale factor must be positive");
    Table table = table_;
    for (auto& [_, cost] : table) cost *= factor;
    return CostModel(mode_, std::move(table), fresh_cost_ * factor);
  }

 private:
  CostMode mode_ = CostMode::uniform;
  Table table_;
  double fresh_cost_ = 1.0;
};

struct Pattern {
  std::string id;
  std::vector<Symbol> symbols;
  std::uint64_t frequency = 1;
  bool grammar = false;  // follows the class-marker convention

  /// Frame symbols name the pattern: class, discriminator and closing
  /// boundary of a grammar pattern, or the leading code of any other pattern
  /// of two or more symbols. The rest is the body.
  bool is_frame(std::size_t i) const {
    if (grammar) return i < 2 || i + 1 == symbols.size();
    return i == 0 && symbols.size() >= 2;
  }

  Sequence texts() const {
    Sequence out;
    out.reserve(symbols.size());
    for (const auto& s : symbols) out.push_back(s.text);
    return out;
  }

  std::string to_string() const { return join_symbols(texts()); }
};

/// `<Class> <Discriminator> <contents...> #<Class>`
inline bool follows_class_marker_convention(const Sequence& symbols) {
  return symbols.size() >= 3 && !symbols.front().empty() &&
         symbols.front().front() != boundary_sigil &&
         symbols.back() == std::string(1, boundary_sigil) + symbols.front();
}

/// Input to `build_store`: one pattern's symbols and its frequency.
struct PatternSpec {
  Sequence symbols;
  std::uint64_t frequency = 1;
};

class PatternStore {
 public:
  static constexpr std::uint32_t no_symbol = UINT32_MAX;

  const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
  const Pattern& pattern(std::size_t i) const { return patterns_.at(i); }
  std::size_t size() const noexcept { return patterns_.size(); }
  bool empty() const noexcept { return patterns_.empty(); }

  /// Sorted, distinct symbol texts of every pattern.
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  const CostModel& cost_model() const noexcept { return cost_; }
  CostMode mode() const noexcept { return cost_.mode(); }

  /// Class names are the first symbols of the patterns that follow the
  /// class-marker convention.
  const std::set<std::string, std::less<>>& class_names() const noexcept { return classes_; }

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < patterns_.size(); ++i)
      if (patterns_[i].id == id) return i;
    return std::nullopt;
  }

  bool in_alphabet(std::string_view text) const {
    return std::binary_search(alphabet_.begin(), alphabet_.end(), text, std::less<>{});
  }

  /// Dense index of a symbol text in `alphabet()`, or `no_symbol`.
  std::uint32_t symbol_index(std::string_view text) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), text, std::less<>{});
    if (it == alphabet_.end() || *it != text) return no_symbol;
    return static_cast<std::uint32_t>(it - alphabet_.begin());
  }

  /// Copy of this store priced by a different model. The model must cover
  /// the whole alphabet.
  PatternStore with_cost_model(CostModel cost) const {
    for (const auto& s : alphabet_)
      if (!cost.contains(s)) throw invalid_argument("cost model does not price symbol '" + s + "'");
    PatternStore copy = *this;
    copy.cost_ = std::move(cost);
    return copy;
  }

 private:
  friend PatternStore build_store(std::vector<PatternSpec> specs, CostMode mode);

  std::vector<Pattern> patterns_;
  std::vector<std::string> alphabet_;
  std::set<std::string, std::less<>> classes_;
  CostModel cost_;
};

namespace detail {

inline Role body_role(std::string_view text, const std::set<std::string, std::less<>>& classes) {
  if (classes.count(text) != 0) return Role::id;
  if (text.size() > 1 && text.front() == boundary_sigil && classes.count(text.substr(1)) != 0)
    return Role::boundary;
  return Role::content;
}

inline std::string pattern_id(const Sequence& symbols) {
  if (follows_class_marker_convention(symbols)) return symbols[0] + " " + symbols[1];
  return join_symbols(symbols);
}

}  // namespace detail

/// Builds a store from raw patterns, deriving symbol roles, the alphabet and
/// the cost table.
///
/// Roles: in a pattern that follows the class-marker convention the first two
/// symbols are ID symbols and the last is a BOUNDARY. In any other pattern of
/// two or more symbols the first symbol is an ID (a code, as in
/// `TFEU Treaty on ...`). Every remaining symbol is an ID when its text is a
/// class name, a BOUNDARY when it is `#` + a class name, and CONTENT otherwise.
///
/// Pattern ids are `<Class> <Discriminator>` for grammar patterns and the
/// full pattern text otherwise.
inline PatternStore build_store(std::vector<PatternSpec> specs, CostMode mode) {
  PatternStore store;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].symbols.empty())
      throw invalid_argument("pattern " + std::to_string(i) + " is empty");
    if (specs[i].frequency < 1)
      throw invalid_argument("pattern " + std::to_string(i) + " has frequency 0");
    for (const auto& s : specs[i].symbols)
      if (!is_valid_symbol_text(s))
        throw invalid_argument("pattern " + std::to_string(i) + " has an invalid symbol '" + s + "'");
    if (follows_class_marker_convention(specs[i].symbols))
      store.classes_.insert(specs[i].symbols.front());
  }

  std::set<std::string, std::less<>> ids;
  std::map<std::string, double, std::less<>> weight;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& seq = specs[i].symbols;
    Pattern p;
    p.id = detail::pattern_id(seq);
    if (!ids.insert(p.id).second)
      throw invalid_argument("duplicate pattern id '" + p.id + "' (pattern " + std::to_string(i) + ")");
    p.frequency = specs[i].frequency;
    const bool grammar = follows_class_marker_convention(seq);
    p.grammar = grammar;
    p.symbols.reserve(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) {
      Role role = detail::body_role(seq[k], store.classes_);
      if (grammar && k < 2) role = Role::id;
      else if (grammar && k + 1 == seq.size()) role = Role::boundary;
      else if (!grammar && k == 0 && seq.size() >= 2) role = Role::id;
      p.symbols.push_back(Symbol{seq[k], role});
      weight[seq[k]] += static_cast<double>(p.frequency);
    }
    store.patterns_.push_back(std::move(p));
  }

  for (const auto& [text, _] : weight) store.alphabet_.push_back(text);

  if (mode == CostMode::uniform) {
    store.cost_ = CostModel::uniform_over(store.alphabet_);
  } else {
    store.cost_ = CostModel::frequency_over(weight);
  }
  return store;
}

/// Cost in bits of `seq` under the store's model.
template <typename Range>
double sequence_cost(const PatternStore& store, const Range& seq) {
  return store.cost_model().sequence_cost(seq);
}

// ---------------------------------------------------------------------------
// Pattern files
//
//   % comment
//   NP 2 A #A N #N #NP
//   12<TAB>N 7 flies #N
// ---------------------------------------------------------------------------

inline std::vector<PatternSpec> parse_patterns(std::istream& in, std::size_t line_offset = 0) {
  std::vector<PatternSpec> specs;
  std::string line;
  std::size_t lineno = line_offset;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '%') continue;
    std::string_view body = line;
    PatternSpec spec;
    bool has_frequency = false;
    if (auto tab = body.find('\t'); tab != std::string_view::npos) {
      auto head = split_symbols(body.substr(0, tab));
      if (head.size() == 1 &&
          std::all_of(head[0].begin(), head[0].end(), [](unsigned char c) { return std::isdigit(c); })) {
        spec.frequency = parse_count(head[0], lineno);
        if (spec.frequency == 0) throw ParseError(lineno, "frequency must be at least 1");
        body = body.substr(tab + 1);
        has_frequency = true;
      }
    }
    spec.symbols = split_symbols(body);
    if (spec.symbols.empty()) {
      if (!has_frequency) continue;
      throw ParseError(lineno, "pattern has no symbols");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<PatternSpec> load_patterns(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return parse_patterns(in);
}

inline PatternStore load_store(const std::filesystem::path& path, CostMode mode) {
  auto specs = load_patterns(path);
  if (specs.empty()) throw Error(ErrorKind::parse, "'" + path.string() + "' contains no patterns");
  return build_store(std::move(specs), mode);
}

/// `@store <mode> <alphabet size>` followed by one `frequency<TAB>symbols`
/// line per pattern.
inline std::string serialize_store(const PatternStore& store) {
  std::string out = "@store " + std::string(to_string(store.mode())) + " " +
                    std::to_string(store.alphabet().size()) + "\n";
  for (const auto& p : store.patterns())
    out += std::to_string(p.frequency) + "\t" + p.to_string() + "\n";
  return out;
}

inline PatternStore parse_store(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "missing @store header");
  auto fields = split_symbols(header);
  if (fields.size() != 3 || fields[0] != "@store") throw ParseError(1, "malformed @store header");
  CostMode mode;
  try {
    mode = parse_cost_mode(fields[1]);
  } catch (const Error& e) {
    throw ParseError(1, e.what());
  }
  const std::size_t alphabet_size = parse_count(fields[2], 1);
  auto store = build_store(parse_patterns(in, 1), mode);
  if (store.alphabet().size() != alphabet_size)
    throw ParseError(1, "header declares " + std::to_string(alphabet_size) +
                            " symbols but the patterns use " +
                            std::to_string(store.alphabet().size()));
  return store;
}

}  // namespace icmup
