// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "icmup/cli.hpp"
#include "icmup/icmup.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace icmup;

namespace {

const fs::path data_dir = ICMUP_DATA_DIR;
const fs::path cli_path = ICMUP_CLI_PATH;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void report(int n, const std::string& name, const Verdict& v) {
  std::cout << (v.ok ? "PASS" : "FAIL") << "  criterion " << n << "  " << name << ": " << v.detail << std::endl;
  if (!v.ok) ++failures;
}

std::multiset<std::string> row_set(const std::vector<std::string>& rows) { return {rows.begin(), rows.end()}; }

// 1 ----------------------------------------------------------------------------

Verdict fruit_flies_parses() {
  Verdict v;
  const std::multiset<std::string> parse_a{"A 12 fruit #A", "NP 2 A #A N #N #NP", "N 7 flies #N",
                                           "N 5 banana #N", "NP 3 D #D N #N #NP", "V 9 like #V",
                                           "S 1 NP #NP V #V NP #NP #S", "D 11 a #D"};
  const std::multiset<std::string> parse_b{"D 11 a #D", "NP 3 D #D N #N #NP", "N 5 banana #N",
                                           "N 6 fruit #N", "S 0 N #N V #V ADP #ADP #S", "V 8 flies #V",
                                           "ADV 15 like #ADV", "ADP 4 ADV #ADV NP #NP #ADP"};
  cli::RunConfig c;
  c.command = "align";
  c.grammar = data_dir / "fruit_flies.sp";
  c.new_text = "fruit flies like a banana";
  c.search.beam = 200;
  c.search.nbest = 2;
  c.format = ReportFormat::structured;
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run(c, out, err);
  const double t = seconds_since(t0);
  if (code != 0) {
    v.fail("align exited " + std::to_string(code) + ": " + err.str());
    return v;
  }
  std::vector<std::multiset<std::string>> got;
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);)
    got.push_back(row_set(nlohmann::json::parse(line).at("patterns").get<std::vector<std::string>>()));
  const bool match = got.size() == 2 && ((got[0] == parse_a && got[1] == parse_b) ||
                                         (got[0] == parse_b && got[1] == parse_a));
  if (!match) v.fail("top-2 row sets differ from the two parses");
  if (!(t < 10.0)) v.fail("took " + std::to_string(t) + " s");
  if (v.ok) v.detail = "both parses are the top 2 at beam 200 in " + std::to_string(t) + " s";
  return v;
}

// 2 ----------------------------------------------------------------------------

Verdict pairwise_oracle() {
  Verdict v;
  gen::Rng rng(2024);
  std::size_t n = 0;
  for (; n < 1000 && v.ok; ++n) {
    const std::size_t alphabet = rng.between(1, 5);
    const auto a = gen::random_sequence(rng, rng.between(0, 8), alphabet);
    const auto b = gen::random_sequence(rng, rng.between(0, 8), alphabet);
    Sequence both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto mode = n % 2 ? CostMode::frequency : CostMode::uniform;
    const auto cost = CostModel::fit(mode, both.empty() ? Sequence{"a"} : both);
    const auto got = align_pairwise(a, b, cost);
    const double want = oracle::pairwise_bits(a, b, cost);
    if (!is_valid_pairwise(got, a, b)) v.fail("invalid matching on pair " + std::to_string(n));
    else if (got.matched_bits != want)
      v.fail("pair " + std::to_string(n) + ": " + format_bits(got.matched_bits) + " vs " + format_bits(want));
  }
  if (v.ok) v.detail = std::to_string(n) + " random pairs equal the exhaustive optimum exactly";
  return v;
}

// 3 ----------------------------------------------------------------------------

Verdict alignment_oracle() {
  Verdict v;
  gen::Rng rng(7);
  constexpr std::size_t rows = 4;
  SearchOptions opt;
  opt.beam = 50;
  opt.nbest = 1;
  opt.max_stages = rows;
  std::size_t n = 0, with_result = 0;
  for (; n < 200 && v.ok; ++n) {
    const auto t = gen::toy_instance(rng);
    const auto mode = n % 2 ? CostMode::frequency : CostMode::uniform;
    const auto store = gen::toy_store(t, mode);
    const auto want = oracle::best_alignment(t.new_row, t.patterns, store.cost_model(), rows);
    const auto got = build_alignments(t.new_row, store, opt);
    if (got.empty() != !want.any) {
      v.fail("instance " + std::to_string(n) + ": result presence differs");
      break;
    }
    if (got.empty()) continue;
    ++with_result;
    const bool complete = is_complete(got.front(), store);
    if (complete != want.complete || std::abs(got.front().score.compression_difference - want.cd) > 1e-9)
      v.fail("instance " + std::to_string(n) + ": CD " + format_bits(got.front().score.compression_difference) +
             " vs " + format_bits(want.cd));
  }
  if (v.ok)
    v.detail = std::to_string(n) + " toy instances (" + std::to_string(with_result) +
               " alignable) equal the exhaustive best CD at beam 50";
  return v;
}

// 4 ----------------------------------------------------------------------------

Verdict codecs_lossless() {
  Verdict v;
  gen::Rng rng(99);
  constexpr std::size_t trials = 1000;
  for (std::size_t i = 0; i < trials && v.ok; ++i) {
    const auto seq = gen::structured_sequence(rng, 40, rng.between(1, 5));
    const auto cost = CostModel::fit(i % 2 ? CostMode::frequency : CostMode::uniform, seq);
    const auto enc = chunk_encode(seq, ChunkOptions{}, cost);
    if (chunk_decode(enc.payload) != seq) v.fail("chunk round trip failed on input " + std::to_string(i));
    if (enc.encoded_bits > enc.original_bits) v.fail("chunk expanded input " + std::to_string(i));
    const auto back = parse_encoded_stream(serialize(enc));
    if (chunk_decode(std::get<Encoded<ChunkPayload>>(back).payload) != seq)
      v.fail("chunk stream text round trip failed on input " + std::to_string(i));
  }
  for (std::size_t i = 0; i < trials && v.ok; ++i) {
    auto [schema, choices] = gen::schema_instance(rng);
    const auto seq = spc_decode(schema, choices);
    const auto enc = spc_encode(seq, schema, CostModel::fit(CostMode::uniform, seq));
    if (spc_decode(schema, enc.payload.choices) != seq || enc.payload.choices != choices)
      v.fail("schema round trip failed on input " + std::to_string(i));
  }
  for (std::size_t i = 0; i < trials && v.ok; ++i) {
    const auto seq = gen::structured_sequence(rng, 40, rng.between(1, 5));
    const auto enc = rle_encode(seq, rng.between(1, 4));
    if (rle_decode(enc.payload) != seq) v.fail("run-length round trip failed on input " + std::to_string(i));
  }
  if (v.ok) v.detail = "1000 random inputs per codec decode to the original; chunking never expanded";
  return v;
}

// 5 ----------------------------------------------------------------------------

Verdict decompression_by_compression() {
  Verdict v;
  SearchOptions opt;
  const auto tfeu = load_store(data_dir / "tfeu.sp", CostMode::uniform);
  const auto r = decode_encoding(Sequence{"TFEU"}, tfeu, opt);
  if (join_symbols(r.symbols) != "Treaty on the Functioning of the European Union")
    v.fail("TFEU decoded to '" + join_symbols(r.symbols) + "'");

  const auto store = load_store(data_dir / "sentences.sp", CostMode::uniform);
  const std::vector<std::string> det{"the", "a"}, noun{"cat", "dog", "bird"}, verb{"saw", "chased"};
  gen::Rng rng(5);
  std::set<Sequence> sentences;
  while (sentences.size() < 24)
    sentences.insert({rng.pick(det), rng.pick(noun), rng.pick(verb), rng.pick(det), rng.pick(noun)});
  std::size_t ok = 0;
  for (const auto& s : sentences) {
    const auto parse = encode_sentence(s, store, opt);
    try {
      if (decode_encoding(parse.encoding.symbols, store, opt).symbols == s) ++ok;
    } catch (const Error&) {
    }
  }
  if (ok != sentences.size())
    v.fail(std::to_string(ok) + " of " + std::to_string(sentences.size()) + " sentences round-tripped");
  if (v.ok)
    v.detail = "TFEU decodes to its expansion; " + std::to_string(ok) + "/" + std::to_string(sentences.size()) +
               " generated sentences round-trip";
  return v;
}

// 6 ----------------------------------------------------------------------------

Verdict probabilities() {
  Verdict v;
  std::vector<MultipleAlignment> two(2);
  two[0].score.compression_difference = 3;
  two[1].score.compression_difference = 1;
  const auto p = alignment_probabilities(two);
  if (p[0] != 0.8 || p[1] != 0.2) v.fail("CDs {3,1} gave {" + format_bits(p[0]) + "," + format_bits(p[1]) + "}");

  std::size_t sets = 0;
  auto check = [&](const std::vector<MultipleAlignment>& as) {
    if (as.empty()) return;
    ++sets;
    const auto q = alignment_probabilities(as);
    double sum = 0.0;
    for (double x : q) sum += x;
    if (std::abs(sum - 1.0) > 1e-9) v.fail("probabilities sum to " + format_bits(sum));
    for (std::size_t i = 0; i < as.size(); ++i)
      for (std::size_t j = 0; j < as.size(); ++j) {
        const double ci = as[i].score.compression_difference, cj = as[j].score.compression_difference;
        if ((ci > cj) != (q[i] > q[j]) || (ci == cj) != (q[i] == q[j])) v.fail("probability order differs from CD");
      }
  };
  SearchOptions opt;
  opt.nbest = 6;
  const auto flies = load_store(data_dir / "fruit_flies.sp", CostMode::uniform);
  check(build_alignments(split_symbols("fruit flies like a banana"), flies, opt));
  check(build_alignments(split_symbols("a banana"), flies, opt));
  gen::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto t = gen::toy_instance(rng);
    check(build_alignments(t.new_row, gen::toy_store(t, CostMode::frequency), opt));
  }
  if (v.ok) v.detail = "{3,1} -> {0.8,0.2}; " + std::to_string(sets) + " n-best sets sum to 1 and follow CD order";
  return v;
}

// 7 and 9 ----------------------------------------------------------------------

double independent_saving(const Corpus& c, const SegmentationResult& r) {
  auto bits = [](const Sequence& s) {
    std::map<std::string, double> n;
    for (const auto& x : s) n[x] += 1;
    const double total = static_cast<double>(s.size());
    double b = total * std::log2(total);
    for (const auto& [_, k] : n) b -= k * std::log2(k);
    return b;
  };
  std::set<std::string> base(c.stream.begin(), c.stream.end());
  double lex = 0.0;
  for (std::size_t i = 0; i < r.lexicon.size(); ++i) lex += 4.0 * std::log2(static_cast<double>(base.size() + i + 1));
  return bits(c.stream) - bits(r.stream) - lex;
}

std::vector<std::pair<double, double>> accounting;  // (reported, recomputed) per benchmark run

Verdict segmentation_benchmark() {
  Verdict v;
  // Calibration at the miniature scale: greedy adoption reaches the
  // exhaustive optimum. At five copies that optimum is a single `heca` chunk
  // (the t|t seam between copies does not pay for itself), so the cuts are
  // the edges of its occurrences.
  std::vector<int> mini;
  const std::string cat = "thecat";
  for (int k = 0; k < 5; ++k)
    for (char ch : cat) mini.push_back(ch);
  const double best = oracle::best_segmentation_saving(mini, 5);
  const auto mini_corpus = ingest_text("thecat thecat thecat thecat thecat");
  const auto mini_run = discover_chunks(mini_corpus);
  accounting.emplace_back(mini_run.total_saving, independent_saving(mini_corpus, mini_run));
  if (std::abs(mini_run.total_saving - best) > 1e-9)
    v.fail("5-copy miniature saving " + format_bits(mini_run.total_saving) + " vs optimum " + format_bits(best));
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t cut : {6 * k + 1, 6 * k + 5})
      if (!mini_run.boundaries.count(cut)) v.fail("5-copy miniature misses cut " + std::to_string(cut));

  std::string worst;
  double worst_f1 = 2.0, total_time = 0.0;
  std::size_t worst_words = 99;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    gen::Rng rng(seed);
    const auto wc = gen::word_corpus(rng, 10, 500);
    const auto corpus = ingest_text(wc.joined());
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = discover_chunks(corpus);
    total_time += seconds_since(t0);
    accounting.emplace_back(r.total_saving, independent_saving(corpus, r));
    const auto s = score_segmentation(r, gold_boundaries(wc.spaced(), corpus));
    std::set<std::string> found;
    for (const auto& e : r.lexicon) found.insert(join_symbols(e.expansion, ""));
    std::size_t words = 0;
    for (const auto& w : wc.lexicon) words += found.count(w);
    worst_words = std::min(worst_words, words);
    worst_f1 = std::min(worst_f1, s.f1);
    if (words < 8) v.fail("seed " + std::to_string(seed) + " recovered " + std::to_string(words) + "/10 words");
    if (s.f1 < 0.75) v.fail("seed " + std::to_string(seed) + " boundary F1 " + format_bits(s.f1));
  }
  if (!(total_time < 30.0)) v.fail("took " + std::to_string(total_time) + " s");
  if (v.ok) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "5 corpora of 500 tokens: >= %zu/10 words, F1 >= %.4f, %.3f s; 5-copy miniature at the optimum",
                  worst_words, worst_f1, total_time);
    v.detail = buf;
  }
  return v;
}

Verdict gain_accounting() {
  Verdict v;
  double worst = 0.0;
  for (const auto& [reported, recomputed] : accounting) {
    worst = std::max(worst, std::abs(reported - recomputed));
    if (std::abs(reported - recomputed) > 1e-6)
      v.fail("saving " + format_bits(reported) + " vs recomputed " + format_bits(recomputed));
  }
  if (accounting.empty()) v.fail("no benchmark runs recorded");
  if (v.ok)
    v.detail = std::to_string(accounting.size()) + " runs; largest discrepancy " + format_bits(worst) + " bits";
  return v;
}

// 8 ----------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Verdict determinism() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "icmup_acceptance";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "corpus.txt") << "thecatsatonthematthecatatethedogthedogsatonthecat\n";
    std::ofstream(dir / "gold.txt") << "the cat sat on the mat the cat ate the dog the dog sat on the cat\n";
  }
  const std::string d = data_dir.string(), t = dir.string();
  std::ofstream(dir / "menu.txt") << "Appetiser prawn-cocktail sorbet salmon cheesecake coffee-and-mints\n";
  // Each command with the side files it writes.
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"compress --codec chunk " + d + "/tfeu_document.txt -o " + t + "/chunk.enc", {"chunk.enc"}},
      {"decompress " + t + "/chunk.enc", {}},
      {"compress --codec rle " + d + "/twelve_ones.txt --format json", {}},
      {"compress --codec spc --schema " + d + "/menu.schema " + t + "/menu.txt -o " + t + "/menu.enc", {"menu.enc"}},
      {"decompress --schema " + d + "/menu.schema " + t + "/menu.enc", {}},
      {"align --grammar " + d + "/fruit_flies.sp --new \"fruit flies like a banana\" --nbest 3", {}},
      {"align --grammar " + d + "/fruit_flies.sp --new \"fruit flies like a banana\" --nbest 3 --format json", {}},
      {"encode --grammar " + d + "/sentences.sp --new \"the cat saw a dog\"", {}},
      {"decode --grammar " + d + "/sentences.sp --code \"S 0 1 2 4 7 1 3 5 #S\"", {}},
      {"decode --grammar " + d + "/tfeu.sp --code TFEU", {}},
      {"segment " + t + "/corpus.txt --gold " + t + "/gold.txt --lexicon " + t + "/lex.tsv", {"lex.tsv"}},
      {"stats " + d + "/tfeu_document.txt", {}},
      {"stats " + t + "/menu.txt --schema " + d + "/menu.schema --format json", {}},
  };
  std::size_t checked = 0;
  for (const auto& [cmd, files] : commands) {
    std::string first;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / ("out" + std::to_string(run));
      const std::string line = "\"" + cli_path.string() + "\" " + cmd + " > \"" + out.string() + "\" 2>&1";
      const int status = std::system(line.c_str());
      std::string text = "status " + std::to_string(status) + "\n" + slurp(out);
      for (const auto& f : files) text += slurp(dir / f);
      if (run == 0) first = text;
      else if (text != first) v.fail("'" + cmd + "' output differs between runs");
    }
    if (first.rfind("status 0\n", 0) != 0) v.fail("'" + cmd + "' failed: " + first);
    ++checked;
  }

  // Parallel extension must not change alignment results.
  const auto store = load_store(data_dir / "fruit_flies.sp", CostMode::uniform);
  SearchOptions one, four;
  one.nbest = four.nbest = 5;
  four.threads = 4;
  auto render_all = [&](const std::vector<MultipleAlignment>& as) {
    std::string s;
    for (const auto& a : as) s += render_alignment(a, store) + format_bits(a.score.compression_difference) + "\n";
    return s;
  };
  for (const char* sentence : {"fruit flies like a banana", "a banana", "fruit flies"}) {
    const auto seq = split_symbols(sentence);
    if (render_all(build_alignments(seq, store, one)) != render_all(build_alignments(seq, store, four)))
      v.fail(std::string("thread count changed the result for '") + sentence + "'");
  }
  gen::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto inst = gen::toy_instance(rng);
    const auto s = gen::toy_store(inst, CostMode::uniform);
    auto a = build_alignments(inst.new_row, s, one), b = build_alignments(inst.new_row, s, four);
    bool same = a.size() == b.size();
    for (std::size_t k = 0; same && k < a.size(); ++k)
      same = a[k].old_rows == b[k].old_rows && a[k].links == b[k].links;
    if (!same) v.fail("thread count changed a toy result");
  }
  if (v.ok) v.detail = std::to_string(checked) + " CLI invocations byte-identical on rerun; 1 vs 4 threads agree";
  return v;
}

}  // namespace

int main() {
  report(1, "fruit flies parses", fruit_flies_parses());
  report(2, "pairwise oracle equivalence", pairwise_oracle());
  report(3, "multiple-alignment oracle equivalence", alignment_oracle());
  report(4, "codec losslessness", codecs_lossless());
  report(5, "decompression by compression", decompression_by_compression());
  report(6, "probability contract", probabilities());
  report(7, "segmentation benchmark", segmentation_benchmark());
  report(8, "determinism", determinism());
  report(9, "gain accounting", gain_accounting());
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
