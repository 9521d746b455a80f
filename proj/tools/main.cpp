#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "icmup/cli.hpp"

namespace {

struct Shared {
  std::string cost = "uniform";
  std::string format = "text";
};

}  // namespace

int main(int argc, char** argv) {
  using icmup::cli::RunConfig;
  RunConfig cfg;
  Shared sh;

  CLI::App app{"icmup: compression by matching and unifying patterns"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--cost", sh.cost, "symbol cost model")->check(CLI::IsMember({"uniform", "frequency"}));
    sub->add_option("--format", sh.format, "output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("-o,--output", cfg.output, "write the main output here instead of stdout");
    sub->add_flag("--timing", cfg.timing, "add wall time to the report");
  };
  auto search = [&](CLI::App* sub) {
    sub->add_option("--grammar", cfg.grammar, "pattern file")->required()->check(CLI::ExistingFile);
    sub->add_option("--beam", cfg.search.beam)->check(CLI::PositiveNumber);
    sub->add_option("--nbest", cfg.search.nbest)->check(CLI::PositiveNumber);
    sub->add_option("--max-stages", cfg.search.max_stages)->check(CLI::PositiveNumber);
    sub->add_option("--max-extensions", cfg.search.max_extensions)->check(CLI::PositiveNumber);
    sub->add_option("--threads", cfg.search.threads)->check(CLI::PositiveNumber);
  };

  auto* compress = app.add_subcommand("compress", "encode a symbol file with one codec");
  compress->add_option("--codec", cfg.codec)->check(CLI::IsMember({"chunk", "spc", "rle"}));
  compress->add_option("input,-i,--input", cfg.input)->required()->check(CLI::ExistingFile);
  compress->add_option("--schema", cfg.schema)->check(CLI::ExistingFile);
  compress->add_option("--min-len", cfg.min_len, "shortest chunk")->check(CLI::Range(2, 1 << 20));
  compress->add_option("--max-unit", cfg.max_unit, "longest run unit")->check(CLI::PositiveNumber);
  common(compress);

  auto* decompress = app.add_subcommand("decompress", "decode an encoded stream");
  decompress->add_option("input,-i,--input", cfg.input)->required()->check(CLI::ExistingFile);
  decompress->add_option("--schema", cfg.schema)->check(CLI::ExistingFile);
  common(decompress);

  auto* align = app.add_subcommand("align", "best multiple alignments of a New pattern");
  auto* encode = app.add_subcommand("encode", "encoding of the best alignment");
  for (auto* sub : {align, encode}) {
    search(sub);
    sub->add_option("--new", cfg.new_text, "New pattern, symbols separated by spaces");
    sub->add_option("-i,--input", cfg.input, "file holding the New pattern")->check(CLI::ExistingFile);
    common(sub);
  }

  auto* decode = app.add_subcommand("decode", "recover content from a code");
  search(decode);
  decode->add_option("--code", cfg.code_text, "code symbols separated by spaces");
  decode->add_option("-i,--input", cfg.input)->check(CLI::ExistingFile);
  common(decode);

  auto* segment = app.add_subcommand("segment", "discover word boundaries in raw text");
  segment->add_option("input,-i,--input", cfg.input)->required()->check(CLI::ExistingFile);
  segment->add_option("--gold", cfg.gold, "same text with words separated by spaces")->check(CLI::ExistingFile);
  segment->add_option("--lexicon", cfg.lexicon, "write the lexicon here");
  segment->add_option("--max-iter", cfg.max_iter);
  segment->add_option("--min-gain", cfg.min_gain)->check(CLI::NonNegativeNumber);
  common(segment);

  auto* stats = app.add_subcommand("stats", "compare the codecs on a symbol file");
  stats->add_option("input,-i,--input", cfg.input)->required()->check(CLI::ExistingFile);
  stats->add_option("--schema", cfg.schema)->check(CLI::ExistingFile);
  stats->add_option("--min-len", cfg.min_len)->check(CLI::Range(2, 1 << 20));
  stats->add_option("--max-unit", cfg.max_unit)->check(CLI::PositiveNumber);
  common(stats);

  // Segmentation prices symbols by frequency unless told otherwise.
  segment->preparse_callback([&](std::size_t) { sh.cost = "frequency"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : icmup::cli::exit_usage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.cost = icmup::parse_cost_mode(sh.cost);
  cfg.format = icmup::parse_report_format(sh.format);
  return icmup::cli::run(cfg, std::cout, std::cerr);
}
