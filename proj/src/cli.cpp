#include "refforest/cli.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "refforest/disambiguation.hpp"

namespace refforest {

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

class Session {
 public:
  Session(Grammar grammar, EnvironmentDb db, CliConfig config)
      : grammar_(std::move(grammar)), db_(std::move(db)), config_(std::move(config)) {}

  const Grammar& grammar() const { return grammar_; }
  const EnvironmentDb& db() const { return db_; }
  const CliConfig& config() const { return config_; }
  AnnotationConfig annotation_config() const { return {config_.proximity_threshold}; }

  /// nullopt when the grammar does not derive the sentence; throws on bad input.
  std::optional<AnnotatedForest> analyze(const std::string& sentence) const {
    const auto tokens = tokenize(sentence);
    if (tokens.empty()) throw Error("empty sentence");
    Forest forest = cky_parse(grammar_, tokens);
    if (!forest.has_parse()) return std::nullopt;
    return annotate_forest(forest, grammar_, db_, annotation_config());
  }

 private:
  Grammar grammar_;
  EnvironmentDb db_;
  CliConfig config_;
};

/// Unstripped tuples behind an argument attachment: relation tuples whose last
/// element was matched by the argument.
ReferentSet provenance_tuples(const ReferentSet& relation, const ReferentSet& argument) {
  std::vector<RefIdx> flat;
  for (std::size_t i = 0; i < relation.size(); ++i) {
    const RefIdx x = relation.last(i);
    if (argument.contains(std::span<const RefIdx>(&x, 1))) {
      auto t = relation[i];
      flat.insert(flat.end(), t.begin(), t.end());
    }
  }
  return flat.empty() ? ReferentSet{} : ReferentSet::from_sorted(relation.arity(), std::move(flat));
}

void print_tree(std::ostream& out, const Session& s, const Forest& forest, const TreeNode& node,
                const std::unordered_map<const TreeNode*, Annotation>& values, int depth) {
  out << std::string(static_cast<std::size_t>(2 * depth), ' ') << node_label(forest, s.grammar(), node.disj);
  const ConjNode& cn = forest.conj(node.conj);
  const bool argument =
      !node.is_leaf() && s.grammar().rules()[cn.branch().rule].op == CompositionOp::argument;
  if (s.config().provenance && argument) {
    out << " '' "
        << s.db().format(provenance_tuples(values.at(node.left.get()).referents,
                                           values.at(node.right.get()).referents));
  } else {
    const Annotation& a = values.at(&node);
    out << " " << s.db().format(a.referents);
    if (a.quant == QuantFlag::universal) out << " (universal)";
  }
  if (node.is_leaf()) {
    out << "  " << forest.tokens()[cn.leaf().token] << "\n";
    return;
  }
  out << "\n";
  print_tree(out, s, forest, *node.left, values, depth + 1);
  print_tree(out, s, forest, *node.right, values, depth + 1);
}

using MaybeForest = std::optional<AnnotatedForest>;

int show_parse(const Session& s, const MaybeForest& af, std::ostream& out) {
  if (!af) {
    out << "no parse\n";
    return exit_code::no_parse;
  }
  switch (s.config().output_mode) {
    case OutputMode::dot:
      out << annotated_dot(*af, s.grammar(), s.db());
      return exit_code::ok;
    case OutputMode::record: {
      const FilterResult fr = filter_forest(*af, s.grammar());
      out << format_stats_record(run_stats(*af, fr.report)) << "\n";
      return exit_code::ok;
    }
    case OutputMode::text:
      break;
  }
  const BigCount total = count_trees(af->forest);
  out << "trees: " << total.str() << "\n";
  for (DisjId r : af->forest.roots()) {
    out << node_label(af->forest, s.grammar(), r) << ": " << s.db().format(af->disj[r].referents) << "\n";
  }
  if (s.config().show_referents) {
    const auto trees = enumerate_trees(af->forest, s.config().tree_limit);
    for (std::size_t i = 0; i < trees.size(); ++i) {
      out << "tree " << i + 1 << " of " << total.str() << ": " << bracketed(trees[i], af->forest, s.grammar())
          << "\n";
      const auto values = evaluate_tree(trees[i], af->forest, s.grammar(), s.db(), s.annotation_config());
      print_tree(out, s, af->forest, *trees[i].root, values, 1);
    }
  }
  return exit_code::ok;
}

int show_eval(const Session& s, const MaybeForest& af, std::ostream& out) {
  if (!af) {
    out << "no parse\n";
    return exit_code::no_parse;
  }
  const TruthVerdict v = evaluate_truth(*af);
  out << (v.holds ? "yes" : "no") << "  witnesses: " << s.db().format(v.witnesses) << "\n";
  return v.holds ? exit_code::ok : exit_code::evaluated_false;
}

int show_stats(const Session& s, const MaybeForest& af, std::ostream& out) {
  if (!af) {
    out << "no parse\n";
    return exit_code::no_parse;
  }
  const FilterResult fr = filter_forest(*af, s.grammar());
  out << format_stats_text(run_stats(*af, fr.report));
  return exit_code::ok;
}

/// Runs `fn` and maps library errors to exit code 1 with a message on `err`.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::error;
  }
}

struct SentenceOutcome {
  std::variant<std::monostate, RunStats, std::string> value;  // no parse, stats, error
};

int cmd_stats(const Session& s, const std::string& path, std::ostream& out, std::ostream& err) {
  auto text = read_file(path);
  if (!text) {
    err << "error: cannot read '" << path << "'\n";
    return exit_code::error;
  }
  std::vector<std::string> sentences;
  std::istringstream lines(*text);
  for (std::string line; std::getline(lines, line);) {
    auto t = trim(line);
    if (!t.empty() && t.front() != '#') sentences.push_back(std::move(t));
  }
  if (sentences.empty()) {
    err << "error: no sentences\n";
    return exit_code::error;
  }

  std::vector<SentenceOutcome> outcomes(sentences.size());
  const auto count = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& o = outcomes[static_cast<std::size_t>(i)];
    try {
      auto af = s.analyze(sentences[static_cast<std::size_t>(i)]);
      if (af) {
        const FilterResult fr = filter_forest(*af, s.grammar());
        o.value = run_stats(*af, fr.report);
      }
    } catch (const std::exception& e) {
      o.value = std::string(e.what());
    }
  }

  const bool text_mode = s.config().output_mode == OutputMode::text;
  std::size_t parsed = 0;
  std::size_t fallbacks = 0;
  double sharing = 0;
  double reduction = 0;
  if (!text_mode) out << "sentence\ttrees_before\ttrees_after\tdisj\tconj\tunshared\tfallback\n";
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& v = outcomes[i].value;
    if (const auto* st = std::get_if<RunStats>(&v)) {
      ++parsed;
      fallbacks += st->fallback_used ? 1 : 0;
      sharing += st->sharing_ratio;
      reduction += st->reduction_ratio;
      out << (text_mode ? format_stats_text(*st) + "\n" : format_stats_record(*st) + "\n");
    } else if (const auto* msg = std::get_if<std::string>(&v)) {
      out << (text_mode ? "sentence: " + sentences[i] + "\nERROR: " + *msg + "\n\n"
                        : sentences[i] + "\tERROR\t" + *msg + "\n");
    } else {
      out << (text_mode ? "sentence: " + sentences[i] + "\nNO PARSE\n\n" : sentences[i] + "\tNO PARSE\n");
    }
  }
  const double n = parsed == 0 ? 1.0 : static_cast<double>(parsed);
  if (text_mode) {
    out << "sentences: " << sentences.size() << "\nparsed: " << parsed
        << "\naverage_sharing_ratio: " << format_ratio(sharing / n)
        << "\naverage_reduction_ratio: " << format_ratio(reduction / n) << "\nfallbacks: " << fallbacks
        << "\n";
  } else {
    out << "summary\tparsed=" << parsed << "/" << sentences.size()
        << "\tavg_sharing=" << format_ratio(sharing / n) << "\tavg_reduction=" << format_ratio(reduction / n)
        << "\tfallbacks=" << fallbacks << "\n";
  }
  return parsed > 0 ? exit_code::ok : exit_code::error;
}

int cmd_repl(const Session& s, std::istream& in, std::ostream& out, std::ostream& err, bool prompt) {
  bool parse_mode = false;
  MaybeForest last;

  for (;;) {
    if (prompt) out << "> " << std::flush;
    std::string raw;
    if (!std::getline(in, raw)) break;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == ":quit") return exit_code::ok;

    std::string directive;
    std::string arg = line;
    if (line.front() == ':') {
      const auto sp = line.find(' ');
      directive = line.substr(0, sp);
      arg = sp == std::string::npos ? std::string() : trim(line.substr(sp));
    }

    if (directive == ":dot") {
      if (arg.empty()) {
        err << "error: :dot needs a file name\n";
      } else if (!last) {
        err << "error: nothing parsed yet\n";
      } else {
        std::ofstream f(arg, std::ios::binary);
        if (!f) {
          err << "error: cannot write '" << arg << "'\n";
        } else {
          f << annotated_dot(*last, s.grammar(), s.db());
          out << "wrote " << arg << "\n";
        }
      }
      continue;
    }
    if ((directive == ":parse" || directive == ":eval") && arg.empty()) {
      parse_mode = directive == ":parse";
      out << "mode: " << (parse_mode ? "parse" : "eval") << "\n";
      continue;
    }
    if (!directive.empty() && directive != ":parse" && directive != ":eval" && directive != ":stats") {
      err << "error: unknown directive '" << directive << "'\n";
      continue;
    }

    guarded(err, [&] {
      last = s.analyze(arg);
      if (directive == ":stats") return show_stats(s, last, out);
      const bool as_parse = directive == ":parse" || (directive.empty() && parse_mode);
      return as_parse ? show_parse(s, last, out) : show_eval(s, last, out);
    });
  }
  return exit_code::ok;
}

std::optional<Session> open_session(const CliConfig& cfg, std::ostream& err) {
  auto gtext = read_file(cfg.grammar_path);
  if (!gtext) {
    err << "error: cannot read '" << cfg.grammar_path << "'\n";
    return std::nullopt;
  }
  auto etext = read_file(cfg.env_path);
  if (!etext) {
    err << "error: cannot read '" << cfg.env_path << "'\n";
    return std::nullopt;
  }
  std::optional<Grammar> grammar;
  try {
    grammar = load_grammar(*gtext);
  } catch (const Error& e) {
    err << "error: " << cfg.grammar_path << ": " << e.what() << "\n";
    return std::nullopt;
  }
  std::optional<EnvironmentDb> db;
  try {
    db = load_environment(*etext);
  } catch (const Error& e) {
    err << "error: " << cfg.env_path << ": " << e.what() << "\n";
    return std::nullopt;
  }
  for (const auto& w : validate_against_env(*grammar, *db)) err << "warning: " << w << "\n";
  return Session(std::move(*grammar), std::move(*db), cfg);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parse ambiguous sentences into a shared forest annotated with environment referents."};
  app.name(argc > 0 ? argv[0] : "refforest");
  app.require_subcommand(1);

  CliConfig cfg;
  std::vector<std::string> words;
  std::string file;
  std::string format;

  auto common = [&](CLI::App* sub, bool sentence) {
    sub->add_option("--grammar", cfg.grammar_path, "grammar file")->required();
    sub->add_option("--env", cfg.env_path, "environment file")->required();
    sub->add_option("--threshold", cfg.proximity_threshold, "noun-noun proximity threshold")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--trees", cfg.tree_limit, "maximum trees to print")->check(CLI::PositiveNumber);
    sub->add_flag("--show-referents", cfg.show_referents, "print enumerated trees with referents");
    sub->add_flag("--provenance", cfg.provenance, "show unstripped tuples at argument attachments");
    sub->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "record", "dot"}));
    if (sentence) sub->add_option("sentence", words, "sentence words");
  };
  auto* parse = app.add_subcommand("parse", "parse a sentence and print its referents");
  auto* eval = app.add_subcommand("eval", "answer whether a sentence holds in the environment");
  auto* stats = app.add_subcommand("stats", "sharing and filtering statistics for a sentence file");
  auto* repl = app.add_subcommand("repl", "interactive session");
  common(parse, true);
  common(eval, true);
  common(stats, false);
  stats->add_option("--file", file, "one sentence per line")->required();
  common(repl, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_code::ok;
    }
    err << "error: " << e.what() << "\n";
    return exit_code::error;
  }

  if (format == "record") {
    cfg.output_mode = OutputMode::record;
  } else if (format == "dot") {
    cfg.output_mode = OutputMode::dot;
  } else if (format.empty() && stats->parsed()) {
    cfg.output_mode = OutputMode::record;
  }

  auto session = open_session(cfg, err);
  if (!session) return exit_code::error;

  std::string sentence;
  for (const auto& w : words) sentence += (sentence.empty() ? "" : " ") + w;

  if (parse->parsed() || eval->parsed()) {
    if (sentence.empty()) {
      err << "error: no sentence given\n";
      return exit_code::error;
    }
    return guarded(err, [&] {
      const MaybeForest af = session->analyze(sentence);
      return parse->parsed() ? show_parse(*session, af, out) : show_eval(*session, af, out);
    });
  }
  if (stats->parsed()) return guarded(err, [&] { return cmd_stats(*session, file, out, err); });
  (void)repl;
  const bool prompt = &in == &std::cin && ::isatty(STDIN_FILENO);
  return cmd_repl(*session, in, out, err, prompt);
}

}  // namespace refforest
