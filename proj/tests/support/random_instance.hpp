#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "refforest/env_store.hpp"
#include "refforest/forest.hpp"
#include "refforest/grammar.hpp"

namespace randomized {

using namespace refforest;

struct Options {
  std::size_t max_categories = 8;
  std::size_t max_referents = 20;
  std::size_t max_tokens = 8;
  std::size_t max_trees = 500;
  /// Lets determiners carry universal force. Universal attachment is not
  /// distributive over union, so per-tree and shared evaluation only agree
  /// when the quantified phrase is unambiguous.
  bool universal_determiners = false;
};

struct Instance {
  std::uint64_t seed = 0;
  std::string grammar_text;
  std::string env_text;
  Grammar grammar;
  EnvironmentDb db;
  std::vector<std::string> tokens;
  Forest forest;
};

namespace detail {

struct Cat {
  std::string name;
  int arity = 1;  // 0 marks the determiner category
  bool referential = false;
};

struct Draft {
  std::vector<Cat> cats;
  std::vector<std::string> rule_lines;
  struct RuleSpec {
    std::size_t parent, left, right;
  };
  std::vector<RuleSpec> rules;
  std::vector<std::vector<std::string>> words_by_cat;
  std::string text;
};

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Random top-down derivation from `cat`; appends words, fails past the length cap.
inline bool derive(const Draft& d, std::size_t cat, int depth, std::size_t max_tokens, std::mt19937_64& rng,
                   std::vector<std::string>& out) {
  if (out.size() >= max_tokens || depth > 12) return false;
  std::vector<std::size_t> rules;
  for (std::size_t r = 0; r < d.rules.size(); ++r) {
    if (d.rules[r].parent == cat) rules.push_back(r);
  }
  const auto& words = d.words_by_cat[cat];
  const bool use_rule = !rules.empty() && (words.empty() || (depth < 6 && coin(rng, 0.7)));
  if (!use_rule) {
    if (words.empty()) return false;
    out.push_back(words[pick(rng, words.size())]);
    return true;
  }
  const auto& r = d.rules[rules[pick(rng, rules.size())]];
  return derive(d, r.left, depth + 1, max_tokens, rng, out) && derive(d, r.right, depth + 1, max_tokens, rng, out);
}

inline std::string make_env(std::mt19937_64& rng, const Options& opt, std::vector<std::string>& all_ids,
                            std::vector<std::string>& keywords, std::vector<std::pair<std::string, int>>& relations) {
  std::string text;
  keywords = {"k0", "k1", "k2"};
  const std::size_t budget = 3 + pick(rng, opt.max_referents - 2);
  const std::size_t n_sit = std::min<std::size_t>(pick(rng, 5), budget / 3);
  const std::size_t n_tp = std::min<std::size_t>(pick(rng, 3), budget / 4);
  const std::size_t n_ent = budget - n_sit - n_tp;
  for (std::size_t i = 0; i < n_ent; ++i) {
    const std::string id = "e" + std::to_string(i);
    all_ids.push_back(id);
    text += "entity " + id + " " + keywords[pick(rng, keywords.size())];
    if (coin(rng, 0.8)) {
      for (int c = 0; c < 3; ++c) text += " " + std::to_string(pick(rng, 3));
    }
    text += "\n";
  }
  for (std::size_t i = 0; i < n_sit; ++i) {
    const std::string id = "s" + std::to_string(i);
    all_ids.push_back(id);
    const auto start = pick(rng, 100);
    text += "situation " + id + " " + std::to_string(start) + " " + std::to_string(start + pick(rng, 50)) + "\n";
  }
  for (std::size_t i = 0; i < n_tp; ++i) {
    const std::string id = "t" + std::to_string(i);
    all_ids.push_back(id);
    text += "timepoint " + id + " " + std::to_string(pick(rng, 150)) + "\n";
  }
  const std::size_t n_rel = 2 + pick(rng, 4);
  for (std::size_t r = 0; r < n_rel; ++r) {
    const int arity = coin(rng, 0.7) ? 2 : 3;
    const std::string name = "r" + std::to_string(r) + "_" + std::to_string(arity);
    relations.emplace_back(name, arity);
    const std::size_t n_tuples = all_ids.size() + pick(rng, 5 * all_ids.size());
    for (std::size_t t = 0; t < n_tuples; ++t) {
      text += "rel " + name;
      for (int a = 0; a < arity; ++a) {
        // Members cluster on a few ids so compositions often overlap.
        const std::size_t range = coin(rng, 0.7) ? std::max<std::size_t>(2, all_ids.size() / 3) : all_ids.size();
        text += " " + all_ids[pick(rng, std::min(range, all_ids.size()))];
      }
      text += "\n";
    }
  }
  return text;
}

inline std::optional<Draft> make_grammar(std::mt19937_64& rng, const Options& opt,
                                         const std::vector<std::string>& all_ids,
                                         const std::vector<std::string>& keywords,
                                         const std::vector<std::pair<std::string, int>>& relations) {
  Draft d;
  const std::size_t n_cat = 2 + pick(rng, opt.max_categories - 1);
  const bool with_det = n_cat >= 3 && coin(rng, 0.35);
  for (std::size_t i = 0; i < n_cat; ++i) {
    Cat c;
    c.name = "C" + std::to_string(i);
    if (with_det && i == n_cat - 1) {
      c.name = "D";
      c.arity = 0;
    } else if (i > 0) {
      static const int arities[] = {1, 1, 1, 2, 2, 3};
      c.arity = arities[pick(rng, 6)];
    }
    c.referential = c.arity >= 1 && coin(rng, c.arity == 1 ? 0.7 : 0.3);
    d.cats.push_back(c);
  }
  auto cats_of = [&](int arity) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.cats.size(); ++i) {
      if (d.cats[i].arity == arity) out.push_back(i);
    }
    return out;
  };
  const auto unary = cats_of(1);
  const auto dets = cats_of(0);
  std::vector<std::size_t> grounded;  // referential, 1-ary: argument positions
  for (std::size_t i : unary) {
    if (d.cats[i].referential) grounded.push_back(i);
  }

  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  const std::size_t n_rules = 2 + pick(rng, 9);
  for (std::size_t k = 0; k < 4 * n_rules && d.rules.size() < n_rules; ++k) {
    const std::size_t parent = pick(rng, d.cats.size());
    const int pa = d.cats[parent].arity;
    if (pa == 0) continue;
    std::vector<std::string> ops{"modifier", "modifier", "modifier"};
    if (!cats_of(pa + 1).empty() && !grounded.empty()) ops.insert(ops.end(), 3, "argument");
    if (pa == 1) ops.push_back("nounnoun");
    if (pa == 1 && !dets.empty()) ops.push_back("det");
    const std::string op = ops[pick(rng, ops.size())];
    std::size_t left = 0;
    if (op == "modifier") {
      left = cats_of(pa)[pick(rng, cats_of(pa).size())];
    } else if (op == "argument") {
      left = cats_of(pa + 1)[pick(rng, cats_of(pa + 1).size())];
    } else if (op == "nounnoun") {
      left = unary[pick(rng, unary.size())];
    } else {
      left = dets[0];
    }
    const std::size_t right =
        op == "argument" ? grounded[pick(rng, grounded.size())] : unary[pick(rng, unary.size())];
    if (!seen.emplace(parent, left, right).second) continue;
    d.rules.push_back({parent, left, right});
    d.rule_lines.push_back("rule " + d.cats[parent].name + " -> " + d.cats[left].name + " " + d.cats[right].name +
                           " : " + op);
  }
  // Universal flags may only reach argument positions: drop rules that feed
  // a det-built category anywhere else.
  std::set<std::size_t> quantified;
  for (std::size_t r = 0; r < d.rules.size(); ++r) {
    if (!dets.empty() && d.rules[r].left == dets[0]) quantified.insert(d.rules[r].parent);
  }
  if (!quantified.empty()) {
    std::vector<Draft::RuleSpec> kept;
    std::vector<std::string> kept_lines;
    for (std::size_t r = 0; r < d.rules.size(); ++r) {
      const auto& rs = d.rules[r];
      const bool det_rule = !dets.empty() && rs.left == dets[0];
      const bool is_argument = d.rule_lines[r].ends_with(": argument");
      const bool mixes = quantified.contains(rs.parent) && !det_rule;
      const bool misuses = quantified.contains(rs.left) || (quantified.contains(rs.right) && !is_argument);
      if (mixes || misuses) continue;
      kept.push_back(rs);
      kept_lines.push_back(d.rule_lines[r]);
    }
    d.rules = std::move(kept);
    d.rule_lines = std::move(kept_lines);
  }
  if (d.rules.empty()) return std::nullopt;

  d.words_by_cat.resize(d.cats.size());
  std::string lex;
  const std::size_t n_words = 3 + pick(rng, 6);
  for (std::size_t w = 0; w < n_words; ++w) {
    const std::string word = "w" + std::to_string(w);
    const std::size_t n_entries = coin(rng, 0.25) ? 2 : 1;
    std::set<std::size_t> used;
    for (std::size_t e = 0; e < n_entries; ++e) {
      std::size_t cat = pick(rng, d.cats.size());
      if (d.cats[cat].arity == 0 || !used.insert(cat).second) continue;
      const int arity = d.cats[cat].arity;
      std::string payload;
      if (arity == 1) {
        const auto roll = pick(rng, 40);
        if (roll < 30) {
          payload = "pred " + keywords[pick(rng, keywords.size())];
        } else if (roll < 39) {
          payload = "const " + all_ids[pick(rng, std::max<std::size_t>(2, all_ids.size() / 3))];
        } else {
          payload = "const nowhere";
        }
      } else {
        std::vector<std::string> names{"absent_" + std::to_string(arity)};
        for (const auto& [name, a] : relations) {
          if (a == arity) names.push_back(name);
        }
        payload = "rel " + names[pick(rng, names.size())] + " " + std::to_string(arity);
      }
      lex += "lex " + word + " " + d.cats[cat].name + " " + payload + "\n";
      d.words_by_cat[cat].push_back(word);
    }
  }
  if (!dets.empty()) {
    const char* force = opt.universal_determiners && coin(rng, 0.5) ? "universal" : "existential";
    lex += std::string("lex dd D quant ") + force + "\n";
    d.words_by_cat[dets[0]].push_back("dd");
  }

  for (const auto& c : d.cats) d.text += "cat " + c.name + (c.referential ? " referential" : "") + "\n";
  d.text += "start C0\n";
  for (const auto& line : d.rule_lines) d.text += line + "\n";
  d.text += lex;
  return d;
}

}  // namespace detail

/// A reproducible random grammar, environment and parseable sentence.
/// Grammars are typed by referent arity so every composition is well formed.
inline Instance make_instance(std::uint64_t seed, const Options& opt = {}) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0;; ++attempt) {
    std::vector<std::string> all_ids, keywords;
    std::vector<std::pair<std::string, int>> relations;
    const std::string env = detail::make_env(rng, opt, all_ids, keywords, relations);
    const auto draft = detail::make_grammar(rng, opt, all_ids, keywords, relations);
    if (!draft) continue;
    // Most draws aim for several tokens; single words stay possible.
    const std::size_t min_tokens = detail::coin(rng, 0.1) ? 1 : 3 + detail::pick(rng, opt.max_tokens - 2);
    for (int s = 0; s < 60; ++s) {
      std::vector<std::string> tokens;
      if (!detail::derive(*draft, 0, 0, opt.max_tokens, rng, tokens)) continue;
      if (tokens.size() < std::min(min_tokens, opt.max_tokens)) continue;
      Instance inst{seed, draft->text, env, load_grammar(draft->text), load_environment(env), tokens, {}};
      inst.forest = cky_parse(inst.grammar, tokens);
      if (count_trees(inst.forest) > opt.max_trees) continue;
      return inst;
    }
  }
}

}  // namespace randomized
