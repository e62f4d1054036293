#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "refforest/annotate.hpp"
#include "refforest/disambiguation.hpp"
#include "refforest/env_store.hpp"
#include "refforest/forest.hpp"
#include "refforest/grammar.hpp"

namespace fixtures {

using namespace refforest;

inline std::string data_path(const std::string& rel) { return std::string(REFFOREST_DATA_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Setup {
  Grammar grammar;
  EnvironmentDb db;

  Forest parse(const std::string& sentence) const { return cky_parse(grammar, tokenize(sentence)); }
  AnnotatedForest annotate(const std::string& sentence, AnnotationConfig cfg = {}) const {
    return annotate_forest(parse(sentence), grammar, db, cfg);
  }
  CatId cat(const std::string& name) const { return grammar.find_category(name).value(); }
};

/// Grammar and environment from data/<dir>/.
inline Setup load_setup(const std::string& dir) {
  return {load_grammar(read_text(data_path(dir + "/grammar.txt"))),
          load_environment(read_text(data_path(dir + "/env.txt")))};
}

inline const std::string kAttachSentence = "button on handle beside adapter";
inline const std::string kDrainSentence = "drained after test at 3:00";

/// Referent set built from id names, one tuple per inner list.
inline ReferentSet tuples(const EnvironmentDb& db, std::initializer_list<std::initializer_list<const char*>> ts) {
  std::vector<RefIdx> flat;
  std::size_t arity = 0;
  for (const auto& t : ts) {
    arity = t.size();
    for (const char* name : t) flat.push_back(db.find(name).value());
  }
  if (flat.empty()) return {};
  return ReferentSet::from_tuples(arity, std::move(flat));
}

inline ReferentSet ids(const EnvironmentDb& db, std::initializer_list<const char*> names) {
  std::vector<RefIdx> flat;
  for (const char* name : names) flat.push_back(db.find(name).value());
  if (flat.empty()) return {};
  return ReferentSet::singletons(std::move(flat));
}

/// Annotation of the node (category, [start, end)), which must exist.
inline const Annotation& at(const AnnotatedForest& af, const Setup& s, const std::string& cat, std::uint32_t start,
                            std::uint32_t end) {
  const auto d = af.forest.find(s.cat(cat), Span{start, end});
  if (!d) throw std::runtime_error("no node " + cat + "[" + std::to_string(start) + "," + std::to_string(end) + ")");
  return af.disj[*d];
}

/// PP-attachment chain family: "block near block near block ...".
inline const char* kChainGrammar =
    "cat NP referential\n"
    "cat PP referential\n"
    "cat P\n"
    "start NP\n"
    "rule NP -> NP PP : modifier\n"
    "rule PP -> P NP : argument\n"
    "lex button NP pred button\n"
    "lex handle NP pred handle\n"
    "lex adapter NP pred adapter\n"
    "lex panel NP pred panel\n"
    "lex on P rel on 2\n"
    "lex beside P rel beside 2\n"
    "lex near P rel near 2\n";

/// A noun followed by k preposition-noun pairs.
inline std::vector<std::string> chain_tokens(int k) {
  static const char* nouns[] = {"button", "handle", "adapter", "panel"};
  static const char* preps[] = {"on", "beside", "near"};
  std::vector<std::string> out{nouns[0]};
  for (int i = 0; i < k; ++i) {
    out.emplace_back(preps[i % 3]);
    out.emplace_back(nouns[(i + 1) % 4]);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

/// Canonical text of one tree, distinguishing lexical entries and rules:
/// "(C:e)" for a leaf, "(C/r L R)" for a branch.
inline std::string tree_key(const TreeNode& n, const Forest& f) {
  const ConjNode& c = f.conj(n.conj);
  const std::string cat = std::to_string(f.disj(n.disj).category);
  if (n.is_leaf()) return "(" + cat + ":" + std::to_string(c.leaf().entry) + ")";
  return "(" + cat + "/" + std::to_string(c.branch().rule) + " " + tree_key(*n.left, f) + " " +
         tree_key(*n.right, f) + ")";
}

}  // namespace fixtures
