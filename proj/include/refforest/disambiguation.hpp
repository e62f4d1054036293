#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "refforest/annotate.hpp"
#include "refforest/error.hpp"

namespace refforest {

struct FilterReport {
  BigCount trees_before;
  BigCount trees_after;
  std::size_t removed_conj_nodes = 0;
  bool fallback_used = false;
};

struct FilterResult {
  Forest forest;
  FilterReport report;
  /// For each node of `forest`, its id in the annotated input forest.
  std::vector<DisjId> disj_origin;
  std::vector<ConjId> conj_origin;
};

/// Removes derivations with no grounding:
///  - a conjunctive node of a referential category whose own annotation is
///    empty;
///  - an argument attachment under a non-referential category whose argument
///    (right child) annotation is empty.
/// Nodes left without derivations or unreachable are pruned. If nothing
/// derivable remains at the root, the input forest is returned unchanged with
/// `fallback_used` set.
FilterResult filter_forest(const AnnotatedForest& af, const Grammar& grammar);

struct TruthVerdict {
  bool holds = false;
  ReferentSet witnesses;
};

/// Truth without disambiguation: the union of the root annotations is
/// non-empty. Throws NoParseError for a forest without roots.
TruthVerdict evaluate_truth(const AnnotatedForest& af);

/// One tree chosen from the filtered forest: fewest empty-annotation nodes,
/// then earliest-closing constituents (sorted multiset of constituent end
/// positions, lexicographically smallest), then enumeration order. The tree
/// refers to node ids of `af.forest`. Absent when there is no parse.
std::optional<ParseTree> best_tree(const AnnotatedForest& af, const Grammar& grammar);

struct NodeKey {
  CatId category = 0;
  Span span;
  friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
};

using ReferentMap = std::map<NodeKey, ReferentSet>;

/// Referents of every constituent of one tree, evaluated from scratch.
std::unordered_map<const TreeNode*, Annotation> evaluate_tree(const ParseTree& tree, const Forest& forest,
                                                              const Grammar& grammar,
                                                              const EnvironmentDb& db,
                                                              const AnnotationConfig& config = {});

class TreeCapError : public Error {
 public:
  using Error::Error;
};

/// Exponential baseline: enumerates every tree, evaluates each one on its own
/// and unions the results by (category, span). Throws TreeCapError when the
/// forest holds more than `cap` trees.
ReferentMap oracle_annotate(const Forest& forest, const Grammar& grammar, const EnvironmentDb& db,
                            const AnnotationConfig& config = {}, std::size_t cap = 500);

struct RunStats {
  std::string sentence;
  BigCount trees_before;
  BigCount trees_after;
  std::size_t disj_count = 0;
  std::size_t conj_count = 0;
  BigCount unshared_node_count;
  double sharing_ratio = 0;
  double reduction_ratio = 0;
  bool fallback_used = false;
};

RunStats run_stats(const AnnotatedForest& af, const FilterReport& report);

/// "2.0:1".
std::string format_ratio(double ratio);

/// `key: value` lines.
std::string format_stats_text(const RunStats& stats);

/// sentence, trees_before, trees_after, disj, conj, unshared, fallback;
/// tab-separated, no trailing newline.
std::string format_stats_record(const RunStats& stats);

}  // namespace refforest
