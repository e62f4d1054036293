#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "refforest/grammar.hpp"

namespace refforest {

using DisjId = std::uint32_t;
using ConjId = std::uint32_t;

/// Tree counts grow as Catalan numbers and overflow 64 bits near 37 PPs.
using BigCount = boost::multiprecision::cpp_int;

/// Half-open token range [start, end).
struct Span {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t length() const noexcept { return end - start; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// A possible constituent: one per (category, span).
struct DisjNode {
  CatId category = 0;
  Span span;
  std::vector<ConjId> alternatives;
};

struct LeafAlt {
  EntryId entry = 0;
  std::uint32_t token = 0;
};

struct BranchAlt {
  RuleId rule = 0;
  DisjId left = 0;
  DisjId right = 0;
};

/// One derivation step of its parent constituent: a lexical leaf or a binary
/// rule application.
struct ConjNode {
  DisjId parent = 0;
  std::variant<LeafAlt, BranchAlt> body;

  bool is_leaf() const noexcept { return std::holds_alternative<LeafAlt>(body); }
  const LeafAlt& leaf() const { return std::get<LeafAlt>(body); }
  const BranchAlt& branch() const { return std::get<BranchAlt>(body); }
};

/// Packed shared forest (and-or graph) of all parses of a token sequence.
///
/// Disjunctive ids are ordered by (span length, start, category), so every
/// child id is smaller than its parent's. Conjunctive ids follow their parent's
/// disjunctive order, then alternative order: leaves by lexical entry order,
/// branches by (rule declaration order, split point).
class Forest {
 public:
  Forest() = default;
  Forest(std::vector<std::string> tokens, std::vector<DisjNode> disj, std::vector<ConjNode> conj,
         std::vector<DisjId> roots);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<DisjNode>& disj_nodes() const noexcept { return disj_; }
  const std::vector<ConjNode>& conj_nodes() const noexcept { return conj_; }
  const DisjNode& disj(DisjId id) const { return disj_.at(id); }
  const ConjNode& conj(ConjId id) const { return conj_.at(id); }
  const std::vector<DisjId>& roots() const noexcept { return roots_; }
  bool has_parse() const noexcept { return !roots_.empty(); }

  std::optional<DisjId> find(CatId category, Span span) const;

  /// Keeps nodes marked alive that are reachable from live roots through live
  /// nodes, renumbered in the canonical order. `disj_origin`/`conj_origin`
  /// receive, for each kept node, its id in this forest.
  Forest subforest(const std::vector<bool>& disj_alive, const std::vector<bool>& conj_alive,
                   std::vector<DisjId>* disj_origin = nullptr,
                   std::vector<ConjId>* conj_origin = nullptr) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<DisjNode> disj_;
  std::vector<ConjNode> conj_;
  std::vector<DisjId> roots_;
};

/// CKY recognition into a pruned shared forest. Uses the OpenMP chart kernel
/// when built with OpenMP, otherwise the serial reference.
///
/// Throws UnknownWordError (1-based position) for words with no lexical entry
/// and std::invalid_argument for empty input. A sentence the grammar does not
/// derive yields a forest with no roots.
Forest cky_parse(const Grammar& grammar, const std::vector<std::string>& tokens);

/// Single-threaded reference chart filler; produces the same forest as cky_parse.
Forest cky_parse_serial(const Grammar& grammar, const std::vector<std::string>& tokens);

/// Whitespace tokenization with no normalization.
std::vector<std::string> tokenize(std::string_view sentence);

/// Number of trees below `node`, or summed over all roots.
BigCount count_trees(const Forest& forest, std::optional<DisjId> node = std::nullopt);

/// Per-disjunctive-node tree counts, indexed by DisjId.
std::vector<BigCount> tree_counts(const Forest& forest);

struct TreeNode {
  DisjId disj = 0;
  ConjId conj = 0;
  std::shared_ptr<const TreeNode> left;
  std::shared_ptr<const TreeNode> right;

  bool is_leaf() const noexcept { return !left; }
};

/// One derivation. Subtrees are immutable and may be shared between trees.
struct ParseTree {
  std::shared_ptr<const TreeNode> root;
};

/// Up to `limit` trees, depth first: roots in category order, alternatives in
/// forest order, left subtree varying slowest.
std::vector<ParseTree> enumerate_trees(const Forest& forest, std::size_t limit);

/// "(NP (NP button) (PP (P on) (NP handle)))".
std::string bracketed(const ParseTree& tree, const Forest& forest, const Grammar& grammar);

/// Calls `fn(node)` for every node of `tree` in pre-order.
void for_each_node(const ParseTree& tree, const std::function<void(const TreeNode&)>& fn);

struct ForestStats {
  std::size_t disj_count = 0;
  std::size_t conj_count = 0;
  BigCount tree_count;
  /// Sum over all trees of their node count (one disjunctive plus one
  /// conjunctive node per constituent), by dynamic programming.
  BigCount unshared_node_count;

  std::size_t node_count() const noexcept { return disj_count + conj_count; }
  double sharing_ratio() const;
};

ForestStats forest_stats(const Forest& forest);

/// "NP[0,3)".
std::string node_label(const Forest& forest, const Grammar& grammar, DisjId id);

/// Graphviz rendering: disjunctive nodes as boxes labeled "CAT[i,j)",
/// conjunctive nodes as small circles. `extra_label` appends a line to a box.
std::string to_dot(const Forest& forest, const Grammar& grammar,
                   const std::function<std::string(DisjId)>& extra_label = {});

}  // namespace refforest
