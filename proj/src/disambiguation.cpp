#include "refforest/disambiguation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace refforest {

FilterResult filter_forest(const AnnotatedForest& af, const Grammar& grammar) {
  const Forest& forest = af.forest;
  FilterResult result;
  result.report.trees_before = count_trees(forest);

  std::vector<bool> disj_alive(forest.disj_nodes().size(), true);
  std::vector<bool> conj_alive(forest.conj_nodes().size(), true);
  for (ConjId c = 0; c < forest.conj_nodes().size(); ++c) {
    const ConjNode& cn = forest.conj(c);
    const Category& cat = grammar.category(forest.disj(cn.parent).category);
    if (cat.referential) {
      if (af.conj[c].referents.empty()) conj_alive[c] = false;
    } else if (!cn.is_leaf()) {
      const BranchAlt& b = cn.branch();
      if (grammar.rules()[b.rule].op == CompositionOp::argument && af.disj[b.right].referents.empty()) {
        conj_alive[c] = false;
      }
    }
  }

  Forest kept = forest.subforest(disj_alive, conj_alive, &result.disj_origin, &result.conj_origin);
  if (forest.has_parse() && !kept.has_parse()) {
    result.forest = forest;
    result.disj_origin.resize(forest.disj_nodes().size());
    std::iota(result.disj_origin.begin(), result.disj_origin.end(), DisjId{0});
    result.conj_origin.resize(forest.conj_nodes().size());
    std::iota(result.conj_origin.begin(), result.conj_origin.end(), ConjId{0});
    result.report.trees_after = result.report.trees_before;
    result.report.fallback_used = true;
    return result;
  }
  result.report.removed_conj_nodes = forest.conj_nodes().size() - kept.conj_nodes().size();
  result.report.trees_after = count_trees(kept);
  result.forest = std::move(kept);
  return result;
}

TruthVerdict evaluate_truth(const AnnotatedForest& af) {
  if (!af.forest.has_parse()) throw NoParseError();
  std::vector<ReferentSet> sets;
  for (DisjId r : af.forest.roots()) sets.push_back(af.disj[r].referents);
  TruthVerdict v;
  v.witnesses = union_sets(sets);
  v.holds = !v.witnesses.empty();
  return v;
}

namespace {

struct TreeKey {
  std::size_t empties = 0;
  std::vector<std::uint32_t> ends;  // sorted

  friend bool operator<(const TreeKey& a, const TreeKey& b) {
    if (a.empties != b.empties) return a.empties < b.empties;
    return a.ends < b.ends;
  }
};

std::shared_ptr<const TreeNode> build_choice(const Forest& f, const std::vector<ConjId>& choice, DisjId d,
                                             const FilterResult& fr) {
  const ConjId c = choice[d];
  const ConjNode& cn = f.conj(c);
  TreeNode node{fr.disj_origin[d], fr.conj_origin[c], nullptr, nullptr};
  if (!cn.is_leaf()) {
    node.left = build_choice(f, choice, cn.branch().left, fr);
    node.right = build_choice(f, choice, cn.branch().right, fr);
  }
  return std::make_shared<const TreeNode>(std::move(node));
}

}  // namespace

std::optional<ParseTree> best_tree(const AnnotatedForest& af, const Grammar& grammar) {
  if (!af.forest.has_parse()) return std::nullopt;
  const FilterResult fr = filter_forest(af, grammar);
  const Forest& f = fr.forest;

  // Both key components add up over subtrees and their order survives adding
  // the same subtree to both sides, so a per-node minimum is a global one.
  std::vector<TreeKey> best(f.disj_nodes().size());
  std::vector<ConjId> choice(f.disj_nodes().size());
  for (DisjId d = 0; d < f.disj_nodes().size(); ++d) {
    bool have = false;
    for (ConjId c : f.disj(d).alternatives) {
      const ConjNode& cn = f.conj(c);
      const Annotation& ann = af.conj[fr.conj_origin[c]];
      TreeKey key;
      if (cn.is_leaf()) {
        const bool determiner = std::holds_alternative<Quantifier>(grammar.entry(cn.leaf().entry).payload);
        key.empties = ann.referents.empty() && !determiner ? 1 : 0;
      } else {
        const TreeKey& l = best[cn.branch().left];
        const TreeKey& r = best[cn.branch().right];
        key.empties = l.empties + r.empties + (ann.referents.empty() ? 1 : 0);
        key.ends.reserve(l.ends.size() + r.ends.size() + 1);
        std::merge(l.ends.begin(), l.ends.end(), r.ends.begin(), r.ends.end(), std::back_inserter(key.ends));
        key.ends.insert(std::upper_bound(key.ends.begin(), key.ends.end(), f.disj(d).span.end),
                        f.disj(d).span.end);
      }
      if (!have || key < best[d]) {
        best[d] = std::move(key);
        choice[d] = c;
        have = true;
      }
    }
  }

  DisjId root = f.roots().front();
  for (DisjId r : f.roots()) {
    if (best[r] < best[root]) root = r;
  }
  return ParseTree{build_choice(f, choice, root, fr)};
}

namespace {

const Annotation& eval_node(const TreeNode& node, const Forest& forest, const Grammar& grammar,
                            const EnvironmentDb& db, const AnnotationConfig& config,
                            std::unordered_map<const TreeNode*, Annotation>& out) {
  Annotation a;
  const ConjNode& cn = forest.conj(node.conj);
  if (node.is_leaf()) {
    a = leaf_referents(grammar.entry(cn.leaf().entry), db);
  } else {
    const Annotation& l = eval_node(*node.left, forest, grammar, db, config, out);
    const Annotation& r = eval_node(*node.right, forest, grammar, db, config, out);
    a = apply_rule(grammar.rules()[cn.branch().rule], l, r, db, config);
  }
  return out[&node] = std::move(a);
}

}  // namespace

std::unordered_map<const TreeNode*, Annotation> evaluate_tree(const ParseTree& tree, const Forest& forest,
                                                              const Grammar& grammar,
                                                              const EnvironmentDb& db,
                                                              const AnnotationConfig& config) {
  std::unordered_map<const TreeNode*, Annotation> out;
  eval_node(*tree.root, forest, grammar, db, config, out);
  return out;
}

ReferentMap oracle_annotate(const Forest& forest, const Grammar& grammar, const EnvironmentDb& db,
                            const AnnotationConfig& config, std::size_t cap) {
  const BigCount total = count_trees(forest);
  if (total > cap) {
    throw TreeCapError("forest has " + total.str() + " trees, oracle cap is " + std::to_string(cap));
  }
  std::map<NodeKey, std::vector<ReferentSet>> per_key;
  for (const ParseTree& tree : enumerate_trees(forest, cap)) {
    const auto values = evaluate_tree(tree, forest, grammar, db, config);
    for_each_node(tree, [&](const TreeNode& n) {
      const DisjNode& d = forest.disj(n.disj);
      per_key[{d.category, d.span}].push_back(values.at(&n).referents);
    });
  }
  ReferentMap out;
  for (auto& [key, sets] : per_key) out.emplace(key, union_sets(sets));
  return out;
}

RunStats run_stats(const AnnotatedForest& af, const FilterReport& report) {
  const ForestStats fs = forest_stats(af.forest);
  RunStats s;
  for (const auto& t : af.forest.tokens()) s.sentence += (s.sentence.empty() ? "" : " ") + t;
  s.trees_before = report.trees_before;
  s.trees_after = report.trees_after;
  s.disj_count = fs.disj_count;
  s.conj_count = fs.conj_count;
  s.unshared_node_count = fs.unshared_node_count;
  s.sharing_ratio = fs.sharing_ratio();
  s.reduction_ratio = report.trees_after == 0
                          ? 0.0
                          : report.trees_before.convert_to<double>() / report.trees_after.convert_to<double>();
  s.fallback_used = report.fallback_used;
  return s;
}

std::string format_ratio(double ratio) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f:1", ratio);
  return buf;
}

std::string format_stats_text(const RunStats& s) {
  std::string out;
  out += "sentence: " + s.sentence + "\n";
  out += "trees_before: " + s.trees_before.str() + "\n";
  out += "trees_after: " + s.trees_after.str() + "\n";
  out += "disj_nodes: " + std::to_string(s.disj_count) + "\n";
  out += "conj_nodes: " + std::to_string(s.conj_count) + "\n";
  out += "shared_nodes: " + std::to_string(s.disj_count + s.conj_count) + "\n";
  out += "unshared_nodes: " + s.unshared_node_count.str() + "\n";
  out += "sharing_ratio: " + format_ratio(s.sharing_ratio) + "\n";
  out += "reduction_ratio: " + format_ratio(s.reduction_ratio) + "\n";
  out += std::string("fallback: ") + (s.fallback_used ? "yes" : "no") + "\n";
  return out;
}

std::string format_stats_record(const RunStats& s) {
  return s.sentence + "\t" + s.trees_before.str() + "\t" + s.trees_after.str() + "\t" +
         std::to_string(s.disj_count) + "\t" + std::to_string(s.conj_count) + "\t" +
         s.unshared_node_count.str() + "\t" + (s.fallback_used ? "yes" : "no");
}

}  // namespace refforest
