#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "refforest/forest.hpp"

namespace refforest {

Forest::Forest(std::vector<std::string> tokens, std::vector<DisjNode> disj, std::vector<ConjNode> conj,
               std::vector<DisjId> roots)
    : tokens_(std::move(tokens)), disj_(std::move(disj)), conj_(std::move(conj)), roots_(std::move(roots)) {}

std::optional<DisjId> Forest::find(CatId category, Span span) const {
  // Canonical order is (length, start, category); binary search on that key.
  auto key = [](const DisjNode& d) { return std::tuple(d.span.length(), d.span.start, d.category); };
  const auto target = std::tuple(span.length(), span.start, category);
  auto it = std::lower_bound(disj_.begin(), disj_.end(), target,
                             [&](const DisjNode& d, const auto& t) { return key(d) < t; });
  if (it == disj_.end() || key(*it) != target || it->span != span) return std::nullopt;
  return static_cast<DisjId>(it - disj_.begin());
}

Forest Forest::subforest(const std::vector<bool>& disj_alive, const std::vector<bool>& conj_alive,
                         std::vector<DisjId>* disj_origin, std::vector<ConjId>* conj_origin) const {
  // Bottom-up derivability: children always precede parents.
  std::vector<bool> dok(disj_.size(), false);
  std::vector<bool> cok(conj_.size(), false);
  for (DisjId d = 0; d < disj_.size(); ++d) {
    if (!disj_alive[d]) continue;
    for (ConjId c : disj_[d].alternatives) {
      if (!conj_alive[c]) continue;
      const ConjNode& cn = conj_[c];
      cok[c] = cn.is_leaf() || (dok[cn.branch().left] && dok[cn.branch().right]);
      if (cok[c]) dok[d] = true;
    }
  }

  // Top-down reachability from derivable roots.
  std::vector<bool> reach(disj_.size(), false);
  for (DisjId r : roots_) {
    if (dok[r]) reach[r] = true;
  }
  for (DisjId d = static_cast<DisjId>(disj_.size()); d-- > 0;) {
    if (!reach[d]) continue;
    for (ConjId c : disj_[d].alternatives) {
      if (!cok[c] || conj_[c].is_leaf()) continue;
      reach[conj_[c].branch().left] = true;
      reach[conj_[c].branch().right] = true;
    }
  }

  constexpr DisjId kNone = std::numeric_limits<DisjId>::max();
  std::vector<DisjId> remap(disj_.size(), kNone);
  std::vector<DisjNode> disj;
  std::vector<DisjId> dorigin;
  for (DisjId d = 0; d < disj_.size(); ++d) {
    if (!reach[d]) continue;
    remap[d] = static_cast<DisjId>(disj.size());
    disj.push_back({disj_[d].category, disj_[d].span, {}});
    dorigin.push_back(d);
  }
  std::vector<ConjNode> conj;
  std::vector<ConjId> corigin;
  for (DisjId nd = 0; nd < disj.size(); ++nd) {
    for (ConjId c : disj_[dorigin[nd]].alternatives) {
      if (!cok[c]) continue;
      ConjNode node{nd, conj_[c].body};
      if (!node.is_leaf()) {
        auto& b = std::get<BranchAlt>(node.body);
        b.left = remap[b.left];
        b.right = remap[b.right];
      }
      disj[nd].alternatives.push_back(static_cast<ConjId>(conj.size()));
      conj.push_back(std::move(node));
      corigin.push_back(c);
    }
  }
  std::vector<DisjId> roots;
  for (DisjId r : roots_) {
    if (reach[r]) roots.push_back(remap[r]);
  }
  if (disj_origin) *disj_origin = std::move(dorigin);
  if (conj_origin) *conj_origin = std::move(corigin);
  return Forest(tokens_, std::move(disj), std::move(conj), std::move(roots));
}

std::vector<BigCount> tree_counts(const Forest& forest) {
  const auto& disj = forest.disj_nodes();
  std::vector<BigCount> count(disj.size());
  for (DisjId d = 0; d < disj.size(); ++d) {
    for (ConjId c : disj[d].alternatives) {
      const ConjNode& cn = forest.conj(c);
      if (cn.is_leaf()) {
        count[d] += 1;
      } else {
        count[d] += count[cn.branch().left] * count[cn.branch().right];
      }
    }
  }
  return count;
}

BigCount count_trees(const Forest& forest, std::optional<DisjId> node) {
  const auto counts = tree_counts(forest);
  if (node) return counts.at(*node);
  BigCount total = 0;
  for (DisjId r : forest.roots()) total += counts[r];
  return total;
}

std::vector<ParseTree> enumerate_trees(const Forest& forest, std::size_t limit) {
  using Sub = std::shared_ptr<const TreeNode>;
  const auto& disj = forest.disj_nodes();
  std::vector<std::vector<Sub>> memo(disj.size());
  for (DisjId d = 0; d < disj.size(); ++d) {
    auto& out = memo[d];
    for (ConjId c : disj[d].alternatives) {
      if (out.size() >= limit) break;
      const ConjNode& cn = forest.conj(c);
      if (cn.is_leaf()) {
        out.push_back(std::make_shared<const TreeNode>(TreeNode{d, c, nullptr, nullptr}));
        continue;
      }
      const auto& lefts = memo[cn.branch().left];
      const auto& rights = memo[cn.branch().right];
      for (const Sub& l : lefts) {
        for (const Sub& r : rights) {
          if (out.size() >= limit) break;
          out.push_back(std::make_shared<const TreeNode>(TreeNode{d, c, l, r}));
        }
        if (out.size() >= limit) break;
      }
    }
  }
  std::vector<ParseTree> trees;
  for (DisjId r : forest.roots()) {
    for (const Sub& t : memo[r]) {
      if (trees.size() >= limit) return trees;
      trees.push_back({t});
    }
  }
  return trees;
}

namespace {

void bracket_into(std::string& out, const TreeNode& node, const Forest& forest, const Grammar& grammar) {
  out += "(" + grammar.category(forest.disj(node.disj).category).name + " ";
  if (node.is_leaf()) {
    out += forest.tokens()[forest.conj(node.conj).leaf().token];
  } else {
    bracket_into(out, *node.left, forest, grammar);
    out += " ";
    bracket_into(out, *node.right, forest, grammar);
  }
  out += ")";
}

void visit(const TreeNode& node, const std::function<void(const TreeNode&)>& fn) {
  fn(node);
  if (!node.is_leaf()) {
    visit(*node.left, fn);
    visit(*node.right, fn);
  }
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string bracketed(const ParseTree& tree, const Forest& forest, const Grammar& grammar) {
  std::string out;
  bracket_into(out, *tree.root, forest, grammar);
  return out;
}

void for_each_node(const ParseTree& tree, const std::function<void(const TreeNode&)>& fn) {
  visit(*tree.root, fn);
}

double ForestStats::sharing_ratio() const {
  if (node_count() == 0) return 0.0;
  return unshared_node_count.convert_to<double>() / static_cast<double>(node_count());
}

ForestStats forest_stats(const Forest& forest) {
  ForestStats stats;
  stats.disj_count = forest.disj_nodes().size();
  stats.conj_count = forest.conj_nodes().size();

  // trees[d] and nodes[d] (total nodes over all trees rooted at d).
  const auto& disj = forest.disj_nodes();
  std::vector<BigCount> trees(disj.size());
  std::vector<BigCount> nodes(disj.size());
  for (DisjId d = 0; d < disj.size(); ++d) {
    for (ConjId c : disj[d].alternatives) {
      const ConjNode& cn = forest.conj(c);
      BigCount t;
      BigCount m;
      if (cn.is_leaf()) {
        t = 1;
        m = 1;
      } else {
        const DisjId l = cn.branch().left;
        const DisjId r = cn.branch().right;
        t = trees[l] * trees[r];
        m = nodes[l] * trees[r] + nodes[r] * trees[l] + t;
      }
      trees[d] += t;
      nodes[d] += m + t;  // the disjunctive node itself, once per tree
    }
  }
  for (DisjId r : forest.roots()) {
    stats.tree_count += trees[r];
    stats.unshared_node_count += nodes[r];
  }
  return stats;
}

std::string node_label(const Forest& forest, const Grammar& grammar, DisjId id) {
  const DisjNode& d = forest.disj(id);
  return grammar.category(d.category).name + "[" + std::to_string(d.span.start) + "," +
         std::to_string(d.span.end) + ")";
}

std::string to_dot(const Forest& forest, const Grammar& grammar,
                   const std::function<std::string(DisjId)>& extra_label) {
  std::ostringstream out;
  out << "digraph forest {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n";
  for (DisjId d = 0; d < forest.disj_nodes().size(); ++d) {
    std::string label = dot_escape(node_label(forest, grammar, d));
    if (extra_label) label += "\\n" + dot_escape(extra_label(d));
    const bool root = std::find(forest.roots().begin(), forest.roots().end(), d) != forest.roots().end();
    out << "  d" << d << " [shape=box" << (root ? ",peripheries=2" : "") << ",label=\"" << label << "\"];\n";
  }
  for (ConjId c = 0; c < forest.conj_nodes().size(); ++c) {
    const ConjNode& cn = forest.conj(c);
    out << "  c" << c << " [shape=circle,width=0.15,label=\"\"";
    if (cn.is_leaf()) out << ",xlabel=\"" << dot_escape(forest.tokens()[cn.leaf().token]) << "\"";
    out << "];\n";
    if (!cn.is_leaf()) {
      out << "  d" << cn.branch().left << " -> c" << c << ";\n";
      out << "  d" << cn.branch().right << " -> c" << c << ";\n";
    }
    out << "  c" << c << " -> d" << cn.parent << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace refforest
