#include <stdexcept>

#include "refforest/error.hpp"
#include "refforest/forest.hpp"

namespace refforest {

namespace {

struct ChartAlt {
  std::uint32_t source = 0;  // lexical entry or rule id
  std::uint32_t split = 0;   // split point for branches, token for leaves
  bool leaf = false;
};

/// Triangular CKY chart: one cell per (start, length), one alternative list per
/// category inside a cell.
class Chart {
 public:
  Chart(std::size_t n, std::size_t categories) : n_(n), cats_(categories), cells_(n * (n + 1) / 2) {
    for (auto& c : cells_) c.resize(categories);
  }

  std::vector<std::vector<ChartAlt>>& cell(std::size_t start, std::size_t length) {
    return cells_[index(start, length)];
  }
  const std::vector<std::vector<ChartAlt>>& cell(std::size_t start, std::size_t length) const {
    return cells_[index(start, length)];
  }
  std::size_t size() const noexcept { return n_; }
  std::size_t categories() const noexcept { return cats_; }

 private:
  std::size_t index(std::size_t start, std::size_t length) const {
    // Row for `length` holds n - length + 1 cells.
    const std::size_t before = (length - 1) * n_ - (length - 1) * (length - 2) / 2;
    return before + start;
  }

  std::size_t n_;
  std::size_t cats_;
  std::vector<std::vector<std::vector<ChartAlt>>> cells_;
};

Chart seed_chart(const Grammar& grammar, const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("cannot parse an empty token sequence");
  Chart chart(tokens.size(), grammar.categories().size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto ids = grammar.entry_ids(tokens[i]);
    if (ids.empty()) throw UnknownWordError(tokens[i], i + 1);
    auto& cell = chart.cell(i, 1);
    for (EntryId e : ids) {
      cell[grammar.entry(e).category].push_back({e, static_cast<std::uint32_t>(i), true});
    }
  }
  return chart;
}

// Alternatives come out in (rule order, split) order without sorting.
void fill_cell(const Grammar& grammar, Chart& chart, std::size_t start, std::size_t length) {
  auto& cell = chart.cell(start, length);
  const std::size_t end = start + length;
  const auto& rules = grammar.rules();
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const Rule& rule = rules[r];
    for (std::size_t split = start + 1; split < end; ++split) {
      if (chart.cell(start, split - start)[rule.left].empty()) continue;
      if (chart.cell(split, end - split)[rule.right].empty()) continue;
      cell[rule.parent].push_back(
          {static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(split), false});
    }
  }
}

Forest chart_to_forest(const Grammar& grammar, const Chart& chart,
                       const std::vector<std::string>& tokens) {
  const std::size_t n = chart.size();
  const std::size_t ncat = chart.categories();
  constexpr DisjId kNone = ~DisjId{0};

  // Canonical disjunctive order: (length, start, category).
  std::vector<std::vector<DisjId>> ids(n * (n + 1) / 2, std::vector<DisjId>(ncat, kNone));
  auto id_at = [&](std::size_t start, std::size_t length) -> std::vector<DisjId>& {
    return ids[(length - 1) * n - (length - 1) * (length - 2) / 2 + start];
  };
  std::vector<DisjNode> disj;
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t s = 0; s + len <= n; ++s) {
      const auto& cell = chart.cell(s, len);
      for (std::size_t c = 0; c < ncat; ++c) {
        if (cell[c].empty()) continue;
        id_at(s, len)[c] = static_cast<DisjId>(disj.size());
        disj.push_back({static_cast<CatId>(c),
                        {static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s + len)},
                        {}});
      }
    }
  }

  std::vector<ConjNode> conj;
  for (DisjId d = 0; d < disj.size(); ++d) {
    const auto& node = disj[d];
    for (const ChartAlt& alt : chart.cell(node.span.start, node.span.length())[node.category]) {
      ConjNode c{d, {}};
      if (alt.leaf) {
        c.body = LeafAlt{alt.source, alt.split};
      } else {
        const Rule& rule = grammar.rules()[alt.source];
        c.body = BranchAlt{alt.source, id_at(node.span.start, alt.split - node.span.start)[rule.left],
                           id_at(alt.split, node.span.end - alt.split)[rule.right]};
      }
      disj[d].alternatives.push_back(static_cast<ConjId>(conj.size()));
      conj.push_back(std::move(c));
    }
  }

  std::vector<DisjId> roots;
  for (CatId s : grammar.start_categories()) {
    if (DisjId d = id_at(0, n)[s]; d != kNone) roots.push_back(d);
  }

  Forest raw(tokens, std::move(disj), std::move(conj), std::move(roots));
  return raw.subforest(std::vector<bool>(raw.disj_nodes().size(), true),
                       std::vector<bool>(raw.conj_nodes().size(), true));
}

}  // namespace

Forest cky_parse_serial(const Grammar& grammar, const std::vector<std::string>& tokens) {
  Chart chart = seed_chart(grammar, tokens);
  const std::size_t n = tokens.size();
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t s = 0; s + len <= n; ++s) fill_cell(grammar, chart, s, len);
  }
  return chart_to_forest(grammar, chart, tokens);
}

Forest cky_parse(const Grammar& grammar, const std::vector<std::string>& tokens) {
#ifdef _OPENMP
  Chart chart = seed_chart(grammar, tokens);
  const auto n = static_cast<std::ptrdiff_t>(tokens.size());
  // Cells of one span length only read shorter spans, so a diagonal is
  // embarrassingly parallel.
  for (std::ptrdiff_t len = 2; len <= n; ++len) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s <= n - len; ++s) {
      fill_cell(grammar, chart, static_cast<std::size_t>(s), static_cast<std::size_t>(len));
    }
  }
  return chart_to_forest(grammar, chart, tokens);
#else
  return cky_parse_serial(grammar, tokens);
#endif
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < sentence.size()) {
    while (i < sentence.size() && space(sentence[i])) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !space(sentence[j])) ++j;
    if (j > i) out.emplace_back(sentence.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace refforest
