#include "refforest/algebra.hpp"

#include <stdexcept>

#include "refforest/error.hpp"

namespace refforest {

namespace {

void require_unary(const ReferentSet& s, const char* what) {
  if (!s.empty() && s.arity() != 1) {
    throw CompositionError(std::string(what) + " must be 1-ary, got arity " + std::to_string(s.arity()));
  }
}

void require_relation(const ReferentSet& s) {
  if (!s.empty() && s.arity() < 2) {
    throw CompositionError("argument attachment needs a relation of arity >= 2, got arity " +
                           std::to_string(s.arity()));
  }
}

/// Marks every tuple of `relation` whose last element occurs in `argument`,
/// walking the last-element ordering against `argument` in lockstep.
std::vector<bool> mark_last_in(const ReferentSet& relation, const ReferentSet& argument) {
  std::vector<bool> keep(relation.size(), false);
  const auto order = relation.last_order();
  auto& cmp = comparison_count();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < order.size() && j < argument.size()) {
    const RefIdx x = relation.last(order[i]);
    const RefIdx a = argument.first(j);
    ++cmp;
    if (x < a) {
      ++i;
    } else if (a < x) {
      ++j;
    } else {
      keep[order[i]] = true;
      ++i;
    }
  }
  return keep;
}

bool same_prefix(const ReferentSet& s, std::size_t a, std::size_t b) {
  ++comparison_count();
  const auto ta = s[a];
  const auto tb = s[b];
  return compare_tuples(ta.first(ta.size() - 1), tb.first(tb.size() - 1)) == 0;
}

}  // namespace

Annotation leaf_referents(const LexEntry& entry, const EnvironmentDb& db) {
  return std::visit(
      [&db](const auto& p) -> Annotation {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TypePredicate>) {
          return {db.entities_of_type(p.keyword), QuantFlag::plain};
        } else if constexpr (std::is_same_v<T, Relation>) {
          const auto* rel = db.relation(p.name);
          return {rel ? rel->tuples : ReferentSet{}, QuantFlag::plain};
        } else if constexpr (std::is_same_v<T, Constant>) {
          auto idx = db.find(p.id);
          return {idx ? ReferentSet::singletons({*idx}) : ReferentSet{}, QuantFlag::plain};
        } else {
          return {ReferentSet{},
                  p.force == QuantForce::universal ? QuantFlag::universal : QuantFlag::plain};
        }
      },
      entry.payload);
}

ReferentSet compose_modifier(const ReferentSet& relation, const ReferentSet& modifier) {
  if (!modifier.empty() && modifier.arity() != 1) {
    throw CompositionError("unsaturated modifier: arity " + std::to_string(modifier.arity()));
  }
  if (relation.empty() || modifier.empty()) return {};

  auto& cmp = comparison_count();
  const std::size_t arity = relation.arity();
  std::vector<RefIdx> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < relation.size() && j < modifier.size()) {
    const RefIdx x = relation.first(i);
    const RefIdx m = modifier.first(j);
    ++cmp;
    if (x < m) {
      ++i;
    } else if (m < x) {
      ++j;
    } else {
      auto t = relation[i];
      out.insert(out.end(), t.begin(), t.end());
      ++i;
    }
  }
  return ReferentSet::from_sorted(arity, std::move(out));
}

ReferentSet compose_argument(const ReferentSet& relation, const ReferentSet& argument) {
  require_relation(relation);
  require_unary(argument, "argument");
  if (relation.empty() || argument.empty()) return {};

  const auto keep = mark_last_in(relation, argument);
  // Equal prefixes are contiguous in lexicographic order.
  const std::size_t arity = relation.arity();
  std::vector<RefIdx> out;
  std::size_t prev = relation.size();
  for (std::size_t r = 0; r < relation.size(); ++r) {
    if (!keep[r]) continue;
    if (prev != relation.size() && same_prefix(relation, prev, r)) continue;
    auto t = relation[r];
    out.insert(out.end(), t.begin(), t.end() - 1);
    prev = r;
  }
  return ReferentSet::from_sorted(arity - 1, std::move(out));
}

ReferentSet compose_argument_universal(const ReferentSet& relation, const ReferentSet& argument) {
  require_relation(relation);
  require_unary(argument, "argument");
  if (argument.empty()) {
    throw CompositionError("universal quantifier over an empty referent set");
  }
  if (relation.empty()) return {};

  const auto keep = mark_last_in(relation, argument);
  // A prefix qualifies when its group covers every argument; tuples are
  // unique, so counting kept members is enough.
  const std::size_t arity = relation.arity();
  std::vector<RefIdx> out;
  std::size_t r = 0;
  while (r < relation.size()) {
    std::size_t end = r + 1;
    while (end < relation.size() && same_prefix(relation, r, end)) ++end;
    std::size_t hits = 0;
    for (std::size_t k = r; k < end; ++k) hits += keep[k] ? 1 : 0;
    if (hits == argument.size()) {
      auto t = relation[r];
      out.insert(out.end(), t.begin(), t.end() - 1);
    }
    r = end;
  }
  return ReferentSet::from_sorted(arity - 1, std::move(out));
}

ReferentSet compose_noun_noun(const ReferentSet& modified, const ReferentSet& modifier,
                              const EnvironmentDb& db, double threshold) {
  require_unary(modified, "modified noun");
  require_unary(modifier, "modifier noun");
  if (modified.empty() || modifier.empty()) return {};

  auto position = [&db](RefIdx idx) -> const Position* {
    const Entity* e = db.entity(idx);
    return e && e->position ? &*e->position : nullptr;
  };
  std::vector<RefIdx> out;
  for (std::size_t i = 0; i < modified.size(); ++i) {
    const RefIdx x = modified.first(i);
    if (!position(x)) continue;
    for (std::size_t j = 0; j < modifier.size(); ++j) {
      const RefIdx y = modifier.first(j);
      if (position(y) && db.within_proximity(x, y, threshold)) {
        out.push_back(x);
        break;
      }
    }
  }
  return ReferentSet::from_sorted(1, std::move(out));
}

ReferentSet union_sets(std::span<const ReferentSet> sets) {
  if (sets.empty()) throw std::invalid_argument("union of an empty list of sets");
  std::size_t arity = 0;
  std::vector<const ReferentSet*> live;
  for (const auto& s : sets) {
    if (s.empty()) continue;
    if (arity != 0 && s.arity() != arity) {
      throw ArityError("union of sets with arities " + std::to_string(arity) + " and " +
                       std::to_string(s.arity()));
    }
    arity = s.arity();
    live.push_back(&s);
  }
  if (live.empty()) return {};
  if (live.size() == 1) return *live.front();

  // k is bounded by the number of alternatives of one node, so a linear scan
  // of the heads is cheaper than a heap.
  auto& cmp = comparison_count();
  std::vector<std::size_t> head(live.size(), 0);
  std::vector<RefIdx> out;
  std::span<const RefIdx> last;
  for (;;) {
    std::size_t best = live.size();
    for (std::size_t k = 0; k < live.size(); ++k) {
      if (head[k] >= live[k]->size()) continue;
      if (best == live.size()) {
        best = k;
        continue;
      }
      ++cmp;
      if (compare_tuples((*live[k])[head[k]], (*live[best])[head[best]]) < 0) best = k;
    }
    if (best == live.size()) break;
    auto t = (*live[best])[head[best]++];
    if (!last.empty()) {
      ++cmp;
      if (compare_tuples(t, last) == 0) continue;
    }
    out.insert(out.end(), t.begin(), t.end());
    last = t;
  }
  return ReferentSet::from_sorted(arity, std::move(out));
}

}  // namespace refforest
