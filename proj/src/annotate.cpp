#include "refforest/annotate.hpp"

#include <exception>

#include "refforest/error.hpp"

namespace refforest {

namespace {

[[noreturn]] void non_argument_quantifier() {
  throw CompositionError("quantified constituent in non-argument position");
}

void annotate_node(AnnotatedForest& af, DisjId d, const Grammar& grammar, const EnvironmentDb& db,
                   const AnnotationConfig& config) {
  const Forest& forest = af.forest;
  const DisjNode& node = forest.disj(d);
  try {
    std::vector<ReferentSet> sets;
    sets.reserve(node.alternatives.size());
    bool all_universal = true;
    for (ConjId c : node.alternatives) {
      const ConjNode& cn = forest.conj(c);
      Annotation a;
      if (cn.is_leaf()) {
        a = leaf_referents(grammar.entry(cn.leaf().entry), db);
      } else {
        const BranchAlt& b = cn.branch();
        a = apply_rule(grammar.rules()[b.rule], af.disj[b.left], af.disj[b.right], db, config);
      }
      all_universal = all_universal && a.quant == QuantFlag::universal;
      sets.push_back(a.referents);
      af.conj[c] = std::move(a);
    }
    af.disj[d] = {union_sets(sets), all_universal ? QuantFlag::universal : QuantFlag::plain};
  } catch (const Error& e) {
    throw AnnotationError(node_label(forest, grammar, d), e.what());
  } catch (const std::invalid_argument& e) {
    throw AnnotationError(node_label(forest, grammar, d), e.what());
  }
}

AnnotatedForest blank(const Forest& forest) {
  AnnotatedForest af{forest, {}, {}};
  af.disj.resize(forest.disj_nodes().size());
  af.conj.resize(forest.conj_nodes().size());
  return af;
}

}  // namespace

Annotation apply_rule(const Rule& rule, const Annotation& left, const Annotation& right,
                      const EnvironmentDb& db, const AnnotationConfig& config) {
  const bool left_u = left.quant == QuantFlag::universal;
  const bool right_u = right.quant == QuantFlag::universal;
  switch (rule.op) {
    case CompositionOp::modifier:
      if (left_u || right_u) non_argument_quantifier();
      return {compose_modifier(left.referents, right.referents), QuantFlag::plain};
    case CompositionOp::argument:
      if (left_u) non_argument_quantifier();
      return {right_u ? compose_argument_universal(left.referents, right.referents)
                      : compose_argument(left.referents, right.referents),
              QuantFlag::plain};
    case CompositionOp::noun_noun:
      if (left_u || right_u) non_argument_quantifier();
      // Head-final: the right noun is the one modified.
      return {compose_noun_noun(right.referents, left.referents, db, config.proximity_threshold),
              QuantFlag::plain};
    case CompositionOp::det:
      if (right_u) non_argument_quantifier();
      return {right.referents, left.quant};
  }
  throw CompositionError("unknown composition op");
}

AnnotatedForest annotate_forest_serial(const Forest& forest, const Grammar& grammar,
                                       const EnvironmentDb& db, const AnnotationConfig& config) {
  AnnotatedForest af = blank(forest);
  for (DisjId d = 0; d < forest.disj_nodes().size(); ++d) annotate_node(af, d, grammar, db, config);
  return af;
}

AnnotatedForest annotate_forest(const Forest& forest, const Grammar& grammar, const EnvironmentDb& db,
                                const AnnotationConfig& config) {
#ifdef _OPENMP
  AnnotatedForest af = blank(forest);
  const auto& disj = forest.disj_nodes();
  std::vector<std::exception_ptr> errors(disj.size());
  std::size_t lo = 0;
  while (lo < disj.size()) {
    // Ids are ordered by span length; one length is one independent wave.
    std::size_t hi = lo;
    while (hi < disj.size() && disj[hi].span.length() == disj[lo].span.length()) ++hi;
    const auto begin = static_cast<std::ptrdiff_t>(lo);
    const auto end = static_cast<std::ptrdiff_t>(hi);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t d = begin; d < end; ++d) {
      try {
        annotate_node(af, static_cast<DisjId>(d), grammar, db, config);
      } catch (...) {
        errors[static_cast<std::size_t>(d)] = std::current_exception();
      }
    }
    for (std::size_t d = lo; d < hi; ++d) {
      if (errors[d]) std::rethrow_exception(errors[d]);
    }
    lo = hi;
  }
  return af;
#else
  return annotate_forest_serial(forest, grammar, db, config);
#endif
}

std::string annotated_dot(const AnnotatedForest& af, const Grammar& grammar, const EnvironmentDb& db) {
  return to_dot(af.forest, grammar, [&](DisjId d) { return db.format(af.disj[d].referents); });
}

}  // namespace refforest
