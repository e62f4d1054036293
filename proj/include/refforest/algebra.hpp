#pragma once

#include <span>

#include "refforest/env_store.hpp"
#include "refforest/grammar.hpp"
#include "refforest/referent.hpp"

namespace refforest {

enum class QuantFlag : std::uint8_t { plain, universal };

/// Potential referents of one forest node.
struct Annotation {
  ReferentSet referents;
  QuantFlag quant = QuantFlag::plain;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Referents contributed by a lexical entry:
///   predicate -> entities of that type; relation -> its tuples (empty if the
///   environment lacks it); constant -> the named id (empty if unknown);
///   quantifier -> no referents, universal force flags the annotation.
Annotation leaf_referents(const LexEntry& entry, const EnvironmentDb& db);

/// Modifier attachment: tuples of `relation` whose first element is in
/// `modifier`. Arity is preserved. One ordered merge on the first element.
/// Throws CompositionError when the modifier is not 1-ary (unsaturated).
ReferentSet compose_modifier(const ReferentSet& relation, const ReferentSet& modifier);

/// Argument attachment: prefixes <p...> with some <p..., x> in `relation` and
/// <x> in `argument`. Strips the last element. One ordered merge over the
/// relation's last-element ordering, then one pass to emit prefixes.
ReferentSet compose_argument(const ReferentSet& relation, const ReferentSet& argument);

/// Universally quantified argument: prefixes <p...> with <p..., x> in
/// `relation` for every <x> in `argument`. Throws CompositionError for an
/// empty argument, since the vacuous reading has no finite representation.
ReferentSet compose_argument_universal(const ReferentSet& relation, const ReferentSet& argument);

/// Noun-noun compound: members of `modified` lying within `threshold` of some
/// member of `modifier`. Ids without a position never match.
ReferentSet compose_noun_noun(const ReferentSet& modified, const ReferentSet& modifier,
                              const EnvironmentDb& db, double threshold);

/// Sorted union by k-way merge. Throws ArityError on mixed non-empty arities
/// and std::invalid_argument for an empty list.
ReferentSet union_sets(std::span<const ReferentSet> sets);

}  // namespace refforest
