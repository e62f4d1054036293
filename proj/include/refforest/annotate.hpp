#pragma once

#include <vector>
#include <string>

#include "refforest/algebra.hpp"
#include "refforest/error.hpp"
#include "refforest/forest.hpp"

namespace refforest {

struct AnnotationConfig {
  /// Noun-noun proximity threshold, in environment length units.
  double proximity_threshold = 1.0;
};

/// A forest with the potential referents of every node: the isomorphic
/// and-or graph of referent sets.
struct AnnotatedForest {
  Forest forest;
  std::vector<Annotation> disj;  // indexed by DisjId
  std::vector<Annotation> conj;  // indexed by ConjId
};

/// Annotation of a forest node failed; carries the node's "CAT[i,j)" label.
class AnnotationError : public CompositionError {
 public:
  AnnotationError(std::string node, const std::string& what)
      : CompositionError(node + ": " + what), node_(std::move(node)) {}
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

/// Referents of one rule application from its children's annotations.
/// Universal flags are only consumed by argument attachment; DetAttach passes
/// the right child's referents up with the determiner's flag.
Annotation apply_rule(const Rule& rule, const Annotation& left, const Annotation& right,
                      const EnvironmentDb& db, const AnnotationConfig& config);

/// Bottom-up annotation, each node computed once. Disjunctive nodes union
/// their alternatives; their flag is universal only if every alternative is.
/// Runs nodes of equal span length in parallel when built with OpenMP.
AnnotatedForest annotate_forest(const Forest& forest, const Grammar& grammar, const EnvironmentDb& db,
                                const AnnotationConfig& config = {});

/// Single-threaded reference for annotate_forest.
AnnotatedForest annotate_forest_serial(const Forest& forest, const Grammar& grammar,
                                       const EnvironmentDb& db, const AnnotationConfig& config = {});

/// Box labels with referent sets, for to_dot.
std::string annotated_dot(const AnnotatedForest& af, const Grammar& grammar, const EnvironmentDb& db);

}  // namespace refforest
