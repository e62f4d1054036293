#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refforest/referent.hpp"

namespace refforest {

using Position = std::array<double, 3>;

struct Entity {
  ReferentId id;
  std::string type_keyword;
  std::optional<Position> position;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// An event or state, extended over [start, end] seconds.
struct Situation {
  ReferentId id;
  double start = 0;
  double end = 0;

  friend bool operator==(const Situation&, const Situation&) = default;
};

struct TimePoint {
  ReferentId id;
  double value = 0;

  friend bool operator==(const TimePoint&, const TimePoint&) = default;
};

struct RelationTable {
  std::string name;
  std::size_t arity = 0;
  ReferentSet tuples;

  friend bool operator==(const RelationTable&, const RelationTable&) = default;
};

/// Immutable database of the objects, events, and relations that ground
/// referent computation. All referent names share one namespace.
class EnvironmentDb {
 public:
  /// Parses the line-oriented environment format. Throws FormatError.
  static EnvironmentDb load(std::string_view text);

  /// |E|: entities + situations + timepoints.
  std::size_t size() const noexcept { return ids_.size(); }

  std::optional<RefIdx> find(std::string_view name) const;
  const ReferentId& id(RefIdx idx) const { return ids_.at(idx); }
  const std::string& name(RefIdx idx) const { return ids_.at(idx).name; }

  const std::vector<Entity>& entities() const noexcept { return entities_; }
  const std::vector<Situation>& situations() const noexcept { return situations_; }
  const std::vector<TimePoint>& timepoints() const noexcept { return timepoints_; }
  const std::map<std::string, RelationTable, std::less<>>& relations() const noexcept {
    return relations_;
  }

  /// Entity record for `idx`, or nullptr when idx is not an entity.
  const Entity* entity(RefIdx idx) const;

  /// 1-tuples of every entity whose type keyword equals `keyword`.
  ReferentSet entities_of_type(std::string_view keyword) const;

  bool has_relation(std::string_view name) const;
  const RelationTable* relation(std::string_view name) const;

  /// Tuples of a declared relation. Throws LookupError for unknown names.
  ReferentSet relation_set(std::string_view name) const;

  /// Euclidean distance between two positioned entities is <= threshold.
  /// Throws LookupError if either id is not an entity or has no position.
  bool within_proximity(RefIdx a, RefIdx b, double threshold) const;

  /// Emits the environment file format; loading the output yields an equal db.
  std::string serialize() const;

  /// "{b1, b2}" for 1-tuples, "{(s1,e1), (s2,e2)}" otherwise, "{}" when empty.
  std::string format(const ReferentSet& set) const;

  friend bool operator==(const EnvironmentDb& a, const EnvironmentDb& b);

 private:
  std::vector<ReferentId> ids_;  // indexed by RefIdx
  std::map<std::string, RefIdx, std::less<>> by_name_;
  std::vector<std::int32_t> entity_slot_;  // RefIdx -> index into entities_, or -1
  std::vector<Entity> entities_;
  std::vector<Situation> situations_;
  std::vector<TimePoint> timepoints_;
  std::map<std::string, RelationTable, std::less<>> relations_;
  std::map<std::string, ReferentSet, std::less<>> by_type_;
};

inline EnvironmentDb load_environment(std::string_view text) { return EnvironmentDb::load(text); }

/// Splits a line into whitespace-separated fields, dropping a `#` comment.
std::vector<std::string_view> split_fields(std::string_view line);

/// Parses a finite double; nullopt on junk or non-finite values.
std::optional<double> parse_finite(std::string_view field);

std::string format_number(double value);

}  // namespace refforest
