#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace refforest {

enum class ReferentKind : std::uint8_t { entity, situation, timepoint };

const char* to_string(ReferentKind kind) noexcept;

/// Name of an environment referent. Ordered by kind, then name.
struct ReferentId {
  ReferentKind kind = ReferentKind::entity;
  std::string name;

  friend auto operator<=>(const ReferentId&, const ReferentId&) = default;
  friend bool operator==(const ReferentId&, const ReferentId&) = default;
};

/// Dense index of a referent inside one EnvironmentDb. The database assigns
/// indices in ReferentId order, so comparing indices compares ids.
using RefIdx = std::uint32_t;

inline constexpr std::size_t kMaxArity = 4;

/// Number of tuple comparisons made by the merge kernels on this thread.
/// Reset it before a measurement; the kernels only ever increment it.
std::uint64_t& comparison_count() noexcept;

/// Lexicographic three-way comparison of two equal-length tuples.
int compare_tuples(std::span<const RefIdx> a, std::span<const RefIdx> b) noexcept;

/// Sorted, duplicate-free set of uniform-arity referent tuples.
///
/// Storage is a flat row-major vector shared between copies. The empty set has
/// arity 0 ("unknown") and is compatible with every arity. Sets of arity >= 2
/// lazily build one alternate ordering keyed on the last tuple element, which
/// argument attachment merges against.
class ReferentSet {
 public:
  ReferentSet() = default;

  /// Sorts and deduplicates `flat`, read as rows of `arity` ids.
  /// Throws ArityError if arity is outside 1..kMaxArity or flat is ragged.
  static ReferentSet from_tuples(std::size_t arity, std::vector<RefIdx> flat);

  /// Trusted constructor: `flat` must already be sorted and duplicate-free.
  static ReferentSet from_sorted(std::size_t arity, std::vector<RefIdx> flat);

  static ReferentSet singletons(std::vector<RefIdx> ids) {
    return from_tuples(1, std::move(ids));
  }

  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  std::size_t arity() const noexcept;

  std::span<const RefIdx> operator[](std::size_t i) const noexcept;
  RefIdx first(std::size_t i) const noexcept { return (*this)[i].front(); }
  RefIdx last(std::size_t i) const noexcept { return (*this)[i].back(); }
  std::span<const RefIdx> flat() const noexcept;

  /// Tuple positions ordered by (last element, whole tuple). Built once on
  /// first use by a counting sort; safe to call from concurrent readers.
  std::span<const std::uint32_t> last_order() const;

  bool contains(std::span<const RefIdx> tuple) const noexcept;

  friend bool operator==(const ReferentSet& a, const ReferentSet& b) noexcept;

 private:
  struct Body {
    std::size_t arity = 0;
    std::vector<RefIdx> flat;
    mutable std::once_flag last_once;
    mutable std::vector<std::uint32_t> by_last;
  };

  explicit ReferentSet(std::shared_ptr<const Body> body) : body_(std::move(body)) {}

  std::shared_ptr<const Body> body_;
};

}  // namespace refforest
