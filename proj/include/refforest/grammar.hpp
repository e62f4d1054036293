#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace refforest {

class EnvironmentDb;

using CatId = std::uint32_t;
using RuleId = std::uint32_t;
using EntryId = std::uint32_t;

struct Category {
  std::string name;
  /// Noun-phrase or modifier class: its nodes are dispreferred when their
  /// referent set is empty.
  bool referential = false;

  friend bool operator==(const Category&, const Category&) = default;
};

enum class QuantForce : std::uint8_t { universal, existential };

struct TypePredicate {
  std::string keyword;
  friend bool operator==(const TypePredicate&, const TypePredicate&) = default;
};
struct Relation {
  std::string name;
  std::size_t arity = 2;
  friend bool operator==(const Relation&, const Relation&) = default;
};
struct Constant {
  std::string id;
  friend bool operator==(const Constant&, const Constant&) = default;
};
struct Quantifier {
  QuantForce force = QuantForce::existential;
  friend bool operator==(const Quantifier&, const Quantifier&) = default;
};

using SemPayload = std::variant<TypePredicate, Relation, Constant, Quantifier>;

struct LexEntry {
  std::string word;
  CatId category = 0;
  SemPayload payload;

  friend bool operator==(const LexEntry&, const LexEntry&) = default;
};

enum class CompositionOp : std::uint8_t { modifier, argument, noun_noun, det };

const char* to_string(CompositionOp op) noexcept;

/// Binary rule `parent -> left right`, composed by `op`.
struct Rule {
  CatId parent = 0;
  CatId left = 0;
  CatId right = 0;
  CompositionOp op = CompositionOp::modifier;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Binary context-free grammar whose lexicon carries semantic payloads.
/// Immutable after load.
class Grammar {
 public:
  /// Parses the grammar file format. Throws FormatError.
  static Grammar load(std::string_view text);

  const std::vector<Category>& categories() const noexcept { return categories_; }
  const Category& category(CatId id) const { return categories_.at(id); }
  std::optional<CatId> find_category(std::string_view name) const;

  const std::vector<LexEntry>& entries() const noexcept { return entries_; }
  const LexEntry& entry(EntryId id) const { return entries_.at(id); }
  /// Entry ids for `word` in declaration order; empty for unknown words.
  std::span<const EntryId> entry_ids(std::string_view word) const;

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const std::vector<CatId>& start_categories() const noexcept { return start_; }
  bool is_start(CatId id) const;

  /// Emits the grammar file format; loading the output yields an equal grammar.
  std::string serialize() const;

  friend bool operator==(const Grammar& a, const Grammar& b) {
    return a.categories_ == b.categories_ && a.entries_ == b.entries_ && a.rules_ == b.rules_ &&
           a.start_ == b.start_;
  }

 private:
  std::vector<Category> categories_;
  std::map<std::string, CatId, std::less<>> cat_by_name_;
  std::vector<LexEntry> entries_;
  std::map<std::string, std::vector<EntryId>, std::less<>> lexicon_;
  std::vector<Rule> rules_;
  std::vector<CatId> start_;  // sorted
};

inline Grammar load_grammar(std::string_view text) { return Grammar::load(text); }

/// All lexical entries for `word`, in declaration order.
std::vector<LexEntry> lexical_lookup(const Grammar& grammar, std::string_view word);

/// Non-fatal consistency report between a grammar's lexicon and a database.
std::vector<std::string> validate_against_env(const Grammar& grammar, const EnvironmentDb& db);

}  // namespace refforest
