#include "refforest/grammar.hpp"

#include <algorithm>

#include "refforest/env_store.hpp"
#include "refforest/error.hpp"
#include "refforest/referent.hpp"

namespace refforest {

const char* to_string(CompositionOp op) noexcept {
  switch (op) {
    case CompositionOp::modifier:
      return "modifier";
    case CompositionOp::argument:
      return "argument";
    case CompositionOp::noun_noun:
      return "nounnoun";
    case CompositionOp::det:
      return "det";
  }
  return "?";
}

namespace {

std::optional<CompositionOp> parse_op(std::string_view s) {
  if (s == "modifier") return CompositionOp::modifier;
  if (s == "argument") return CompositionOp::argument;
  if (s == "nounnoun") return CompositionOp::noun_noun;
  if (s == "det") return CompositionOp::det;
  return std::nullopt;
}

struct Line {
  std::size_t number;
  std::vector<std::string_view> fields;
};

}  // namespace

Grammar Grammar::load(std::string_view text) {
  std::vector<Line> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    auto fields = split_fields(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (!fields.empty()) lines.push_back({line_no, std::move(fields)});
  }

  Grammar g;
  // Categories first, so rules and lexicon may mention them in any order.
  for (const auto& [n, f] : lines) {
    if (f[0] != "cat") continue;
    if (f.size() < 2 || f.size() > 3 || (f.size() == 3 && f[2] != "referential")) {
      throw FormatError(n, "cat expects <Name> [referential]");
    }
    const auto id = static_cast<CatId>(g.categories_.size());
    if (!g.cat_by_name_.emplace(std::string(f[1]), id).second) {
      throw FormatError(n, "duplicate category '" + std::string(f[1]) + "'");
    }
    g.categories_.push_back({std::string(f[1]), f.size() == 3});
  }

  auto cat = [&g](std::size_t n, std::string_view name) {
    auto id = g.find_category(name);
    if (!id) throw FormatError(n, "unknown category '" + std::string(name) + "'");
    return *id;
  };

  for (const auto& [n, f] : lines) {
    const auto& kw = f[0];
    if (kw == "cat") continue;
    if (kw == "start") {
      if (f.size() != 2) throw FormatError(n, "start expects <Name>");
      const CatId id = cat(n, f[1]);
      if (std::find(g.start_.begin(), g.start_.end(), id) == g.start_.end()) g.start_.push_back(id);
    } else if (kw == "rule") {
      if (f.size() != 7 || f[2] != "->" || f[5] != ":") {
        throw FormatError(n, "rule expects <Parent> -> <Left> <Right> : <op>");
      }
      auto op = parse_op(f[6]);
      if (!op) throw FormatError(n, "unknown op '" + std::string(f[6]) + "'");
      Rule r{cat(n, f[1]), cat(n, f[3]), cat(n, f[4]), *op};
      if (std::find(g.rules_.begin(), g.rules_.end(), r) != g.rules_.end()) {
        throw FormatError(n, "duplicate rule");
      }
      g.rules_.push_back(r);
    } else if (kw == "lex") {
      if (f.size() < 5) throw FormatError(n, "lex expects <word> <Category> <kind> ...");
      LexEntry e{std::string(f[1]), cat(n, f[2]), {}};
      const auto& kind = f[3];
      if (kind == "pred" && f.size() == 5) {
        e.payload = TypePredicate{std::string(f[4])};
      } else if (kind == "const" && f.size() == 5) {
        e.payload = Constant{std::string(f[4])};
      } else if (kind == "quant" && f.size() == 5) {
        if (f[4] == "universal") {
          e.payload = Quantifier{QuantForce::universal};
        } else if (f[4] == "existential") {
          e.payload = Quantifier{QuantForce::existential};
        } else {
          throw FormatError(n, "quant expects universal|existential");
        }
      } else if (kind == "rel" && f.size() == 6) {
        auto arity = parse_finite(f[5]);
        if (!arity || *arity != static_cast<double>(static_cast<std::size_t>(*arity)) ||
            *arity < 2 || *arity > static_cast<double>(kMaxArity)) {
          throw FormatError(n, "relation arity must be an integer in 2.." + std::to_string(kMaxArity));
        }
        e.payload = Relation{std::string(f[4]), static_cast<std::size_t>(*arity)};
      } else {
        throw FormatError(n, "malformed lex entry");
      }
      if (std::find(g.entries_.begin(), g.entries_.end(), e) != g.entries_.end()) {
        throw FormatError(n, "duplicate lexical entry for '" + e.word + "'");
      }
      const auto id = static_cast<EntryId>(g.entries_.size());
      g.lexicon_[e.word].push_back(id);
      g.entries_.push_back(std::move(e));
    } else {
      throw FormatError(n, "unknown directive '" + std::string(kw) + "'");
    }
  }
  if (g.start_.empty()) throw FormatError(line_no, "no start category");
  std::sort(g.start_.begin(), g.start_.end());
  return g;
}

std::optional<CatId> Grammar::find_category(std::string_view name) const {
  auto it = cat_by_name_.find(name);
  if (it == cat_by_name_.end()) return std::nullopt;
  return it->second;
}

std::span<const EntryId> Grammar::entry_ids(std::string_view word) const {
  auto it = lexicon_.find(word);
  if (it == lexicon_.end()) return {};
  return it->second;
}

bool Grammar::is_start(CatId id) const { return std::binary_search(start_.begin(), start_.end(), id); }

std::string Grammar::serialize() const {
  std::string out;
  for (const auto& c : categories_) out += "cat " + c.name + (c.referential ? " referential\n" : "\n");
  for (CatId s : start_) out += "start " + categories_[s].name + "\n";
  for (const auto& r : rules_) {
    out += "rule " + categories_[r.parent].name + " -> " + categories_[r.left].name + " " +
           categories_[r.right].name + " : " + to_string(r.op) + "\n";
  }
  for (const auto& e : entries_) {
    out += "lex " + e.word + " " + categories_[e.category].name + " ";
    std::visit(
        [&out](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, TypePredicate>) {
            out += "pred " + p.keyword;
          } else if constexpr (std::is_same_v<T, Relation>) {
            out += "rel " + p.name + " " + std::to_string(p.arity);
          } else if constexpr (std::is_same_v<T, Constant>) {
            out += "const " + p.id;
          } else {
            out += p.force == QuantForce::universal ? "quant universal" : "quant existential";
          }
        },
        e.payload);
    out += "\n";
  }
  return out;
}

std::vector<LexEntry> lexical_lookup(const Grammar& grammar, std::string_view word) {
  std::vector<LexEntry> out;
  for (EntryId id : grammar.entry_ids(word)) out.push_back(grammar.entry(id));
  return out;
}

std::vector<std::string> validate_against_env(const Grammar& grammar, const EnvironmentDb& db) {
  std::vector<std::string> warnings;
  for (const auto& e : grammar.entries()) {
    const std::string where = "lex '" + e.word + "': ";
    if (const auto* p = std::get_if<TypePredicate>(&e.payload)) {
      if (db.entities_of_type(p->keyword).empty()) {
        warnings.push_back(where + "no entities of type \"" + p->keyword + "\"");
      }
    } else if (const auto* r = std::get_if<Relation>(&e.payload)) {
      const auto* table = db.relation(r->name);
      if (!table) {
        warnings.push_back(where + "relation \"" + r->name + "\" unknown (its referent set will be empty)");
      } else if (table->arity != r->arity) {
        warnings.push_back(where + "relation \"" + r->name + "\" declared with arity " +
                           std::to_string(r->arity) + " but environment has arity " +
                           std::to_string(table->arity));
      }
    } else if (const auto* c = std::get_if<Constant>(&e.payload)) {
      if (!db.find(c->id)) warnings.push_back(where + "unknown constant id \"" + c->id + "\"");
    }
  }
  return warnings;
}

}  // namespace refforest
