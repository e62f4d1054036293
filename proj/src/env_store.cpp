#include "refforest/env_store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "refforest/error.hpp"

namespace refforest {

std::vector<std::string_view> split_fields(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::optional<double> parse_finite(std::string_view field) {
  double value = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

struct PendingRel {
  std::size_t line;
  std::vector<std::string> members;
};

}  // namespace

EnvironmentDb EnvironmentDb::load(std::string_view text) {
  std::vector<Entity> entities;
  std::vector<Situation> situations;
  std::vector<TimePoint> timepoints;
  std::set<std::string, std::less<>> declared;
  std::map<std::string, std::vector<PendingRel>, std::less<>> rels;
  std::map<std::string, std::size_t, std::less<>> rel_arity;

  auto number = [](std::size_t line, std::string_view field) {
    auto v = parse_finite(field);
    if (!v) throw FormatError(line, "expected a finite number, got '" + std::string(field) + "'");
    return *v;
  };
  auto declare = [&](std::size_t line, std::string_view name) {
    if (!declared.emplace(name).second) {
      throw FormatError(line, "duplicate id '" + std::string(name) + "'");
    }
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto f = split_fields(line);
    if (f.empty()) continue;
    const auto& kw = f[0];
    if (kw == "entity") {
      if (f.size() != 3 && f.size() != 6) {
        throw FormatError(line_no, "entity expects <id> <type> [<x> <y> <z>]");
      }
      declare(line_no, f[1]);
      Entity e{{ReferentKind::entity, std::string(f[1])}, std::string(f[2]), std::nullopt};
      if (f.size() == 6) {
        e.position = Position{number(line_no, f[3]), number(line_no, f[4]), number(line_no, f[5])};
      }
      entities.push_back(std::move(e));
    } else if (kw == "situation") {
      if (f.size() != 4) throw FormatError(line_no, "situation expects <id> <start> <end>");
      declare(line_no, f[1]);
      Situation s{{ReferentKind::situation, std::string(f[1])}, number(line_no, f[2]),
                  number(line_no, f[3])};
      if (s.start > s.end) throw FormatError(line_no, "situation interval has start > end");
      situations.push_back(std::move(s));
    } else if (kw == "timepoint") {
      if (f.size() != 3) throw FormatError(line_no, "timepoint expects <id> <seconds>");
      declare(line_no, f[1]);
      timepoints.push_back({{ReferentKind::timepoint, std::string(f[1])}, number(line_no, f[2])});
    } else if (kw == "rel") {
      if (f.size() < 4) throw FormatError(line_no, "rel expects <name> and at least two ids");
      const std::size_t arity = f.size() - 2;
      if (arity > kMaxArity) {
        throw FormatError(line_no, "relation arity " + std::to_string(arity) + " exceeds " +
                                       std::to_string(kMaxArity));
      }
      std::string name(f[1]);
      auto [it, fresh] = rel_arity.emplace(name, arity);
      if (!fresh && it->second != arity) {
        throw FormatError(line_no, "relation '" + name + "' has arity " +
                                       std::to_string(it->second) + ", this line has " +
                                       std::to_string(arity));
      }
      PendingRel rel{line_no, {}};
      for (std::size_t i = 2; i < f.size(); ++i) {
        if (!declared.contains(f[i])) {
          throw FormatError(line_no, "unknown id '" + std::string(f[i]) + "'");
        }
        rel.members.emplace_back(f[i]);
      }
      rels[name].push_back(std::move(rel));
    } else {
      throw FormatError(line_no, "unknown directive '" + std::string(kw) + "'");
    }
  }

  EnvironmentDb db;
  for (const auto& e : entities) db.ids_.push_back(e.id);
  for (const auto& s : situations) db.ids_.push_back(s.id);
  for (const auto& t : timepoints) db.ids_.push_back(t.id);
  std::sort(db.ids_.begin(), db.ids_.end());
  for (std::size_t i = 0; i < db.ids_.size(); ++i) {
    db.by_name_.emplace(db.ids_[i].name, static_cast<RefIdx>(i));
  }

  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(entities.begin(), entities.end(), by_id);
  std::sort(situations.begin(), situations.end(), by_id);
  std::sort(timepoints.begin(), timepoints.end(), by_id);
  db.entities_ = std::move(entities);
  db.situations_ = std::move(situations);
  db.timepoints_ = std::move(timepoints);

  db.entity_slot_.assign(db.ids_.size(), -1);
  std::map<std::string, std::vector<RefIdx>, std::less<>> typed;
  for (std::size_t i = 0; i < db.entities_.size(); ++i) {
    const RefIdx idx = db.by_name_.at(db.entities_[i].id.name);
    db.entity_slot_[idx] = static_cast<std::int32_t>(i);
    typed[db.entities_[i].type_keyword].push_back(idx);
  }
  for (auto& [kw, ids] : typed) db.by_type_.emplace(kw, ReferentSet::singletons(std::move(ids)));

  for (auto& [name, lines] : rels) {
    const std::size_t arity = rel_arity.at(name);
    std::vector<RefIdx> flat;
    flat.reserve(lines.size() * arity);
    for (const auto& rel : lines) {
      for (const auto& m : rel.members) flat.push_back(db.by_name_.at(m));
    }
    db.relations_.emplace(name,
                          RelationTable{name, arity, ReferentSet::from_tuples(arity, std::move(flat))});
  }
  return db;
}

std::optional<RefIdx> EnvironmentDb::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const Entity* EnvironmentDb::entity(RefIdx idx) const {
  if (idx >= entity_slot_.size() || entity_slot_[idx] < 0) return nullptr;
  return &entities_[static_cast<std::size_t>(entity_slot_[idx])];
}

ReferentSet EnvironmentDb::entities_of_type(std::string_view keyword) const {
  auto it = by_type_.find(keyword);
  return it == by_type_.end() ? ReferentSet{} : it->second;
}

bool EnvironmentDb::has_relation(std::string_view name) const { return relations_.contains(name); }

const RelationTable* EnvironmentDb::relation(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

ReferentSet EnvironmentDb::relation_set(std::string_view name) const {
  const auto* rel = relation(name);
  if (!rel) throw LookupError("unknown relation '" + std::string(name) + "'");
  return rel->tuples;
}

bool EnvironmentDb::within_proximity(RefIdx a, RefIdx b, double threshold) const {
  auto located = [this](RefIdx idx) -> const Position& {
    const Entity* e = entity(idx);
    if (!e) throw LookupError("'" + (idx < ids_.size() ? ids_[idx].name : "?") + "' is not an entity");
    if (!e->position) throw LookupError("entity '" + e->id.name + "' has no position");
    return *e->position;
  };
  const Position& pa = located(a);
  const Position& pb = located(b);
  const double dx = pa[0] - pb[0];
  const double dy = pa[1] - pb[1];
  const double dz = pa[2] - pb[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz) <= threshold;
}

std::string EnvironmentDb::serialize() const {
  std::string out;
  for (const auto& e : entities_) {
    out += "entity " + e.id.name + " " + e.type_keyword;
    if (e.position) {
      for (double c : *e.position) out += " " + format_number(c);
    }
    out += "\n";
  }
  for (const auto& s : situations_) {
    out += "situation " + s.id.name + " " + format_number(s.start) + " " + format_number(s.end) + "\n";
  }
  for (const auto& t : timepoints_) {
    out += "timepoint " + t.id.name + " " + format_number(t.value) + "\n";
  }
  for (const auto& [name, rel] : relations_) {
    for (std::size_t i = 0; i < rel.tuples.size(); ++i) {
      out += "rel " + name;
      for (RefIdx m : rel.tuples[i]) out += " " + ids_[m].name;
      out += "\n";
    }
  }
  return out;
}

std::string EnvironmentDb::format(const ReferentSet& set) const {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i > 0) out += ", ";
    auto t = set[i];
    if (t.size() == 1) {
      out += ids_.at(t[0]).name;
      continue;
    }
    out += "(";
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k > 0) out += ",";
      out += ids_.at(t[k]).name;
    }
    out += ")";
  }
  return out + "}";
}

bool operator==(const EnvironmentDb& a, const EnvironmentDb& b) {
  return a.ids_ == b.ids_ && a.entities_ == b.entities_ && a.situations_ == b.situations_ &&
         a.timepoints_ == b.timepoints_ && a.relations_ == b.relations_;
}

}  // namespace refforest
