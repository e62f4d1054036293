#include "refforest/referent.hpp"

#include <algorithm>
#include <numeric>

#include "refforest/error.hpp"

namespace refforest {

const char* to_string(ReferentKind kind) noexcept {
  switch (kind) {
    case ReferentKind::entity:
      return "entity";
    case ReferentKind::situation:
      return "situation";
    case ReferentKind::timepoint:
      return "timepoint";
  }
  return "?";
}

std::uint64_t& comparison_count() noexcept {
  thread_local std::uint64_t count = 0;
  return count;
}

int compare_tuples(std::span<const RefIdx> a, std::span<const RefIdx> b) noexcept {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

ReferentSet ReferentSet::from_tuples(std::size_t arity, std::vector<RefIdx> flat) {
  if (arity == 0 || arity > kMaxArity) {
    throw ArityError("tuple arity " + std::to_string(arity) + " outside 1.." +
                     std::to_string(kMaxArity));
  }
  if (flat.size() % arity != 0) {
    throw ArityError("ragged tuple data for arity " + std::to_string(arity));
  }
  if (flat.empty()) return {};

  if (arity == 1) {
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    return from_sorted(1, std::move(flat));
  }

  const std::size_t rows = flat.size() / arity;
  auto row = [&](std::size_t r) { return std::span<const RefIdx>(flat.data() + r * arity, arity); };
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return compare_tuples(row(a), row(b)) < 0; });

  std::vector<RefIdx> out;
  out.reserve(flat.size());
  for (std::size_t k = 0; k < rows; ++k) {
    auto r = row(order[k]);
    if (k > 0 && compare_tuples(r, row(order[k - 1])) == 0) continue;
    out.insert(out.end(), r.begin(), r.end());
  }
  return from_sorted(arity, std::move(out));
}

ReferentSet ReferentSet::from_sorted(std::size_t arity, std::vector<RefIdx> flat) {
  if (flat.empty()) return {};
  auto body = std::make_shared<Body>();
  body->arity = arity;
  body->flat = std::move(flat);
  return ReferentSet(std::move(body));
}

std::size_t ReferentSet::size() const noexcept {
  return body_ ? body_->flat.size() / body_->arity : 0;
}

std::size_t ReferentSet::arity() const noexcept { return body_ ? body_->arity : 0; }

std::span<const RefIdx> ReferentSet::operator[](std::size_t i) const noexcept {
  return {body_->flat.data() + i * body_->arity, body_->arity};
}

std::span<const RefIdx> ReferentSet::flat() const noexcept {
  if (!body_) return {};
  return body_->flat;
}

std::span<const std::uint32_t> ReferentSet::last_order() const {
  if (!body_) return {};
  const Body& b = *body_;
  std::call_once(b.last_once, [&b] {
    const std::size_t rows = b.flat.size() / b.arity;
    RefIdx max_id = 0;
    for (std::size_t r = 0; r < rows; ++r) max_id = std::max(max_id, b.flat[r * b.arity + b.arity - 1]);
    // Stable counting sort on the last element; rows are already in
    // lexicographic order, so ties stay in whole-tuple order.
    std::vector<std::uint32_t> start(static_cast<std::size_t>(max_id) + 2, 0);
    for (std::size_t r = 0; r < rows; ++r) ++start[b.flat[r * b.arity + b.arity - 1] + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    b.by_last.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      b.by_last[start[b.flat[r * b.arity + b.arity - 1]]++] = static_cast<std::uint32_t>(r);
    }
  });
  return b.by_last;
}

bool ReferentSet::contains(std::span<const RefIdx> tuple) const noexcept {
  if (!body_ || tuple.size() != body_->arity) return false;
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const int c = compare_tuples((*this)[mid], tuple);
    if (c == 0) return true;
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return false;
}

bool operator==(const ReferentSet& a, const ReferentSet& b) noexcept {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return a.arity() == b.arity() && std::equal(a.flat().begin(), a.flat().end(), b.flat().begin());
}

}  // namespace refforest
