#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qualprob/algebra.hpp"
#include "qualprob/errors.hpp"
#include "qualprob/rational.hpp"

namespace qualprob {

enum class Comparison { Less, Equal, Greater };

inline std::string_view comparison_name(Comparison c) {
  switch (c) {
    case Comparison::Less: return "Less";
    case Comparison::Equal: return "Equal";
    case Comparison::Greater: return "Greater";
  }
  return "?";
}

template <typename T>
Comparison compare_values(const T& a, const T& b) {
  if (a < b) return Comparison::Less;
  if (b < a) return Comparison::Greater;
  return Comparison::Equal;
}

/// A total preorder over every event of a space, stored as a dense rank
/// array indexed by event mask. Ranks are renumbered on construction so they
/// occupy 0..K without gaps. The axioms are checked, not enforced, so
/// orderings violating them are representable.
class CompleteOrdering {
 public:
  CompleteOrdering(SpaceRef space, std::vector<std::uint64_t> ranks) : space_(std::move(space)) {
    if (space_->world_count() > 20) {
      throw Error(ErrorCode::CapExceeded, "complete orderings are capped at 20 worlds");
    }
    if (ranks.size() != space_->event_count()) {
      throw Error(ErrorCode::InvalidOrdering,
                  "rank table has " + std::to_string(ranks.size()) + " entries, expected " +
                      std::to_string(space_->event_count()));
    }
    std::vector<std::uint64_t> distinct = ranks;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    rank_.resize(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      rank_[i] = static_cast<std::uint32_t>(
          std::lower_bound(distinct.begin(), distinct.end(), ranks[i]) - distinct.begin());
    }
    class_count_ = distinct.size();
  }

  const SpaceRef& space() const noexcept { return space_; }
  std::uint32_t rank(Mask m) const { return rank_.at(m); }
  std::uint32_t rank(const Event& e) const {
    require_same_space(space_, e.space());
    return rank_[e.mask()];
  }
  const std::vector<std::uint32_t>& ranks() const noexcept { return rank_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::uint32_t top_rank() const { return rank_[space_->full_mask()]; }
  std::uint32_t bottom_rank() const { return rank_[0]; }

  /// Rank classes from lowest to highest; members ascend by mask.
  std::vector<std::vector<Mask>> classes() const {
    std::vector<std::vector<Mask>> out(class_count_);
    for (std::size_t m = 0; m < rank_.size(); ++m) out[rank_[m]].push_back(static_cast<Mask>(m));
    return out;
  }

  Comparison compare(const Event& a, const Event& b) const {
    require_same_space(a.space(), b.space());
    return compare_values(rank(a), rank(b));
  }

  /// Comparison of a and b given c, defined as the comparison of a&c with b&c.
  /// Conditioning on an event ranked with F is invalid.
  Comparison condition_compare(const Event& a, const Event& b, const Event& c) const {
    require_same_space(a.space(), b.space());
    require_same_space(a.space(), c.space());
    if (rank(c) == bottom_rank()) {
      throw Error(ErrorCode::InvalidConditioner,
                  "cannot condition on " + format_event(c) + ", which is ranked with F");
    }
    return compare(intersect(a, c), intersect(b, c));
  }

  friend bool operator==(const CompleteOrdering& a, const CompleteOrdering& b) {
    return same_space(a.space_, b.space_) && a.rank_ == b.rank_;
  }

 private:
  SpaceRef space_;
  std::vector<std::uint32_t> rank_;
  std::size_t class_count_ = 0;
};

inline Comparison compare(const CompleteOrdering& o, const Event& a, const Event& b) {
  return o.compare(a, b);
}
inline Comparison condition_compare(const CompleteOrdering& o, const Event& a, const Event& b,
                                    const Event& c) {
  return o.condition_compare(a, b, c);
}

// ---------------------------------------------------------------------------

enum class Relation { GT, GE, EQ };

inline std::string_view relation_symbol(Relation r) {
  switch (r) {
    case Relation::GT: return ">";
    case Relation::GE: return ">=";
    case Relation::EQ: return "=";
  }
  return "?";
}

inline std::optional<Relation> relation_from_symbol(std::string_view s) {
  if (s == ">") return Relation::GT;
  if (s == ">=") return Relation::GE;
  if (s == "=") return Relation::EQ;
  return std::nullopt;
}

struct Judgment {
  Event lhs;
  Event rhs;
  Relation rel;
  std::string id;
};

/// Asserted pairwise comparisons over one space.
class PartialOrdering {
 public:
  explicit PartialOrdering(SpaceRef space) : space_(std::move(space)) {}

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<Judgment>& judgments() const noexcept { return judgments_; }
  bool empty() const noexcept { return judgments_.empty(); }

  void add(Judgment j) {
    require_same_space(space_, j.lhs.space());
    require_same_space(space_, j.rhs.space());
    if (!ids_.insert(j.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate judgment id '" + j.id + "'");
    }
    judgments_.push_back(std::move(j));
  }

  /// Adds with a generated id `j<k>`.
  const Judgment& add(const Event& lhs, Relation rel, const Event& rhs) {
    std::string id;
    do {
      id = "j" + std::to_string(++counter_);
    } while (ids_.count(id));
    add(Judgment{lhs, rhs, rel, id});
    return judgments_.back();
  }

  const Judgment* find(std::string_view id) const {
    for (const auto& j : judgments_) {
      if (j.id == id) return &j;
    }
    return nullptr;
  }

 private:
  SpaceRef space_;
  std::vector<Judgment> judgments_;
  std::set<std::string, std::less<>> ids_;
  std::size_t counter_ = 0;
};

/// Mass per world, non-negative and summing to exactly one.
class Distribution {
 public:
  Distribution(SpaceRef space, std::vector<Rational> mass)
      : space_(std::move(space)), mass_(std::move(mass)) {
    if (mass_.size() != space_->world_count()) {
      throw Error(ErrorCode::InvalidDistribution,
                  "distribution has " + std::to_string(mass_.size()) + " masses for " +
                      std::to_string(space_->world_count()) + " worlds");
    }
    Rational total;
    for (const auto& m : mass_) {
      if (m.sign() < 0) throw Error(ErrorCode::InvalidDistribution, "negative mass " + m.str());
      total += m;
    }
    if (total != Rational(1)) {
      throw Error(ErrorCode::InvalidDistribution, "masses sum to " + total.str() + ", not 1");
    }
  }

  static Distribution uniform(SpaceRef space) {
    std::vector<Rational> mass(space->world_count(),
                               Rational(1, static_cast<std::int64_t>(space->world_count())));
    return Distribution(std::move(space), std::move(mass));
  }

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<Rational>& masses() const noexcept { return mass_; }
  const Rational& mass(std::size_t world) const { return mass_.at(world); }

  Rational probability(Mask m) const {
    Rational p;
    for (std::size_t w = 0; w < mass_.size(); ++w) {
      if ((m >> w) & 1U) p += mass_[w];
    }
    return p;
  }
  Rational probability(const Event& e) const {
    require_same_space(space_, e.space());
    return probability(e.mask());
  }

  /// Probability of every event, indexed by mask.
  std::vector<Rational> event_probabilities() const {
    std::vector<Rational> out(space_->event_count());
    for (std::size_t m = 1; m < out.size(); ++m) {
      std::size_t low = static_cast<std::size_t>(std::countr_zero(static_cast<Mask>(m)));
      out[m] = out[m & (m - 1)] + mass_[low];
    }
    return out;
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return same_space(a.space_, b.space_) && a.mass_ == b.mass_;
  }

 private:
  SpaceRef space_;
  std::vector<Rational> mass_;
};

namespace detail {

/// Dense ranks of `values`: equal values share a rank, larger values rank higher.
template <typename T>
std::vector<std::uint64_t> dense_ranks(const std::vector<T>& values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::uint64_t> out(values.size());
  std::uint64_t r = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && values[order[k - 1]] < values[order[k]]) ++r;
    out[order[k]] = r;
  }
  return out;
}

}  // namespace detail

/// The ordering p agrees with: rank(a) >= rank(b) iff p(a) >= p(b).
inline CompleteOrdering induced_ordering(const Distribution& p) {
  return CompleteOrdering(p.space(), detail::dense_ranks(p.event_probabilities()));
}

// ---------------------------------------------------------------------------

/// Conditional ranks r(a | c) on a scale comparable across conditioners.
///
/// The base ordering alone does not fix cross-conditioner comparisons, so
/// the table is supplied explicitly or induced from a distribution. Pairs
/// whose conditioner is ranked with F are outside the domain.
class ConditionalStructure {
 public:
  static constexpr std::int64_t kUndefined = -1;
  static constexpr std::size_t kMaxWorlds = 10;

  explicit ConditionalStructure(CompleteOrdering base) : base_(std::move(base)) {
    if (base_.space()->world_count() > kMaxWorlds) {
      throw Error(ErrorCode::CapExceeded, "conditional structures are capped at " +
                                              std::to_string(kMaxWorlds) + " worlds");
    }
    auto n = base_.space()->event_count();
    table_.assign(n * n, kUndefined);
  }

  const SpaceRef& space() const noexcept { return base_.space(); }
  const CompleteOrdering& base() const noexcept { return base_; }

  bool valid_conditioner(Mask c) const { return base_.rank(c) > base_.bottom_rank(); }

  void set(Mask a, Mask c, std::uint64_t rank) {
    if (!valid_conditioner(c)) {
      throw Error(ErrorCode::InvalidConditioner,
                  "conditioner " + format_event(Event(space(), c)) + " is ranked with F");
    }
    table_[index(a, c)] = static_cast<std::int64_t>(rank);
  }
  void set(const Event& a, const Event& c, std::uint64_t rank) {
    require_same_space(space(), a.space());
    require_same_space(space(), c.space());
    set(a.mask(), c.mask(), rank);
  }

  bool defined(Mask a, Mask c) const { return table_[index(a, c)] != kUndefined; }
  std::optional<std::int64_t> rank(Mask a, Mask c) const {
    auto v = table_[index(a, c)];
    if (v == kUndefined) return std::nullopt;
    return v;
  }
  std::optional<std::int64_t> rank(const Event& a, const Event& c) const {
    return rank(a.mask(), c.mask());
  }
  /// Unchecked lookup for callers that already know (a, c) is defined.
  std::int64_t at(Mask a, Mask c) const { return table_[index(a, c)]; }

  std::size_t domain_size() const {
    return static_cast<std::size_t>(
        std::count_if(table_.begin(), table_.end(), [](auto v) { return v != kUndefined; }));
  }

  /// Conditioners with at least one defined entry, ascending.
  std::vector<Mask> conditioners() const {
    std::vector<Mask> out;
    auto n = space()->event_count();
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t a = 0; a < n; ++a) {
        if (table_[c * n + a] != kUndefined) {
          out.push_back(static_cast<Mask>(c));
          break;
        }
      }
    }
    return out;
  }

  friend bool operator==(const ConditionalStructure& a, const ConditionalStructure& b) {
    return a.base_ == b.base_ && a.table_ == b.table_;
  }

 private:
  std::size_t index(Mask a, Mask c) const {
    return static_cast<std::size_t>(c) * space()->event_count() + a;
  }

  CompleteOrdering base_;
  std::vector<std::int64_t> table_;
};

/// Conditional ranks ordered by the exact ratio p(a & c) / p(c) over every
/// pair with p(c) > 0; one scale shared by all conditioners.
inline ConditionalStructure induced_conditional(const Distribution& p) {
  ConditionalStructure cs(induced_ordering(p));
  auto probs = p.event_probabilities();
  auto n = probs.size();
  std::vector<std::pair<Mask, Mask>> pairs;
  std::vector<Rational> ratios;
  for (std::size_t c = 0; c < n; ++c) {
    if (probs[c].is_zero()) continue;
    for (std::size_t a = 0; a < n; ++a) {
      pairs.emplace_back(static_cast<Mask>(a), static_cast<Mask>(c));
      ratios.push_back(probs[a & c] / probs[c]);
    }
  }
  auto ranks = detail::dense_ranks(ratios);
  for (std::size_t i = 0; i < pairs.size(); ++i) cs.set(pairs[i].first, pairs[i].second, ranks[i]);
  return cs;
}

}  // namespace qualprob
