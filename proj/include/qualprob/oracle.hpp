#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qualprob/axioms.hpp"
#include "qualprob/realize.hpp"

namespace qualprob {

struct EnumerationResult {
  std::vector<CompleteOrdering> orderings;
  std::size_t total_count = 0;
  bool all_realizable = false;
};

namespace detail {

class QualitativeEnumerator {
 public:
  explicit QualitativeEnumerator(SpaceRef space) : space_(std::move(space)) {
    const Mask full = space_->full_mask();
    rank_.assign(space_->event_count(), kUnassigned);
    rank_[0] = 0;
    for (Mask m = 1; m < full; ++m) remaining_.push_back(m);
  }

  std::vector<std::vector<std::uint64_t>> run() {
    place(1);
    std::sort(found_.begin(), found_.end());
    return std::move(found_);
  }

 private:
  static constexpr int kUnassigned = -1;

  // Known comparison r(x) >= r(y)? Unassigned events outrank every assigned
  // one; two unassigned events are incomparable so far.
  std::optional<bool> known_ge(Mask x, Mask y) const {
    int rx = rank_[x], ry = rank_[y];
    if (rx != kUnassigned && ry != kUnassigned) return rx >= ry;
    if (rx == kUnassigned && ry == kUnassigned) return std::nullopt;
    return rx == kUnassigned;
  }

  bool theorem_consistent() const {
    const std::size_t n = rank_.size();
    for (std::size_t c = 1; c < n; ++c) {
      for (std::size_t a = 0; a < n; ++a) {
        if (a & c) continue;
        for (std::size_t b = 0; b < n; ++b) {
          if (b & c) continue;
          auto lhs = known_ge(static_cast<Mask>(a | c), static_cast<Mask>(b | c));
          if (!lhs) continue;
          auto rhs = known_ge(static_cast<Mask>(a), static_cast<Mask>(b));
          if (rhs && *lhs != *rhs) return false;
        }
      }
    }
    return true;
  }

  void place(int level) {
    if (remaining_.empty()) {
      rank_[space_->full_mask()] = level;
      if (theorem_consistent()) found_.emplace_back(rank_.begin(), rank_.end());
      rank_[space_->full_mask()] = kUnassigned;
      return;
    }
    const std::size_t k = remaining_.size();
    const std::vector<Mask> pool = remaining_;
    for (std::uint32_t pick = 1; pick < (1U << k); ++pick) {
      remaining_.clear();
      for (std::size_t i = 0; i < k; ++i) {
        if ((pick >> i) & 1U) rank_[pool[i]] = level;
        else remaining_.push_back(pool[i]);
      }
      if (theorem_consistent()) place(level + 1);
      for (std::size_t i = 0; i < k; ++i) {
        if ((pick >> i) & 1U) rank_[pool[i]] = kUnassigned;
      }
    }
    remaining_ = pool;
  }

  SpaceRef space_;
  std::vector<int> rank_;
  std::vector<Mask> remaining_;
  std::vector<std::vector<std::uint64_t>> found_;
};

}  // namespace detail

/// Every complete ordering of the space satisfying A1, A2, A3 (no certainty
/// assertions) and the disjoint-union theorem, in lexicographic order of rank
/// vectors. Symmetric variants are listed separately.
inline EnumerationResult enumerate_qualitative_probabilities(const SpaceRef& space) {
  if (space->world_count() > 3) {
    throw Error(ErrorCode::CapExceeded, "enumeration is limited to 3 worlds");
  }
  EnumerationResult result;
  for (auto& ranks : detail::QualitativeEnumerator(space).run()) {
    result.orderings.emplace_back(space, std::move(ranks));
  }
  result.total_count = result.orderings.size();
  result.all_realizable = std::all_of(result.orderings.begin(), result.orderings.end(), [](const auto& o) {
    auto out = realize_complete(o);
    auto* r = std::get_if<Realization>(&out);
    return r && r->margin.sign() > 0;
  });
  return result;
}

/// Deterministic random distribution with masses on a grid of 1/resolution.
///
/// Generator, for reproduction elsewhere: seed std::mt19937_64 with `seed`;
/// draw world_count - 1 cut points as `rng() % (resolution + 1)`; sort them;
/// with 0 prepended and `resolution` appended, world i receives
/// (cut[i+1] - cut[i]) / resolution.
inline Distribution random_rational_distribution(const SpaceRef& space, std::uint64_t seed,
                                                 std::uint64_t resolution) {
  if (resolution == 0) throw Error(ErrorCode::InvalidDistribution, "resolution must be positive");
  std::mt19937_64 rng(seed);
  const std::size_t n = space->world_count();
  std::vector<std::uint64_t> cuts{0};
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(rng() % (resolution + 1));
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(resolution);
  std::vector<Rational> mass;
  for (std::size_t i = 0; i < n; ++i) {
    mass.emplace_back(static_cast<std::int64_t>(cuts[i + 1] - cuts[i]), static_cast<std::int64_t>(resolution));
  }
  return Distribution(space, std::move(mass));
}

/// Fast qualitative-probability test (A2, A3 without assertions, theorem),
/// exhaustive regardless of size.
inline bool is_qualitative_probability(const CompleteOrdering& o) {
  const auto& r = o.ranks();
  const Mask full = o.space()->full_mask();
  if (!(r[full] > r[0])) return false;
  for (Mask m = 1; m < full; ++m) {
    if (!(r[0] < r[m] && r[m] < r[full])) return false;
  }
  const std::size_t n = r.size();
  for (std::size_t c = 1; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      if (a & c) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b & c) continue;
        if ((r[a | c] >= r[b | c]) != (r[a] >= r[b])) return false;
      }
    }
  }
  return true;
}

struct SearchOptions {
  std::size_t budget = 1000;  // candidate orderings examined
  std::uint64_t seed = 1;
};

/// Local search for a qualitative probability with no agreeing distribution.
///
/// Starts at the ordering induced by a random positive distribution and
/// repeatedly swaps two adjacent rank classes together with their complement
/// classes, keeping the move only if the result is still a qualitative
/// probability. Returns the first such ordering that fails to realize.
inline std::optional<CompleteOrdering> search_nonrepresentable(std::size_t world_count,
                                                               const SearchOptions& opts = {}) {
  if (world_count < 2 || world_count > 6) {
    throw Error(ErrorCode::CapExceeded, "search supports 2 to 6 worlds");
  }
  if (opts.budget == 0) return std::nullopt;
  auto space = Space::numbered_worlds(world_count);
  std::mt19937_64 rng(opts.seed);
  std::optional<CompleteOrdering> current;
  for (std::uint64_t s = opts.seed;; ++s) {
    auto p = random_rational_distribution(space, s, 1000);
    auto masses = p.masses();
    if (std::all_of(masses.begin(), masses.end(), [](const Rational& m) { return m.sign() > 0; })) {
      current = induced_ordering(p);
      break;
    }
  }
  std::size_t spent = 0;
  while (spent < opts.budget) {
    const auto& ranks = current->ranks();
    const std::size_t k = current->class_count();
    if (k < 4) break;
    // Swap middle classes i and i+1 (never the classes of F or T).
    auto i = static_cast<std::uint32_t>(1 + rng() % (k - 3));
    auto mirror = static_cast<std::uint32_t>(k - 1 - (i + 1));
    std::vector<std::uint64_t> next(ranks.begin(), ranks.end());
    auto swap_classes = [&](std::uint32_t lo) {
      for (std::size_t m = 0; m < next.size(); ++m) {
        if (ranks[m] == lo) next[m] = lo + 1;
        else if (ranks[m] == lo + 1) next[m] = lo;
      }
    };
    swap_classes(i);
    if (mirror != i && mirror + 1 != i && mirror != i + 1) swap_classes(mirror);
    ++spent;
    CompleteOrdering candidate(space, std::move(next));
    if (!is_qualitative_probability(candidate)) continue;
    current = candidate;
    if (std::holds_alternative<NonRealizable>(realize_complete(candidate))) {
      CheckOptions full_scan;
      full_scan.exhaustive_cap = world_count;
      if (!check_unconditional(candidate, {}, {}, full_scan).passes(Axiom::QualitativeProbability)) {
        throw std::logic_error("search produced an ordering that is not a qualitative probability");
      }
      return candidate;
    }
  }
  return std::nullopt;
}

}  // namespace qualprob
