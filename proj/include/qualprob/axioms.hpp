#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qualprob/ordering.hpp"

namespace qualprob {

enum class Axiom {
  A1,
  A2,
  A3,
  A4,
  Theorem,
  H1,
  QualitativeProbability,
  A5Coherence,
  A4Conditional,
  A6,
  H2,
  Corollary,
};

inline std::string_view axiom_name(Axiom a) {
  switch (a) {
    case Axiom::A1: return "A1";
    case Axiom::A2: return "A2";
    case Axiom::A3: return "A3";
    case Axiom::A4: return "A4";
    case Axiom::Theorem: return "Theorem";
    case Axiom::H1: return "H1";
    case Axiom::QualitativeProbability: return "QualitativeProbability";
    case Axiom::A5Coherence: return "A5Coherence";
    case Axiom::A4Conditional: return "A4Conditional";
    case Axiom::A6: return "A6";
    case Axiom::H2: return "H2";
    case Axiom::Corollary: return "Corollary";
  }
  return "?";
}

/// Events of a violating tuple, labelled by role (`a`, `b`, `c`, ...).
struct Witness {
  std::vector<std::pair<std::string, Event>> events;
  std::vector<std::string> judgment_ids;
  std::string detail;

  const Event& event(std::string_view role) const {
    for (const auto& [r, e] : events) {
      if (r == role) return e;
    }
    throw std::out_of_range("no witness role " + std::string(role));
  }
};

struct Verdict {
  bool pass = true;
  std::optional<Witness> witness;
  bool sampled = false;
  std::string note;

  static Verdict ok(std::string note = {}) { return Verdict{true, std::nullopt, false, std::move(note)}; }
  static Verdict fail(Witness w) { return Verdict{false, std::move(w), false, {}}; }
};

struct CheckOptions {
  /// Largest world count scanned exhaustively by the cubic checks.
  std::size_t exhaustive_cap = 5;
  /// Above the cap, sample random tuples instead of failing with CapExceeded.
  bool allow_sampling = false;
  std::size_t samples = 20000;
  std::uint64_t seed = 1;
};

// ---------------------------------------------------------------------------
// Closure of raw judgments

/// Transitive closure of a judgment set over the events it mentions. EQ is
/// symmetric; a composite is strict when any link in it is.
class JudgmentClosure {
 public:
  explicit JudgmentClosure(const PartialOrdering& po) : space_(po.space()) {
    for (const auto& j : po.judgments()) {
      intern(j.lhs.mask());
      intern(j.rhs.mask());
    }
    const std::size_t n = events_.size();
    strength_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) at(i, i) = 1;
    for (const auto& j : po.judgments()) {
      auto l = index_.at(j.lhs.mask());
      auto r = index_.at(j.rhs.mask());
      edges_.push_back({l, r, j.rel == Relation::GT ? 2 : 1, j.id});
      if (j.rel == Relation::EQ) edges_.push_back({r, l, 1, j.id});
    }
    for (const auto& e : edges_) at(e.from, e.to) = std::max(at(e.from, e.to), e.strength);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!at(i, k)) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (!at(k, j)) continue;
          at(i, j) = std::max<int>(at(i, j), std::max(at(i, k), at(k, j)));
        }
      }
    }
  }

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<Mask>& events() const noexcept { return events_; }

  /// Strongest derived relation of a over b: GT, EQ (GE both ways), or GE.
  std::optional<Relation> relation(const Event& a, const Event& b) const {
    if (a.mask() == b.mask() && !index_.count(a.mask())) return Relation::EQ;
    auto ia = index_.find(a.mask());
    auto ib = index_.find(b.mask());
    if (ia == index_.end() || ib == index_.end()) return std::nullopt;
    int ab = strength_[ia->second * events_.size() + ib->second];
    int ba = strength_[ib->second * events_.size() + ia->second];
    if (ab == 2) return Relation::GT;
    if (ab == 1 && ba >= 1) return Relation::EQ;
    if (ab == 1) return Relation::GE;
    return std::nullopt;
  }

  bool consistent() const {
    const std::size_t n = events_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (strength_[i * n + j] == 2 && strength_[j * n + i] >= 1) return false;
      }
    }
    return true;
  }

  /// Judgment ids along the first contradictory cycle: a strict judgment
  /// followed by the shortest path back to its left-hand side.
  std::vector<std::string> cycle() const {
    for (const auto& e : edges_) {
      if (e.strength != 2) continue;
      auto path = shortest_path(e.to, e.from);
      if (!path) continue;
      std::vector<std::string> ids{e.id};
      for (auto k : *path) ids.push_back(edges_[k].id);
      return ids;
    }
    return {};
  }

  /// Fraction of unordered pairs of distinct events (over the whole space)
  /// that the closure relates.
  Rational coverage() const {
    const std::size_t n = events_.size();
    std::int64_t related = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (strength_[i * n + j] || strength_[j * n + i]) ++related;
      }
    }
    auto e = static_cast<std::int64_t>(space_->event_count());
    return Rational(related, e * (e - 1) / 2);
  }

 private:
  struct Edge {
    std::size_t from, to;
    int strength;
    std::string id;
  };

  int& at(std::size_t i, std::size_t j) { return strength_[i * events_.size() + j]; }

  void intern(Mask m) {
    if (index_.emplace(m, events_.size()).second) events_.push_back(m);
  }

  std::optional<std::vector<std::size_t>> shortest_path(std::size_t from, std::size_t to) const {
    if (from == to) return std::vector<std::size_t>{};
    std::vector<std::size_t> via(events_.size(), npos);
    std::vector<bool> seen(events_.size(), false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto& e = edges_[k];
        if (e.from != u || seen[e.to]) continue;
        seen[e.to] = true;
        via[e.to] = k;
        if (e.to == to) {
          std::vector<std::size_t> path;
          for (auto v = to; v != from; v = edges_[via[v]].from) path.push_back(via[v]);
          std::reverse(path.begin(), path.end());
          return path;
        }
        queue.push_back(e.to);
      }
    }
    return std::nullopt;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  SpaceRef space_;
  std::vector<Mask> events_;
  std::map<Mask, std::size_t> index_;
  std::vector<int> strength_;
  std::vector<Edge> edges_;
};

// ---------------------------------------------------------------------------

struct AxiomReport {
  std::map<Axiom, Verdict> verdicts;
  std::optional<Rational> coverage;
  std::optional<JudgmentClosure> closure;

  bool passes(Axiom a) const {
    auto it = verdicts.find(a);
    return it != verdicts.end() && it->second.pass;
  }
  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second.pass; });
  }
};

struct ConditionalReport {
  std::map<Axiom, Verdict> verdicts;

  bool passes(Axiom a) const {
    auto it = verdicts.find(a);
    return it != verdicts.end() && it->second.pass;
  }
  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second.pass; });
  }
};

// ---------------------------------------------------------------------------
// Single-tuple predicates. Each reports whether the tuple violates the named
// assumption; tuples outside an assumption's scope never violate it.

/// A4 over (a, b, c); c must sit strictly between F and T and ~c must not be
/// ranked with F, otherwise the tuple is out of scope.
inline bool violates_a4(const CompleteOrdering& o, Mask a, Mask b, Mask c) {
  const auto& r = o.ranks();
  Mask full = o.space()->full_mask();
  Mask nc = full & ~c;
  auto f = r[0], t = r[full];
  if (!(t > r[c] && r[c] > f) || r[nc] == f) return false;
  auto given_c = compare_values(r[a & c], r[b & c]);
  auto given_nc = compare_values(r[a & nc], r[b & nc]);
  if (given_c == Comparison::Less || given_nc == Comparison::Less) return false;
  bool strict = given_c == Comparison::Greater || given_nc == Comparison::Greater;
  return strict ? !(r[a] > r[b]) : !(r[a] >= r[b]);
}

/// Disjoint-union additivity: for a&c = b&c = F, r(a or c) >= r(b or c) iff r(a) >= r(b).
inline bool violates_theorem(const CompleteOrdering& o, Mask a, Mask b, Mask c) {
  if ((a & c) || (b & c)) return false;
  const auto& r = o.ranks();
  return (r[a | c] >= r[b | c]) != (r[a] >= r[b]);
}

/// Complementarity: r(a) >= r(b) implies r(~a) <= r(~b).
inline bool violates_h1(const CompleteOrdering& o, Mask a, Mask b) {
  const auto& r = o.ranks();
  Mask full = o.space()->full_mask();
  return r[a] >= r[b] && r[full & ~a] > r[full & ~b];
}

namespace detail {

inline bool contains_mask(const std::vector<Event>& events, Mask m) {
  return std::any_of(events.begin(), events.end(), [m](const Event& e) { return e.mask() == m; });
}

inline std::string rank_rel(std::uint32_t x, std::uint32_t y) {
  return x > y ? ">" : x == y ? "=" : "<";
}

inline Witness triple_witness(const SpaceRef& s, Mask a, Mask b, Mask c, std::string detail) {
  return Witness{{{"a", Event(s, a)}, {"b", Event(s, b)}, {"c", Event(s, c)}}, {}, std::move(detail)};
}

// Visits (a, b, c) in lexicographic mask order, or `samples` random tuples.
// Stops at the first tuple for which `visit` returns true.
template <typename Visit>
bool scan_triples(std::size_t events, bool sampled, const CheckOptions& opts, std::uint64_t salt,
                  Visit&& visit) {
  if (!sampled) {
    for (std::size_t a = 0; a < events; ++a)
      for (std::size_t b = 0; b < events; ++b)
        for (std::size_t c = 0; c < events; ++c)
          if (visit(static_cast<Mask>(a), static_cast<Mask>(b), static_cast<Mask>(c))) return true;
    return false;
  }
  std::mt19937_64 rng(opts.seed ^ salt);
  for (std::size_t k = 0; k < opts.samples; ++k) {
    auto a = static_cast<Mask>(rng() % events);
    auto b = static_cast<Mask>(rng() % events);
    auto c = static_cast<Mask>(rng() % events);
    if (visit(a, b, c)) return true;
  }
  return false;
}

inline bool use_sampling(std::size_t worlds, const CheckOptions& opts) {
  if (worlds <= opts.exhaustive_cap) return false;
  if (!opts.allow_sampling) {
    throw Error(ErrorCode::CapExceeded,
                std::to_string(worlds) + " worlds exceed the exhaustive-check cap of " +
                    std::to_string(opts.exhaustive_cap) + "; enable sampling to proceed");
  }
  return true;
}

}  // namespace detail

/// Checks A1-A4 and the disjoint-union theorem plus H1 and the composite
/// qualitative-probability verdict. Each failure carries the smallest
/// violating tuple in lexicographic mask order.
inline AxiomReport check_unconditional(const CompleteOrdering& o,
                                       const std::vector<Event>& certain_true = {},
                                       const std::vector<Event>& certain_false = {},
                                       const CheckOptions& opts = {}) {
  const auto& s = o.space();
  for (const auto& e : certain_true) require_same_space(s, e.space());
  for (const auto& e : certain_false) require_same_space(s, e.space());
  const bool sampled = detail::use_sampling(s->world_count(), opts);
  const auto& r = o.ranks();
  const std::size_t events = s->event_count();
  const Mask full = s->full_mask();
  const auto f = r[0], t = r[full];
  AxiomReport report;

  report.verdicts[Axiom::A1] = Verdict::ok("complete and transitive by representation");

  if (t > f) {
    report.verdicts[Axiom::A2] = Verdict::ok();
  } else {
    report.verdicts[Axiom::A2] = Verdict::fail(
        Witness{{{"T", Event::top(s)}, {"F", Event::bottom(s)}}, {}, "r(T) " + detail::rank_rel(t, f) + " r(F)"});
  }

  {
    Verdict v = Verdict::ok();
    for (std::size_t m = 0; m < events && v.pass; ++m) {
      auto mask = static_cast<Mask>(m);
      std::string why;
      bool asserted_true = mask == full || detail::contains_mask(certain_true, mask);
      bool asserted_false = mask == 0 || detail::contains_mask(certain_false, mask);
      if (r[m] > t) why = "ranked above T";
      else if (r[m] < f) why = "ranked below F";
      else if ((r[m] == t) != asserted_true)
        why = asserted_true ? "asserted certainly true but ranked below T"
                            : "ranked with T but not asserted certainly true";
      else if ((r[m] == f) != asserted_false)
        why = asserted_false ? "asserted certainly false but ranked above F"
                             : "ranked with F but not asserted certainly false";
      if (!why.empty()) v = Verdict::fail(Witness{{{"a", Event(s, mask)}}, {}, why});
    }
    report.verdicts[Axiom::A3] = std::move(v);
  }

  {
    Verdict v = Verdict::ok();
    detail::scan_triples(events, sampled, opts, 0xA4, [&](Mask a, Mask b, Mask c) {
      if (!violates_a4(o, a, b, c)) return false;
      Mask nc = full & ~c;
      v = Verdict::fail(detail::triple_witness(
          s, a, b, c,
          "r(a&c) " + detail::rank_rel(r[a & c], r[b & c]) + " r(b&c), r(a&~c) " +
              detail::rank_rel(r[a & nc], r[b & nc]) + " r(b&~c), but r(a) " +
              detail::rank_rel(r[a], r[b]) + " r(b)"));
      return true;
    });
    std::size_t skipped = 0;
    for (std::size_t c = 0; c < events; ++c) {
      if (t > r[c] && r[c] > f && r[full & ~c] == f) ++skipped;
    }
    if (skipped) {
      v.note = std::to_string(skipped) + " conditioner(s) skipped: ~c ranked with F";
    }
    v.sampled = sampled;
    report.verdicts[Axiom::A4] = std::move(v);
  }

  {
    Verdict v = Verdict::ok();
    detail::scan_triples(events, sampled, opts, 0x7E, [&](Mask a, Mask b, Mask c) {
      if (!violates_theorem(o, a, b, c)) return false;
      v = Verdict::fail(detail::triple_witness(
          s, a, b, c,
          "r(a or c) " + detail::rank_rel(r[a | c], r[b | c]) + " r(b or c) but r(a) " +
              detail::rank_rel(r[a], r[b]) + " r(b)"));
      return true;
    });
    v.sampled = sampled;
    report.verdicts[Axiom::Theorem] = std::move(v);
  }

  {
    Verdict v = Verdict::ok();
    auto visit = [&](Mask a, Mask b) {
      if (!violates_h1(o, a, b)) return false;
      v = Verdict::fail(Witness{{{"a", Event(s, a)}, {"b", Event(s, b)}},
                                {},
                                "r(a) " + detail::rank_rel(r[a], r[b]) + " r(b) but r(~a) " +
                                    detail::rank_rel(r[full & ~a], r[full & ~b]) + " r(~b)"});
      return true;
    };
    bool done = false;
    for (std::size_t a = 0; a < events && !done; ++a)
      for (std::size_t b = 0; b < events && !done; ++b)
        done = visit(static_cast<Mask>(a), static_cast<Mask>(b));
    report.verdicts[Axiom::H1] = std::move(v);
  }

  {
    std::string failing;
    for (auto a : {Axiom::A1, Axiom::A2, Axiom::A3, Axiom::Theorem}) {
      if (!report.passes(a)) failing += (failing.empty() ? "" : ", ") + std::string(axiom_name(a));
    }
    Verdict v = failing.empty() ? Verdict::ok("A1, A2, A3 and Theorem hold")
                                : Verdict{false, std::nullopt, false, "fails " + failing};
    v.sampled = sampled;
    report.verdicts[Axiom::QualitativeProbability] = std::move(v);
  }
  return report;
}

/// A1 for raw judgments: the transitive closure must not contain both
/// a > b and b >= a. Also reports how much of the space the closure relates.
inline AxiomReport check_partial(const PartialOrdering& po) {
  AxiomReport report;
  JudgmentClosure closure(po);
  if (closure.consistent()) {
    report.verdicts[Axiom::A1] = Verdict::ok();
  } else {
    auto ids = closure.cycle();
    Witness w;
    w.judgment_ids = ids;
    std::string path;
    for (const auto& id : ids) {
      const auto* j = po.find(id);
      if (!path.empty()) path += ", ";
      path += id;
      if (j) {
        w.events.emplace_back(id + ".lhs", j->lhs);
        w.events.emplace_back(id + ".rhs", j->rhs);
      }
    }
    w.detail = "contradictory cycle through " + path;
    report.verdicts[Axiom::A1] = Verdict::fail(std::move(w));
  }
  report.coverage = closure.coverage();
  report.closure = std::move(closure);
  return report;
}

// ---------------------------------------------------------------------------
// Conditional structures

namespace detail {

struct Link {
  std::int64_t u, v, w;
  std::array<Mask, 3> tuple;
  bool u_null, v_null;
};

// Tests that w = f(u, v) is a well-defined function, strictly increasing in
// u for each fixed non-null v and in v for each fixed non-null u.
inline Verdict functional_check(const std::vector<Link>& links, const SpaceRef& s,
                                const std::array<const char*, 3>& roles,
                                const std::array<const char*, 3>& args) {
  auto witness = [&](const Link& p, const Link& q, std::string detail) {
    Witness w;
    for (int k = 0; k < 3; ++k) w.events.emplace_back(std::string(roles[k]) + "1", Event(s, p.tuple[k]));
    for (int k = 0; k < 3; ++k) w.events.emplace_back(std::string(roles[k]) + "2", Event(s, q.tuple[k]));
    w.detail = std::move(detail);
    return w;
  };
  auto describe = [&](const Link& l) {
    return "(" + std::to_string(l.u) + ", " + std::to_string(l.v) + ") -> " + std::to_string(l.w);
  };
  std::map<std::pair<std::int64_t, std::int64_t>, const Link*> first;
  for (const auto& l : links) {
    auto [it, fresh] = first.emplace(std::make_pair(l.u, l.v), &l);
    if (!fresh && it->second->w != l.w) {
      return Verdict::fail(witness(*it->second, l,
                                   "not a function: " + describe(*it->second) + " but " + describe(l)));
    }
  }
  // Fixed v, increasing u.
  std::map<std::int64_t, std::vector<const Link*>> by_v, by_u;
  for (const auto& [key, l] : first) {
    if (!l->v_null) by_v[key.second].push_back(l);
  }
  for (const auto& [v, group] : by_v) {
    std::vector<const Link*> g = group;
    std::sort(g.begin(), g.end(), [](auto* x, auto* y) { return x->u < y->u; });
    for (std::size_t k = 1; k < g.size(); ++k) {
      if (!(g[k - 1]->w < g[k]->w)) {
        return Verdict::fail(witness(*g[k - 1], *g[k],
                                     std::string("not strictly increasing in ") + args[0] + " with " +
                                         args[1] + " held fixed: " + describe(*g[k - 1]) + ", " +
                                         describe(*g[k])));
      }
    }
  }
  for (const auto& [key, l] : first) {
    if (!l->u_null) by_u[key.first].push_back(l);
  }
  for (const auto& [u, group] : by_u) {
    std::vector<const Link*> g = group;
    std::sort(g.begin(), g.end(), [](auto* x, auto* y) { return x->v < y->v; });
    for (std::size_t k = 1; k < g.size(); ++k) {
      if (!(g[k - 1]->w < g[k]->w)) {
        return Verdict::fail(witness(*g[k - 1], *g[k],
                                     std::string("not strictly increasing in ") + args[1] + " with " +
                                         args[0] + " held fixed: " + describe(*g[k - 1]) + ", " +
                                         describe(*g[k])));
      }
    }
  }
  return Verdict::ok();
}

}  // namespace detail

/// Checks a conditional rank table: A5 coherence and A4 read through the
/// table, then the corollary r(b|a) = r(b&a|a) plus the combination rules
/// A6 and H2.
///
/// A6 and H2 are tested as: the combined rank is a well-defined function of
/// the two component ranks, strictly increasing in each while the other is
/// held fixed. Strictness is not demanded while the held-fixed component
/// sits at its conditioner's F level, where every product collapses.
/// Only tuples whose pairs all lie in the table's domain are examined.
inline ConditionalReport check_conditional(const ConditionalStructure& cs,
                                           const CheckOptions& opts = {}) {
  const auto& s = cs.space();
  const auto& o = cs.base();
  const auto& r = o.ranks();
  const std::size_t events = s->event_count();
  const Mask full = s->full_mask();
  if (cs.conditioners().empty()) {
    throw Error(ErrorCode::EmptyDomain, "conditional table has no valid conditioners");
  }
  const bool sampled = detail::use_sampling(s->world_count(), opts);
  auto def = [&](Mask a, Mask c) { return cs.defined(a, c); };
  auto tab = [&](Mask a, Mask c) { return cs.at(a, c); };
  auto is_null = [&](Mask a, Mask c) { return def(0, c) && tab(a, c) == tab(0, c); };
  ConditionalReport report;

  {
    Verdict v = Verdict::ok();
    detail::scan_triples(events, sampled, opts, 0xA5, [&](Mask a, Mask b, Mask c) {
      if (!def(a, c) || !def(b, c)) return false;
      bool table_ge = tab(a, c) >= tab(b, c);
      bool base_ge = r[a & c] >= r[b & c];
      if (table_ge == base_ge) return false;
      v = Verdict::fail(detail::triple_witness(
          s, a, b, c,
          "r(a|c) " + std::string(table_ge ? ">=" : "<") + " r(b|c) but r(a&c) " +
              detail::rank_rel(r[a & c], r[b & c]) + " r(b&c)"));
      return true;
    });
    v.sampled = sampled;
    report.verdicts[Axiom::A5Coherence] = std::move(v);
  }

  {
    Verdict v = Verdict::ok();
    const auto f = r[0], t = r[full];
    detail::scan_triples(events, sampled, opts, 0xA44, [&](Mask a, Mask b, Mask c) {
      Mask nc = full & ~c;
      if (!(t > r[c] && r[c] > f)) return false;
      if (!def(a, c) || !def(b, c) || !def(a, nc) || !def(b, nc)) return false;
      auto gc = compare_values(tab(a, c), tab(b, c));
      auto gn = compare_values(tab(a, nc), tab(b, nc));
      if (gc == Comparison::Less || gn == Comparison::Less) return false;
      bool strict = gc == Comparison::Greater || gn == Comparison::Greater;
      bool bad = strict ? !(r[a] > r[b]) : !(r[a] >= r[b]);
      if (!bad) return false;
      v = Verdict::fail(detail::triple_witness(
          s, a, b, c,
          "r(a|c) " + std::string(comparison_name(gc)) + " r(b|c), r(a|~c) " +
              std::string(comparison_name(gn)) + " r(b|~c), but r(a) " + detail::rank_rel(r[a], r[b]) +
              " r(b)"));
      return true;
    });
    v.sampled = sampled;
    report.verdicts[Axiom::A4Conditional] = std::move(v);
  }

  {
    Verdict v = Verdict::ok();
    for (std::size_t am = 0; am < events && v.pass; ++am) {
      for (std::size_t bm = 0; bm < events && v.pass; ++bm) {
        auto a = static_cast<Mask>(am), b = static_cast<Mask>(bm);
        if (!def(b, a) || !def(b & a, a)) continue;
        if (tab(b, a) != tab(b & a, a)) {
          v = Verdict::fail(Witness{{{"a", Event(s, a)}, {"b", Event(s, b)}},
                                    {},
                                    "r(b|a) = " + std::to_string(tab(b, a)) + " but r(b&a|a) = " +
                                        std::to_string(tab(b & a, a))});
        }
      }
    }
    report.verdicts[Axiom::Corollary] = std::move(v);
  }

  {
    // Chains x <= y <= z: enumerate z, then y within z, then x within y.
    std::vector<detail::Link> links;
    for (std::size_t zm = 0; zm < events; ++zm) {
      auto z = static_cast<Mask>(zm);
      for (Mask y = z;; y = (y - 1) & z) {
        for (Mask x = y;; x = (x - 1) & y) {
          if (def(x, y) && def(y, z) && def(x, z)) {
            links.push_back({tab(x, y), tab(y, z), tab(x, z), {x, y, z}, is_null(x, y), is_null(y, z)});
          }
          if (x == 0) break;
        }
        if (y == 0) break;
      }
    }
    std::sort(links.begin(), links.end(), [](const auto& p, const auto& q) { return p.tuple < q.tuple; });
    report.verdicts[Axiom::A6] =
        detail::functional_check(links, s, {"x", "y", "z"}, {"r(x|y)", "r(y|z)"});
    report.verdicts[Axiom::A6].note = "combined rank r(x|z) over chains x -> y -> z";
  }

  {
    std::vector<detail::Link> links;
    detail::scan_triples(events, sampled, opts, 0x42, [&](Mask a, Mask b, Mask c) {
      Mask bc = b & c;
      if (def(a, bc) && def(b, c) && def(a & b, c)) {
        links.push_back({tab(a, bc), tab(b, c), tab(a & b, c), {a, b, c}, is_null(a, bc), is_null(b, c)});
      }
      return false;
    });
    std::sort(links.begin(), links.end(), [](const auto& p, const auto& q) { return p.tuple < q.tuple; });
    Verdict v = detail::functional_check(links, s, {"a", "b", "c"}, {"r(a|b&c)", "r(b|c)"});
    v.sampled = sampled;
    v.note = "combined rank r(a&b|c)";
    report.verdicts[Axiom::H2] = std::move(v);
  }
  return report;
}

}  // namespace qualprob
