#pragma once

#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qualprob/axioms.hpp"
#include "qualprob/realize.hpp"

namespace qualprob {

/// The set of distributions honoring a judgment set, kept as its defining
/// constraints. Consistency is not assumed; is_empty answers it.
class CredalSet {
 public:
  explicit CredalSet(PartialOrdering judgments) : judgments_(std::move(judgments)) {}

  const SpaceRef& space() const noexcept { return judgments_.space(); }
  const PartialOrdering& judgments() const noexcept { return judgments_; }
  bool has_strict() const {
    const auto& js = judgments_.judgments();
    return std::any_of(js.begin(), js.end(), [](const Judgment& j) { return j.rel == Relation::GT; });
  }

 private:
  PartialOrdering judgments_;
};

/// Interval of p(event) over the closed relaxation. An `attained` flag is
/// false when the extreme value is reached only where some strict judgment
/// degenerates to equality.
struct Bounds {
  Rational lower;
  Rational upper;
  bool attained_lower = true;
  bool attained_upper = true;
};

struct Entailment {
  bool always = false;
  Rational minimum;                        // min p(a) - p(b)
  std::optional<Distribution> witness;     // set when !always
};

struct CredalOptions {
  SolveOptions solve;
  /// Exhaustive implication-pair scan up to this many worlds in prade_check.
  std::size_t prade_exhaustive_cap = 4;
  bool allow_sampling = false;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  /// Test-only fault injection: omit sum p = 1 from geometric queries.
  bool drop_normalization = false;
};

namespace detail {

// Closed relaxation (strict judgments weakened) with the given objective.
inline LinearProgram closed_program(const CredalSet& cs, const CredalOptions& opts) {
  auto rp = encode(cs.space(), cs.judgments().judgments(), Encoding::Feasibility);
  auto lp = std::move(rp.program);
  if (opts.drop_normalization) {
    for (std::size_t i = 0; i < rp.rows.size(); ++i) {
      if (rp.rows[i].role == RowRole::Normalization) {
        lp.constraints.erase(lp.constraints.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
  }
  return lp;
}

inline LpOutcome optimize_linear(const CredalSet& cs, std::vector<Rational> objective, ObjectiveSense sense,
                                 const CredalOptions& opts) {
  auto lp = closed_program(cs, opts);
  lp.objective = std::move(objective);
  lp.sense = sense;
  return solve(lp, opts.solve);
}

// Whether some point of the closed set with extra equality `pin` keeps every
// strict judgment strict. `scale_row`, when given, replaces sum p = 1 (used
// for the ratio-transformed program).
inline bool strictly_attainable(const CredalSet& cs, const Constraint& pin,
                                const std::optional<Constraint>& scale_row, const CredalOptions& opts) {
  if (!cs.has_strict()) return true;
  auto rp = encode(cs.space(), cs.judgments().judgments(), Encoding::MaxMargin);
  auto& lp = rp.program;
  if (scale_row) {
    for (std::size_t i = 0; i < rp.rows.size(); ++i) {
      if (rp.rows[i].role == RowRole::Normalization) {
        lp.constraints[i] = *scale_row;
        lp.constraints[i].coefficients.resize(lp.variable_count);
        break;
      }
    }
  }
  Constraint widened = pin;
  widened.coefficients.resize(lp.variable_count);
  lp.constraints.push_back(std::move(widened));
  auto out = solve(lp, opts.solve);
  if (std::holds_alternative<Unbounded>(out)) return true;
  if (auto* o = std::get_if<Optimal>(&out)) return o->value.sign() > 0;
  return false;
}

inline void require_nonempty(const CredalSet& cs, const CredalOptions& opts);

}  // namespace detail

/// Strict semantics: true iff no distribution honors every judgment.
inline bool is_empty(const CredalSet& cs, const CredalOptions& opts = {}) {
  return std::holds_alternative<NonRealizable>(realize_partial(cs.judgments(), opts.solve));
}

inline void detail::require_nonempty(const CredalSet& cs, const CredalOptions& opts) {
  if (is_empty(cs, opts)) throw Error(ErrorCode::EmptyCredalSet, "the judgments admit no distribution");
}

/// Whether p(a) >= p(b) for every distribution in the set (unanimity).
/// Otherwise the witness is a minimizer of p(a) - p(b), which honors every
/// judgment weakly and has p(a) < p(b).
inline Entailment entails(const CredalSet& cs, const Event& a, const Event& b, const CredalOptions& opts = {}) {
  require_same_space(cs.space(), a.space());
  require_same_space(cs.space(), b.space());
  detail::require_nonempty(cs, opts);
  auto out = detail::optimize_linear(cs, detail::difference_row(a, b, cs.space()->world_count()),
                                     ObjectiveSense::Minimize, opts);
  const auto& opt = std::get<Optimal>(out);
  Entailment e;
  e.minimum = opt.value;
  e.always = opt.value.sign() >= 0;
  if (!e.always) e.witness = detail::distribution_from(cs.space(), opt.point);
  return e;
}

inline Bounds bounds(const CredalSet& cs, const Event& a, const CredalOptions& opts = {}) {
  require_same_space(cs.space(), a.space());
  detail::require_nonempty(cs, opts);
  const auto n = cs.space()->world_count();
  auto row = detail::difference_row(a, Event::bottom(cs.space()), n);
  auto lo = detail::optimize_linear(cs, row, ObjectiveSense::Minimize, opts);
  auto hi = detail::optimize_linear(cs, row, ObjectiveSense::Maximize, opts);
  if (!std::holds_alternative<Optimal>(lo) || !std::holds_alternative<Optimal>(hi)) {
    throw std::logic_error("event probability is unbounded over the credal set");
  }
  Bounds b;
  b.lower = std::get<Optimal>(lo).value;
  b.upper = std::get<Optimal>(hi).value;
  b.attained_lower = detail::strictly_attainable(cs, Constraint{row, ConstraintSense::EQ, b.lower}, std::nullopt, opts);
  b.attained_upper = detail::strictly_attainable(cs, Constraint{row, ConstraintSense::EQ, b.upper}, std::nullopt, opts);
  return b;
}

/// Bounds of p(a & c) / p(c) over distributions with p(c) > 0. Substituting
/// q = p / p(c) turns the ratio into the linear objective q(a & c) subject to
/// q(c) = 1, q >= 0 and the (homogeneous) judgment rows.
inline Bounds cond_bounds(const CredalSet& cs, const Event& a, const Event& c, const CredalOptions& opts = {}) {
  require_same_space(cs.space(), a.space());
  require_same_space(cs.space(), c.space());
  auto pc = bounds(cs, c, opts);
  if (pc.upper.is_zero()) {
    throw Error(ErrorCode::ZeroProbabilityConditioner,
                "p(" + format_event(c) + ") is zero throughout the credal set");
  }
  const auto n = cs.space()->world_count();
  auto rp = detail::encode(cs.space(), cs.judgments().judgments(), detail::Encoding::Feasibility);
  Constraint scale{detail::difference_row(c, Event::bottom(cs.space()), n), ConstraintSense::EQ, Rational(1)};
  for (std::size_t i = 0; i < rp.rows.size(); ++i) {
    if (rp.rows[i].role == RowRole::Normalization) rp.program.constraints[i] = scale;
  }
  auto target = detail::difference_row(intersect(a, c), Event::bottom(cs.space()), n);
  auto run = [&](ObjectiveSense sense) {
    auto lp = rp.program;
    lp.objective = target;
    lp.sense = sense;
    auto out = solve(lp, opts.solve);
    if (!std::holds_alternative<Optimal>(out)) throw std::logic_error("conditional bound program not optimal");
    return std::get<Optimal>(out).value;
  };
  Bounds b;
  b.lower = run(ObjectiveSense::Minimize);
  b.upper = run(ObjectiveSense::Maximize);
  b.attained_lower = detail::strictly_attainable(cs, Constraint{target, ConstraintSense::EQ, b.lower}, scale, opts);
  b.attained_upper = detail::strictly_attainable(cs, Constraint{target, ConstraintSense::EQ, b.upper}, scale, opts);
  return b;
}

/// Self-test of the engine against what any set of distributions meets:
/// constants get p(F) = 0 and p(T) = 1, while a implies b gives
/// p(a) <= p(b) unanimously.
inline Verdict prade_check(const CredalSet& cs, const CredalOptions& opts = {}) {
  detail::require_nonempty(cs, opts);
  const auto& s = cs.space();
  const auto n = s->world_count();
  bool sampled = n > opts.prade_exhaustive_cap;
  if (sampled && !opts.allow_sampling) {
    throw Error(ErrorCode::CapExceeded, std::to_string(n) + " worlds exceed the implication-pair scan cap of " +
                                            std::to_string(opts.prade_exhaustive_cap));
  }
  auto extreme = [&](const Event& e, ObjectiveSense sense) -> std::optional<Rational> {
    auto out = detail::optimize_linear(cs, detail::difference_row(e, Event::bottom(s), n), sense, opts);
    if (auto* o = std::get_if<Optimal>(&out)) return o->value;
    return std::nullopt;
  };
  auto fail = [&](std::vector<std::pair<std::string, Event>> events, std::string why) {
    Verdict v = Verdict::fail(Witness{std::move(events), {}, std::move(why)});
    v.sampled = sampled;
    return v;
  };
  for (auto [e, expect] : {std::pair{Event::bottom(s), Rational(0)}, std::pair{Event::top(s), Rational(1)}}) {
    for (auto sense : {ObjectiveSense::Minimize, ObjectiveSense::Maximize}) {
      auto v = extreme(e, sense);
      if (!v || *v != expect) {
        return fail({{"a", e}}, std::string(sense == ObjectiveSense::Minimize ? "min" : "max") + " p(" +
                                    format_event(e) + ") is " + (v ? v->str() : "unbounded") + ", expected " +
                                    expect.str());
      }
    }
  }
  auto check_pair = [&](Mask a, Mask b) -> std::optional<Verdict> {
    Event ea(s, a), eb(s, b);
    auto out = detail::optimize_linear(cs, detail::difference_row(eb, ea, n), ObjectiveSense::Minimize, opts);
    auto* o = std::get_if<Optimal>(&out);
    if (!o || o->value.sign() < 0) {
      return fail({{"a", ea}, {"b", eb}}, "a implies b but p(a) > p(b) for some member");
    }
    return std::nullopt;
  };
  const std::size_t events = s->event_count();
  if (!sampled) {
    for (std::size_t b = 0; b < events; ++b) {
      auto bm = static_cast<Mask>(b);
      for (Mask a = bm;; a = (a - 1) & bm) {
        if (auto v = check_pair(a, bm)) return *v;
        if (a == 0) break;
      }
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    for (std::size_t k = 0; k < opts.samples; ++k) {
      auto b = static_cast<Mask>(rng() % events);
      auto a = static_cast<Mask>(rng() % events) & b;
      if (auto v = check_pair(a, b)) return *v;
    }
  }
  Verdict v = Verdict::ok();
  v.sampled = sampled;
  return v;
}

}  // namespace qualprob
