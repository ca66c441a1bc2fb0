#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qualprob/lp.hpp"
#include "qualprob/ordering.hpp"

namespace qualprob {

/// An agreeing distribution and the largest common gap by which it
/// separates strictly ordered events. Partial orderings without strict
/// judgments realize with margin zero.
struct Realization {
  Distribution distribution;
  Rational margin;
};

/// One comparison cited by an infeasibility certificate, with its multiplier.
struct CitedComparison {
  Judgment judgment;
  Rational multiplier;
};

/// The cited comparisons, together with p >= 0 and (when `uses_normalization`)
/// sum p = 1, admit no distribution honoring them.
struct NonRealizable {
  std::vector<CitedComparison> certificate;
  bool uses_normalization = false;

  PartialOrdering as_judgments(const SpaceRef& space) const {
    PartialOrdering po(space);
    for (const auto& c : certificate) po.add(c.judgment);
    return po;
  }
};

using RealizeOutcome = std::variant<Realization, NonRealizable>;

enum class RowRole { Nonnegative, Normalization, Comparison };

struct RowOrigin {
  RowRole role;
  std::size_t world = 0;            // Nonnegative
  std::optional<Judgment> judgment; // Comparison
};

/// Variables are one mass per world followed by the margin (when present).
struct RealizationProgram {
  LinearProgram program;
  std::vector<RowOrigin> rows;
  bool has_margin = false;
};

namespace detail {

inline std::vector<Rational> difference_row(const Event& lhs, const Event& rhs, std::size_t vars) {
  std::vector<Rational> row(vars);
  for (std::size_t w = 0; w < lhs.space()->world_count(); ++w) {
    int coef = static_cast<int>(lhs.contains(w)) - static_cast<int>(rhs.contains(w));
    if (coef) row[w] = Rational(coef);
  }
  return row;
}

enum class Encoding {
  MaxMargin,   // sum p = 1, strict rows p(a) - p(b) >= e, maximize e
  Feasibility, // sum p = 1, strict rows relaxed to >= 0, no margin
  Homogeneous, // no normalization, strict rows p(a) - p(b) >= 1
};

inline RealizationProgram encode(const SpaceRef& space, const std::vector<Judgment>& judgments,
                                 Encoding enc) {
  const std::size_t n = space->world_count();
  RealizationProgram rp;
  rp.has_margin = enc == Encoding::MaxMargin;
  const std::size_t vars = n + (rp.has_margin ? 1 : 0);
  rp.program = LinearProgram(vars);
  for (std::size_t w = 0; w < n; ++w) {
    std::vector<Rational> row(vars);
    row[w] = Rational(1);
    rp.program.add(std::move(row), ConstraintSense::GE, Rational());
    rp.rows.push_back({RowRole::Nonnegative, w, std::nullopt});
  }
  if (enc != Encoding::Homogeneous) {
    std::vector<Rational> row(vars);
    for (std::size_t w = 0; w < n; ++w) row[w] = Rational(1);
    rp.program.add(std::move(row), ConstraintSense::EQ, Rational(1));
    rp.rows.push_back({RowRole::Normalization, 0, std::nullopt});
  }
  for (const auto& j : judgments) {
    auto row = difference_row(j.lhs, j.rhs, vars);
    Rational rhs;
    ConstraintSense sense = ConstraintSense::GE;
    switch (j.rel) {
      case Relation::GT:
        if (enc == Encoding::MaxMargin) row[n] = Rational(-1);
        if (enc == Encoding::Homogeneous) rhs = Rational(1);
        break;
      case Relation::GE: break;
      case Relation::EQ: sense = ConstraintSense::EQ; break;
    }
    rp.program.add(std::move(row), sense, std::move(rhs));
    rp.rows.push_back({RowRole::Comparison, 0, j});
  }
  if (rp.has_margin) {
    rp.program.objective.assign(vars, Rational());
    rp.program.objective[n] = Rational(1);
  }
  return rp;
}

inline NonRealizable cite(const RealizationProgram& rp, const std::vector<Rational>& y) {
  NonRealizable out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i].is_zero()) continue;
    const auto& origin = rp.rows[i];
    if (origin.role == RowRole::Normalization) out.uses_normalization = true;
    if (origin.role == RowRole::Comparison) out.certificate.push_back({*origin.judgment, y[i]});
  }
  return out;
}

inline Distribution distribution_from(const SpaceRef& space, const std::vector<Rational>& point) {
  return Distribution(space, std::vector<Rational>(point.begin(),
                                                   point.begin() + static_cast<std::ptrdiff_t>(space->world_count())));
}

/// Strict semantics: GT judgments must hold strictly.
inline RealizeOutcome realize_judgments(const SpaceRef& space, const std::vector<Judgment>& judgments,
                                        const SolveOptions& options) {
  bool strict = std::any_of(judgments.begin(), judgments.end(),
                            [](const Judgment& j) { return j.rel == Relation::GT; });
  if (!strict) {
    auto uniform = Distribution::uniform(space);
    auto probs = uniform.event_probabilities();
    bool uniform_ok = std::all_of(judgments.begin(), judgments.end(), [&](const Judgment& j) {
      const auto& a = probs[j.lhs.mask()];
      const auto& b = probs[j.rhs.mask()];
      return j.rel == Relation::EQ ? a == b : a >= b;
    });
    if (uniform_ok) return Realization{uniform, Rational()};
    auto rp = encode(space, judgments, Encoding::Feasibility);
    auto out = solve(rp.program, options);
    if (auto* inf = std::get_if<Infeasible>(&out)) return cite(rp, inf->certificate);
    const auto& point = std::holds_alternative<Optimal>(out) ? std::get<Optimal>(out).point
                                                             : std::get<Unbounded>(out).point;
    return Realization{distribution_from(space, point), Rational()};
  }

  auto rp = encode(space, judgments, Encoding::MaxMargin);
  auto out = solve(rp.program, options);
  if (auto* inf = std::get_if<Infeasible>(&out)) return cite(rp, inf->certificate);
  // Strict rows give p(a) - p(b) <= 1, so the margin is always bounded.
  const auto& opt = std::get<Optimal>(out);
  if (opt.value.sign() > 0) return Realization{distribution_from(space, opt.point), opt.value};

  // Margin zero: the weak system is feasible but no strict gap survives.
  // The homogeneous form is infeasible exactly then and yields a certificate.
  auto hom = encode(space, judgments, Encoding::Homogeneous);
  auto hout = solve(hom.program, options);
  auto* hinf = std::get_if<Infeasible>(&hout);
  if (!hinf) throw std::logic_error("zero margin but homogeneous system is feasible");
  return cite(hom, hinf->certificate);
}

}  // namespace detail

/// Judgments equivalent to a complete ordering: each pair of adjacent rank
/// classes separated through their smallest-mask representatives, and each
/// class tied together along a chain in mask order.
inline PartialOrdering adjacent_judgments(const CompleteOrdering& o) {
  PartialOrdering po(o.space());
  auto classes = o.classes();
  const auto& s = o.space();
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto& cls = classes[k];
    for (std::size_t j = 0; j + 1 < cls.size(); ++j) {
      po.add(Judgment{Event(s, cls[j]), Event(s, cls[j + 1]), Relation::EQ,
                      "tie" + std::to_string(k) + "." + std::to_string(j)});
    }
    if (k > 0) {
      po.add(Judgment{Event(s, cls[0]), Event(s, classes[k - 1][0]), Relation::GT,
                      "gap" + std::to_string(k)});
    }
  }
  return po;
}

/// The max-margin program for a complete ordering: masses >= 0 summing to
/// one, p(upper) - p(lower) >= e across adjacent classes, equal masses within
/// each class, maximize e.
inline RealizationProgram build_program(const CompleteOrdering& o) {
  return detail::encode(o.space(), adjacent_judgments(o).judgments(), detail::Encoding::MaxMargin);
}

/// True iff rank comparisons in o match exact probability comparisons under p
/// for every pair of events.
inline bool agrees(const Distribution& p, const CompleteOrdering& o) {
  require_same_space(p.space(), o.space());
  return induced_ordering(p) == o;
}

/// An agreeing distribution with maximal margin, or a certificate.
inline RealizeOutcome realize_complete(const CompleteOrdering& o, const SolveOptions& options = {}) {
  auto out = detail::realize_judgments(o.space(), adjacent_judgments(o).judgments(), options);
  if (auto* r = std::get_if<Realization>(&out)) {
    if (!agrees(r->distribution, o)) {
      throw std::logic_error("realized distribution does not reproduce the ordering");
    }
  }
  return out;
}

/// Strict realization of asserted judgments: GT holds strictly, GE weakly,
/// EQ exactly. Maximizes the common strict margin when GT judgments exist.
inline RealizeOutcome realize_partial(const PartialOrdering& po, const SolveOptions& options = {}) {
  auto out = detail::realize_judgments(po.space(), po.judgments(), options);
  if (auto* r = std::get_if<Realization>(&out)) {
    auto probs = r->distribution.event_probabilities();
    for (const auto& j : po.judgments()) {
      const auto& a = probs[j.lhs.mask()];
      const auto& b = probs[j.rhs.mask()];
      bool ok = j.rel == Relation::GT ? a > b : j.rel == Relation::GE ? a >= b : a == b;
      if (!ok) throw std::logic_error("realization violates judgment " + j.id);
    }
  }
  return out;
}

}  // namespace qualprob
