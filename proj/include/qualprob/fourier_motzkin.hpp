#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "qualprob/lp.hpp"

namespace qualprob {

struct FourierMotzkinLimits {
  std::size_t max_variables = 8;
  std::size_t max_constraints = 16;
  std::size_t max_intermediate_rows = 200000;
};

namespace detail {

// a.x <= b, stored as coefficients followed by b.
using FmRow = std::vector<Rational>;

inline void fm_normalize(FmRow& row) {
  // Scale so the first nonzero coefficient has magnitude one.
  for (std::size_t j = 0; j + 1 < row.size(); ++j) {
    if (row[j].is_zero()) continue;
    Rational s = Rational(1) / abs(row[j]);
    for (auto& v : row) v *= s;
    return;
  }
  // Ground row 0 <= b: only the sign of b matters.
  auto& b = row.back();
  b = Rational(b.sign());
}

}  // namespace detail

/// Feasibility by eliminating variables one at a time. Doubly exponential,
/// so the program size is capped; it serves as an independent check of the
/// simplex verdict on small systems. The objective is ignored.
inline bool fourier_motzkin_feasible(const LinearProgram& lp,
                                     const FourierMotzkinLimits& limits = {}) {
  lp.validate();
  if (lp.variable_count > limits.max_variables || lp.constraints.size() > limits.max_constraints) {
    throw Error(ErrorCode::SizeCapExceeded,
                "Fourier-Motzkin is capped at " + std::to_string(limits.max_variables) +
                    " variables and " + std::to_string(limits.max_constraints) + " constraints");
  }
  const std::size_t n = lp.variable_count;
  std::set<detail::FmRow> rows;
  auto push = [&](std::vector<Rational> a, Rational b, bool negate) {
    detail::FmRow row(std::move(a));
    row.push_back(std::move(b));
    if (negate) {
      for (auto& v : row) v = -v;
    }
    detail::fm_normalize(row);
    rows.insert(std::move(row));
  };
  for (const auto& c : lp.constraints) {
    if (c.sense != ConstraintSense::GE) push(c.coefficients, c.rhs, false);
    if (c.sense != ConstraintSense::LE) push(c.coefficients, c.rhs, true);
  }

  std::vector<bool> eliminated(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    // Pick the variable producing the fewest combinations.
    std::size_t pick = n;
    std::size_t best = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (eliminated[j]) continue;
      std::size_t pos = 0, neg = 0;
      for (const auto& r : rows) {
        if (r[j].sign() > 0) ++pos;
        if (r[j].sign() < 0) ++neg;
      }
      if (pick == n || pos * neg < best) {
        pick = j;
        best = pos * neg;
      }
    }
    eliminated[pick] = true;
    std::vector<const detail::FmRow*> upper, lower;
    std::set<detail::FmRow> next;
    for (const auto& r : rows) {
      int s = r[pick].sign();
      if (s > 0) upper.push_back(&r);
      else if (s < 0) lower.push_back(&r);
      else next.insert(r);
    }
    for (const auto* u : upper) {
      for (const auto* l : lower) {
        // u: x_pick <= ...  (coefficient +1 after normalization)
        // l: -x_pick <= ... (coefficient -1 when it leads; scale otherwise)
        Rational cu = -(*l)[pick];
        Rational cl = (*u)[pick];
        detail::FmRow combo(n + 1);
        for (std::size_t j = 0; j <= n; ++j) combo[j] = cu * (*u)[j] + cl * (*l)[j];
        combo[pick] = Rational();
        detail::fm_normalize(combo);
        next.insert(std::move(combo));
        if (next.size() > limits.max_intermediate_rows) {
          throw Error(ErrorCode::SizeCapExceeded, "Fourier-Motzkin intermediate system too large");
        }
      }
    }
    rows = std::move(next);
  }
  return std::all_of(rows.begin(), rows.end(),
                     [](const detail::FmRow& r) { return r.back().sign() >= 0; });
}

}  // namespace qualprob
