#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qualprob/errors.hpp"
#include "qualprob/rational.hpp"

namespace qualprob {

enum class ConstraintSense { LE, GE, EQ };
enum class ObjectiveSense { Maximize, Minimize };

struct Constraint {
  std::vector<Rational> coefficients;
  ConstraintSense sense = ConstraintSense::LE;
  Rational rhs;
};

/// Closed polyhedral program over free (unbounded) variables. Bounds such as
/// x >= 0 are ordinary constraints. An empty objective means pure feasibility.
struct LinearProgram {
  std::size_t variable_count = 0;
  std::vector<Constraint> constraints;
  std::vector<Rational> objective;
  ObjectiveSense sense = ObjectiveSense::Maximize;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n) : variable_count(n) {}

  std::size_t add(std::vector<Rational> coefficients, ConstraintSense s, Rational rhs) {
    constraints.push_back(Constraint{std::move(coefficients), s, std::move(rhs)});
    return constraints.size() - 1;
  }

  void validate() const {
    if (!objective.empty() && objective.size() != variable_count) {
      throw Error(ErrorCode::DimensionMismatch,
                  "objective has " + std::to_string(objective.size()) + " coefficients for " +
                      std::to_string(variable_count) + " variables");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      if (constraints[i].coefficients.size() != variable_count) {
        throw Error(ErrorCode::DimensionMismatch,
                    "constraint " + std::to_string(i) + " has " +
                        std::to_string(constraints[i].coefficients.size()) +
                        " coefficients for " + std::to_string(variable_count) + " variables");
      }
    }
  }
};

struct Optimal {
  Rational value;
  std::vector<Rational> point;
};

/// Multipliers y, one per constraint, with y >= 0 on LE and GE rows and free
/// on EQ rows. Writing each row as s*(a.x - b) >= 0 (s = -1 for LE, +1
/// otherwise) the combination sum y*s*a vanishes while sum y*s*b > 0, which
/// reads 0 >= positive.
struct Infeasible {
  std::vector<Rational> certificate;
};

/// A feasible point and a direction that keeps it feasible while strictly
/// improving the objective.
struct Unbounded {
  std::vector<Rational> point;
  std::vector<Rational> ray;
};

using LpOutcome = std::variant<Optimal, Infeasible, Unbounded>;

struct SolveOptions {
  std::size_t max_pivots = 0;  // 0 = unlimited
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// ---------------------------------------------------------------------------
// Substitution checks

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
  }
  return s;
}

inline bool satisfies(const Constraint& c, std::span<const Rational> x) {
  auto lhs = dot(c.coefficients, x);
  switch (c.sense) {
    case ConstraintSense::LE: return lhs <= c.rhs;
    case ConstraintSense::GE: return lhs >= c.rhs;
    case ConstraintSense::EQ: return lhs == c.rhs;
  }
  return false;
}

inline bool satisfies(const LinearProgram& lp, std::span<const Rational> x) {
  if (x.size() != lp.variable_count) return false;
  for (const auto& c : lp.constraints) {
    if (!satisfies(c, x)) return false;
  }
  return true;
}

inline Rational objective_value(const LinearProgram& lp, std::span<const Rational> x) {
  return lp.objective.empty() ? Rational() : dot(lp.objective, x);
}

inline bool is_farkas_certificate(const LinearProgram& lp, std::span<const Rational> y) {
  if (y.size() != lp.constraints.size()) return false;
  std::vector<Rational> combo(lp.variable_count);
  Rational rhs;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto& c = lp.constraints[i];
    if (c.sense != ConstraintSense::EQ && y[i].sign() < 0) return false;
    if (y[i].is_zero()) continue;
    Rational w = c.sense == ConstraintSense::LE ? -y[i] : y[i];
    for (std::size_t j = 0; j < lp.variable_count; ++j) {
      if (!c.coefficients[j].is_zero()) combo[j] += w * c.coefficients[j];
    }
    rhs += w * c.rhs;
  }
  for (const auto& v : combo) {
    if (!v.is_zero()) return false;
  }
  return rhs.sign() > 0;
}

inline bool is_improving_ray(const LinearProgram& lp, std::span<const Rational> ray) {
  if (ray.size() != lp.variable_count || lp.objective.empty()) return false;
  for (const auto& c : lp.constraints) {
    auto d = dot(c.coefficients, ray);
    if (c.sense == ConstraintSense::LE && d.sign() > 0) return false;
    if (c.sense == ConstraintSense::GE && d.sign() < 0) return false;
    if (c.sense == ConstraintSense::EQ && !d.is_zero()) return false;
  }
  auto gain = dot(lp.objective, ray);
  return lp.sense == ObjectiveSense::Maximize ? gain.sign() > 0 : gain.sign() < 0;
}

// ---------------------------------------------------------------------------
// Two-phase primal simplex on a dense rational tableau, Bland's rule.

namespace detail {

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& options) : lp_(lp), options_(options) {}

  LpOutcome run() {
    lp_.validate();
    presolve_bounds();
    build();
    if (!phase_one()) return Infeasible{farkas()};
    drive_out_artificials();
    return phase_two();
  }

 private:
  enum class ColKind { Plus, Minus, Slack, Artificial };
  struct Column {
    ColKind kind;
    std::size_t ref;  // variable index or row index
  };

  // Rows of the form a_j x_j >= 0 (a_j > 0) or a_j x_j <= 0 (a_j < 0) are
  // turned into sign restrictions on x_j instead of tableau rows.
  void presolve_bounds() {
    nonneg_.assign(lp_.variable_count, false);
    bound_row_.assign(lp_.variable_count, npos);
    is_bound_row_.assign(lp_.constraints.size(), false);
    for (std::size_t i = 0; i < lp_.constraints.size(); ++i) {
      const auto& c = lp_.constraints[i];
      if (!c.rhs.is_zero() || c.sense == ConstraintSense::EQ) continue;
      std::size_t nz = npos;
      bool single = true;
      for (std::size_t j = 0; j < lp_.variable_count; ++j) {
        if (c.coefficients[j].is_zero()) continue;
        if (nz != npos) {
          single = false;
          break;
        }
        nz = j;
      }
      if (!single || nz == npos || nonneg_[nz]) continue;
      int s = c.coefficients[nz].sign();
      if ((c.sense == ConstraintSense::GE && s > 0) || (c.sense == ConstraintSense::LE && s < 0)) {
        nonneg_[nz] = true;
        bound_row_[nz] = i;
        is_bound_row_[i] = true;
      }
    }
  }

  void build() {
    for (std::size_t j = 0; j < lp_.variable_count; ++j) {
      cols_.push_back({ColKind::Plus, j});
      if (!nonneg_[j]) cols_.push_back({ColKind::Minus, j});
    }
    for (std::size_t i = 0; i < lp_.constraints.size(); ++i) {
      if (!is_bound_row_[i]) rows_.push_back(i);
    }
    const std::size_t m = rows_.size();
    sign_.assign(m, 1);
    for (std::size_t r = 0; r < m; ++r) {
      if (lp_.constraints[rows_[r]].sense != ConstraintSense::EQ) cols_.push_back({ColKind::Slack, r});
    }
    for (std::size_t r = 0; r < m; ++r) {
      const auto& c = lp_.constraints[rows_[r]];
      sign_[r] = c.rhs.sign() < 0 ? -1 : 1;
      bool slack_basis = c.sense == ConstraintSense::LE ? sign_[r] > 0
                         : c.sense == ConstraintSense::GE ? sign_[r] < 0
                                                         : false;
      if (!slack_basis) cols_.push_back({ColKind::Artificial, r});
    }
    width_ = cols_.size();
    tab_.assign(m, std::vector<Rational>(width_ + 1));
    basis_.assign(m, npos);
    init_col_.assign(m, npos);
    for (std::size_t k = 0; k < width_; ++k) {
      const auto& col = cols_[k];
      switch (col.kind) {
        case ColKind::Plus:
        case ColKind::Minus:
          for (std::size_t r = 0; r < m; ++r) {
            const auto& a = lp_.constraints[rows_[r]].coefficients[col.ref];
            if (a.is_zero()) continue;
            tab_[r][k] = a;
            if (col.kind == ColKind::Minus) tab_[r][k] = -tab_[r][k];
            if (sign_[r] < 0) tab_[r][k] = -tab_[r][k];
          }
          break;
        case ColKind::Slack: {
          auto r = col.ref;
          int base = lp_.constraints[rows_[r]].sense == ConstraintSense::LE ? 1 : -1;
          tab_[r][k] = Rational(base * sign_[r]);
          if (base * sign_[r] > 0) {
            basis_[r] = k;
            init_col_[r] = k;
          }
          break;
        }
        case ColKind::Artificial:
          tab_[col.ref][k] = Rational(1);
          basis_[col.ref] = k;
          init_col_[col.ref] = k;
          break;
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      tab_[r][width_] = lp_.constraints[rows_[r]].rhs;
      if (sign_[r] < 0) tab_[r][width_] = -tab_[r][width_];
    }
  }

  bool artificial(std::size_t k) const { return cols_[k].kind == ColKind::Artificial; }

  // Reduced-cost row for costs `cost` (minimization); last entry = -value.
  std::vector<Rational> reduced_costs(const std::vector<Rational>& cost) const {
    std::vector<Rational> d(width_ + 1);
    for (std::size_t k = 0; k < width_; ++k) d[k] = cost[k];
    for (std::size_t r = 0; r < tab_.size(); ++r) {
      const auto& cb = cost[basis_[r]];
      if (cb.is_zero()) continue;
      for (std::size_t k = 0; k <= width_; ++k) {
        if (!tab_[r][k].is_zero()) d[k].sub_product(cb, tab_[r][k]);
      }
    }
    return d;
  }

  void tick() {
    ++pivots_;
    if (options_.max_pivots && pivots_ > options_.max_pivots) {
      throw Error(ErrorCode::BudgetExceeded, "simplex pivot budget exhausted");
    }
    if (options_.deadline && (pivots_ & 7U) == 0 &&
        std::chrono::steady_clock::now() > *options_.deadline) {
      throw Error(ErrorCode::BudgetExceeded, "simplex time budget exhausted");
    }
  }

  void pivot(std::size_t row, std::size_t col, std::vector<Rational>& d) {
    tick();
    auto& pr = tab_[row];
    Rational inv = Rational(1) / pr[col];
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k <= width_; ++k) {
      if (pr[k].is_zero()) continue;
      pr[k] *= inv;
      nz.push_back(k);
    }
    auto eliminate = [&](std::vector<Rational>& target) {
      if (target[col].is_zero()) return;
      Rational f = target[col];
      for (auto k : nz) target[k].sub_product(f, pr[k]);
    };
    for (std::size_t r = 0; r < tab_.size(); ++r) {
      if (r != row) eliminate(tab_[r]);
    }
    eliminate(d);
    basis_[row] = col;
  }

  // Bland's rule: smallest eligible entering column, ratio ties broken by the
  // smallest basic column index. Returns the unbounded column, if any.
  std::optional<std::size_t> optimize(std::vector<Rational>& d, bool allow_artificial) {
    for (;;) {
      std::size_t enter = npos;
      for (std::size_t k = 0; k < width_; ++k) {
        if (!allow_artificial && artificial(k)) continue;
        if (d[k].sign() < 0) {
          enter = k;
          break;
        }
      }
      if (enter == npos) return std::nullopt;
      std::size_t leave = npos;
      Rational best;
      for (std::size_t r = 0; r < tab_.size(); ++r) {
        if (tab_[r][enter].sign() <= 0) continue;
        Rational ratio = tab_[r][width_] / tab_[r][enter];
        if (leave == npos || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = std::move(ratio);
        }
      }
      if (leave == npos) return enter;
      pivot(leave, enter, d);
    }
  }

  bool phase_one() {
    phase_one_cost_.assign(width_, Rational());
    bool any = false;
    for (std::size_t k = 0; k < width_; ++k) {
      if (artificial(k)) {
        phase_one_cost_[k] = Rational(1);
        any = true;
      }
    }
    if (!any) return true;
    d1_ = reduced_costs(phase_one_cost_);
    optimize(d1_, true);
    // d1_[width_] holds minus the phase-one optimum.
    return d1_[width_].is_zero();
  }

  std::vector<Rational> farkas() const {
    // Duals of the phase-one optimum: y_r = c(init col) - d(init col).
    std::vector<Rational> y(lp_.constraints.size());
    std::vector<Rational> residual(lp_.variable_count);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      auto k = init_col_[r];
      Rational dual = phase_one_cost_[k] - d1_[k];
      Rational mu = sign_[r] < 0 ? -dual : dual;
      const auto& c = lp_.constraints[rows_[r]];
      y[rows_[r]] = c.sense == ConstraintSense::LE ? -mu : mu;
      if (mu.is_zero()) continue;
      for (std::size_t j = 0; j < lp_.variable_count; ++j) {
        if (!c.coefficients[j].is_zero()) residual[j] += mu * c.coefficients[j];
      }
    }
    for (std::size_t j = 0; j < lp_.variable_count; ++j) {
      if (bound_row_[j] == npos || residual[j].is_zero()) continue;
      const auto& a = lp_.constraints[bound_row_[j]].coefficients[j];
      y[bound_row_[j]] = -residual[j] / abs(a);
    }
    if (!is_farkas_certificate(lp_, y)) {
      throw std::logic_error("simplex produced an invalid infeasibility certificate");
    }
    return y;
  }

  void drive_out_artificials() {
    std::vector<Rational> scratch(width_ + 1);
    for (std::size_t r = 0; r < tab_.size(); ++r) {
      if (!artificial(basis_[r])) continue;
      for (std::size_t k = 0; k < width_; ++k) {
        if (!artificial(k) && !tab_[r][k].is_zero()) {
          pivot(r, k, scratch);
          break;
        }
      }
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  std::vector<Rational> point_from(const std::vector<Rational>& colvals) const {
    std::vector<Rational> x(lp_.variable_count);
    for (std::size_t k = 0; k < width_; ++k) {
      if (colvals[k].is_zero()) continue;
      if (cols_[k].kind == ColKind::Plus) x[cols_[k].ref] += colvals[k];
      if (cols_[k].kind == ColKind::Minus) x[cols_[k].ref] -= colvals[k];
    }
    return x;
  }

  std::vector<Rational> current_point() const {
    std::vector<Rational> vals(width_);
    for (std::size_t r = 0; r < tab_.size(); ++r) vals[basis_[r]] = tab_[r][width_];
    return point_from(vals);
  }

  LpOutcome phase_two() {
    std::vector<Rational> cost(width_);
    if (!lp_.objective.empty()) {
      for (std::size_t k = 0; k < width_; ++k) {
        const auto& col = cols_[k];
        if (col.kind != ColKind::Plus && col.kind != ColKind::Minus) continue;
        Rational c = lp_.objective[col.ref];
        if (lp_.sense == ObjectiveSense::Maximize) c = -c;
        if (col.kind == ColKind::Minus) c = -c;
        cost[k] = std::move(c);
      }
    }
    auto d = reduced_costs(cost);
    auto unbounded_col = optimize(d, false);
    auto x = current_point();
    if (unbounded_col) {
      std::vector<Rational> dir(width_);
      dir[*unbounded_col] = Rational(1);
      for (std::size_t r = 0; r < tab_.size(); ++r) dir[basis_[r]] = -tab_[r][*unbounded_col];
      auto ray = point_from(dir);
      if (!is_improving_ray(lp_, ray) || !satisfies(lp_, x)) {
        throw std::logic_error("simplex produced an invalid unbounded ray");
      }
      return Unbounded{std::move(x), std::move(ray)};
    }
    if (!satisfies(lp_, x)) throw std::logic_error("simplex produced an infeasible point");
    auto value = objective_value(lp_, x);
    return Optimal{std::move(value), std::move(x)};
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const LinearProgram& lp_;
  SolveOptions options_;
  std::vector<bool> nonneg_;
  std::vector<std::size_t> bound_row_;
  std::vector<bool> is_bound_row_;
  std::vector<std::size_t> rows_;  // tableau row -> constraint index
  std::vector<int> sign_;
  std::vector<Column> cols_;
  std::size_t width_ = 0;
  std::vector<std::vector<Rational>> tab_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> init_col_;
  std::vector<Rational> phase_one_cost_;
  std::vector<Rational> d1_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Exact two-phase simplex. Every outcome is checked by substitution before
/// it is returned.
inline LpOutcome solve(const LinearProgram& lp, const SolveOptions& options = {}) {
  return detail::Simplex(lp, options).run();
}

}  // namespace qualprob
