#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace prosim {

// Dense linear program in the form
//   min c'x  s.t.  A x <= b,  lb <= x <= ub.
// A is stored row-major, m rows by n columns.
struct StandardLP {
  std::vector<double> c;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> lb;
  std::vector<double> ub;

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_rows() const { return b.size(); }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  std::vector<double> x;  // present iff Optimal
  double objective = 0.0;
};

namespace detail {

inline void validate_lp(const StandardLP& lp) {
  const std::size_t n = lp.c.size();
  const std::size_t m = lp.b.size();
  if (lp.A.size() != m)
    throw std::invalid_argument("lp: A has " + std::to_string(lp.A.size()) +
                                " rows, b has " + std::to_string(m));
  for (const auto& row : lp.A)
    if (row.size() != n)
      throw std::invalid_argument("lp: A row length does not match c");
  if (lp.lb.size() != n || lp.ub.size() != n)
    throw std::invalid_argument("lp: bound vectors must have length n");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lb[j]) || std::isnan(lp.ub[j]))
      throw std::invalid_argument("lp: lower bounds must be finite");
    if (lp.lb[j] > lp.ub[j])
      throw std::invalid_argument("lp: lb > ub at column " + std::to_string(j));
    if (!std::isfinite(lp.c[j]))
      throw std::invalid_argument("lp: non-finite objective coefficient");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(lp.b[i]))
      throw std::invalid_argument("lp: non-finite rhs");
    for (double a : lp.A[i])
      if (!std::isfinite(a))
        throw std::invalid_argument("lp: non-finite matrix entry");
  }
}

// Two-phase primal simplex on the bounded-variable form. Variables are the n
// structural columns followed by m slacks (one per row, range [0, inf)).
// Nonbasic variables rest on a bound; rows whose slack would start negative
// get an artificial basic column that phase 1 drives to zero. Pricing is
// Dantzig with Bland's rule engaged after a run of degenerate steps, which
// keeps the iteration deterministic and cycle-free.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const StandardLP& lp)
      : n_(lp.num_vars()), m_(lp.num_rows()) {
    nt_ = n_ + m_;
    lo_.assign(nt_, 0.0);
    hi_.assign(nt_, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lp.lb[j];
      hi_[j] = lp.ub[j];
    }
    cost_.assign(nt_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp.c[j];

    // Crash: slacks basic, each structural column on whichever bound leaves
    // the smaller running violation. Scanned in index order, deterministic.
    at_upper_.assign(nt_, false);
    std::vector<double> act(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(hi_[j]) && hi_[j] != lo_[j]) {
        double vlo = 0.0, vhi = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = lp.A[i][j];
          if (a == 0.0) continue;
          vlo += std::max(0.0, act[i] + a * lo_[j] - lp.b[i]);
          vhi += std::max(0.0, act[i] + a * hi_[j] - lp.b[i]);
        }
        at_upper_[j] = vhi < vlo;
      }
      const double v = at_upper_[j] ? hi_[j] : lo_[j];
      if (v != 0.0)
        for (std::size_t i = 0; i < m_; ++i) act[i] += lp.A[i][j] * v;
    }

    basis_.resize(m_);
    in_basis_.assign(nt_, false);
    xb_.resize(m_);
    std::size_t n_art = 0;
    std::vector<bool> art_row(m_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      const double s = lp.b[i] - act[i];
      if (s >= 0.0) {
        basis_[i] = n_ + i;
        in_basis_[n_ + i] = true;
        xb_[i] = s;
      } else {
        art_row[i] = true;
        basis_[i] = kArtificial;
        xb_[i] = -s;
        ++n_art;
      }
    }

    // Tableau Binv*[A|I]; a row carrying an artificial (-1 column) is the
    // original row negated. Objective rows ride along and are updated by the
    // same eliminations: d2 holds phase-2 reduced costs, d1 phase-1.
    tab_.assign(m_, std::vector<double>(nt_));
    for (std::size_t i = 0; i < m_; ++i) {
      const double sgn = art_row[i] ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sgn * lp.A[i][j];
      tab_[i][n_ + i] = sgn;
    }
    d2_ = cost_;
    d1_.assign(nt_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (art_row[i])
        for (std::size_t j = 0; j < nt_; ++j) d1_[j] -= tab_[i][j];
    need_phase1_ = n_art > 0;
  }

  LPStatus solve(std::vector<double>* x_out, double* obj_out) {
    if (need_phase1_) {
      const Outcome rc = run(/*phase1=*/true);
      if (rc != Outcome::Optimal)
        throw std::runtime_error("lp: phase-1 did not terminate cleanly");
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] == kArtificial) infeas += xb_[i];
      if (infeas > kFeasTol * (1.0 + static_cast<double>(m_)))
        return LPStatus::Infeasible;
      pivot_out_artificials();
    }
    const Outcome rc = run(/*phase1=*/false);
    if (rc == Outcome::IterationLimit)
      throw std::runtime_error("lp: iteration limit reached");
    if (rc == Outcome::Unbounded) return LPStatus::Unbounded;

    std::vector<double> x(nt_);
    for (std::size_t j = 0; j < nt_; ++j) x[j] = at_upper_[j] ? hi_[j] : lo_[j];
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] != kArtificial) x[basis_[i]] = xb_[i];
    x.resize(n_);
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += cost_[j] * x[j];
    *x_out = std::move(x);
    *obj_out = obj;
    return LPStatus::Optimal;
  }

 private:
  enum class Outcome { Optimal, Unbounded, IterationLimit };
  static constexpr std::size_t kArtificial = static_cast<std::size_t>(-1);
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kCostTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;

  Outcome run(bool phase1) {
    const std::vector<double>& d = phase1 ? d1_ : d2_;
    const std::size_t max_iter = 1000 + 60 * (nt_ + m_);
    std::size_t degenerate_streak = 0;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      const bool bland = degenerate_streak > 40;

      // Entering column: improving when moving off its current bound.
      std::size_t q = nt_;
      double best = kCostTol;
      int dir = 0;
      for (std::size_t j = 0; j < nt_; ++j) {
        if (in_basis_[j]) continue;
        double viol = 0.0;
        int sgn = 0;
        if (!at_upper_[j] && d[j] < -kCostTol) {
          viol = -d[j];
          sgn = +1;
        } else if (at_upper_[j] && d[j] > kCostTol) {
          viol = d[j];
          sgn = -1;
        }
        if (sgn == 0) continue;
        if (bland) {
          q = j;
          dir = sgn;
          break;
        }
        if (viol > best) {
          best = viol;
          q = j;
          dir = sgn;
        }
      }
      if (q == nt_) return Outcome::Optimal;

      // Ratio test. The entering variable moves t >= 0 off its bound; basic
      // values change by -dir*tab[i][q]*t and stop at their own bounds. Among
      // near-tied ratios take the largest pivot magnitude (lowest variable
      // index when Bland's rule is active).
      double t_max = hi_[q] - lo_[q];
      std::size_t r = kArtificial;
      double r_pivot = 0.0;
      std::size_t r_key = 0;
      const auto row_key = [this](std::size_t i) {
        return basis_[i] == kArtificial ? nt_ + i : basis_[i];
      };
      for (std::size_t i = 0; i < m_; ++i) {
        const double w = dir * tab_[i][q];
        if (std::fabs(w) < kPivotTol) continue;
        double t;
        if (basis_[i] == kArtificial) {
          if (w <= 0.0) continue;  // artificial may only fall toward zero
          t = xb_[i] / w;
        } else if (w > 0.0) {
          t = (xb_[i] - lo_[basis_[i]]) / w;
        } else {
          const double bh = hi_[basis_[i]];
          if (!std::isfinite(bh)) continue;
          t = (bh - xb_[i]) / (-w);
        }
        if (t < 0.0) t = 0.0;
        bool take = false;
        if (t < t_max - 1e-12) {
          take = true;
        } else if (t < t_max + 1e-12) {
          if (r == kArtificial)
            take = true;
          else if (bland ? row_key(i) < r_key
                         : std::fabs(w) > std::fabs(r_pivot))
            take = true;
        }
        if (take) {
          if (t < t_max) t_max = t;
          r = i;
          r_pivot = w;
          r_key = row_key(i);
        }
      }

      if (r == kArtificial) {
        if (!std::isfinite(t_max)) return Outcome::Unbounded;
        // No basic blocker: bound-to-bound flip.
        if (t_max > 0.0)
          for (std::size_t i = 0; i < m_; ++i) xb_[i] -= dir * tab_[i][q] * t_max;
        at_upper_[q] = !at_upper_[q];
        degenerate_streak = t_max <= kFeasTol ? degenerate_streak + 1 : 0;
        continue;
      }
      degenerate_streak = t_max <= kFeasTol ? degenerate_streak + 1 : 0;
      pivot(r, q, dir, t_max);
    }
    return Outcome::IterationLimit;
  }

  void pivot(std::size_t r, std::size_t q, int dir, double t) {
    const double w_rq = tab_[r][q];
    const std::size_t leave = basis_[r];
    const double enter_val = (at_upper_[q] ? hi_[q] : lo_[q]) + dir * t;
    for (std::size_t i = 0; i < m_; ++i)
      if (i != r) xb_[i] -= dir * tab_[i][q] * t;

    if (leave != kArtificial) {
      in_basis_[leave] = false;
      // dir*w > 0 means the leaving value fell to its lower bound.
      at_upper_[leave] = !(dir * w_rq > 0.0);
    }
    basis_[r] = q;
    in_basis_[q] = true;
    xb_[r] = enter_val;
    eliminate(r, q);
  }

  // Gaussian elimination of column q against pivot row r, applied to the
  // tableau and both objective rows.
  void eliminate(std::size_t r, std::size_t q) {
    auto& prow = tab_[r];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < nt_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      auto& row = tab_[i];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < nt_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    if (const double f1 = d1_[q]; f1 != 0.0) {
      for (std::size_t j = 0; j < nt_; ++j) d1_[j] -= f1 * prow[j];
      d1_[q] = 0.0;
    }
    if (const double f2 = d2_[q]; f2 != 0.0) {
      for (std::size_t j = 0; j < nt_; ++j) d2_[j] -= f2 * prow[j];
      d2_[q] = 0.0;
    }
  }

  // Artificials still basic after phase 1 sit at (numerical) zero; swap each
  // for a usable column, or leave the row inert when it became redundant.
  void pivot_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] != kArtificial) continue;
      std::size_t q = nt_;
      for (std::size_t j = 0; j < nt_; ++j) {
        if (in_basis_[j]) continue;
        if (std::fabs(tab_[i][j]) > 1e-7) {
          q = j;
          break;
        }
      }
      if (q == nt_) continue;  // redundant row, artificial stays pinned at 0
      basis_[i] = q;
      in_basis_[q] = true;
      xb_[i] = at_upper_[q] ? hi_[q] : lo_[q];
      eliminate(i, q);
    }
  }

  std::size_t n_, m_, nt_;
  std::vector<double> lo_, hi_, cost_;
  std::vector<std::vector<double>> tab_;
  std::vector<double> d1_, d2_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_, at_upper_;
  std::vector<double> xb_;
  bool need_phase1_ = false;
};

}  // namespace detail

// Deterministic dense LP solve. Throws std::invalid_argument on malformed
// input (distinct from an Infeasible result).
inline LPSolution solve_lp(const StandardLP& lp) {
  detail::validate_lp(lp);
  detail::BoundedSimplex simplex(lp);
  LPSolution sol;
  std::vector<double> x;
  double obj = 0.0;
  sol.status = simplex.solve(&x, &obj);
  if (sol.status == LPStatus::Optimal) {
    sol.x = std::move(x);
    sol.objective = obj;
  }
  return sol;
}

}  // namespace prosim
