#include "hdual/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace hdual {
namespace {

// Dense two-phase simplex on the full tableau. Column layout: [original | artificial | rhs].
// Rows whose d was negative are negated up front (sign[] remembers this for the duals).
// The artificial block starts as the identity, so after any pivot sequence it holds
// B^-1 and the duals of either phase drop out of it directly.
class Simplex {
public:
  Simplex(const StandardLp& lp, const ToleranceConfig& tc)
      : m_(lp.rows), k_(lp.cols), tc_(tc), ncols_(lp.cols + lp.rows + 1),
        tab_(lp.rows * (lp.cols + lp.rows + 1), 0.0), basis_(lp.rows), sign_(lp.rows, 1.0) {
    for (std::size_t i = 0; i < m_; ++i) {
      double s = lp.d[i] < 0.0 ? -1.0 : 1.0;
      sign_[i] = s;
      for (std::size_t j = 0; j < k_; ++j) at(i, j) = s * lp.at(i, j);
      at(i, k_ + i) = 1.0;
      rhs(i) = s * lp.d[i];
      basis_[i] = k_ + i;
    }
  }

  LpOutcome run(const StandardLp& lp) {
    LpOutcome out;

    // Phase 1: maximize -sum(artificials).
    std::vector<double> cost1(k_ + m_, 0.0);
    for (std::size_t j = k_; j < k_ + m_; ++j) cost1[j] = -1.0;
    if (!iterate(cost1, nullptr))
      throw NumericalBreakdown("phase 1 reported unbounded; artificial objective is bounded");

    double resid = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= k_) resid += rhs(i);
    if (resid > tc_.feas_tol) {
      out.status = LpStatus::Infeasible;
      out.infeasibility = resid;
      out.farkas = duals(cost1);
      for (double& v : out.farkas) v = -v;
      return out;
    }
    purge_artificials();

    // Phase 2 over the original objective.
    std::vector<double> cost2(k_ + m_, 0.0);
    for (std::size_t j = 0; j < k_; ++j) cost2[j] = lp.g[j];
    std::size_t ray_col = 0;
    if (!iterate(cost2, &ray_col)) {
      out.status = LpStatus::Unbounded;
      out.ray.assign(k_, 0.0);
      out.ray[ray_col] = 1.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] < k_) {
          double r = -at(i, ray_col);
          out.ray[basis_[i]] = (r < 0.0 && r > -tc_.pivot_tol) ? 0.0 : r;
        }
      }
      return out;
    }

    out.status = LpStatus::Optimal;
    out.y.assign(k_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < k_) out.y[basis_[i]] = rhs(i);
    out.value = 0.0;
    for (std::size_t j = 0; j < k_; ++j) out.value += lp.g[j] * out.y[j];
    out.row_duals = duals(cost2);
    return out;
  }

  // Feasibility-only entry point: phase 1, then report.
  FeasibilityResult check(const StandardLp&) {
    FeasibilityResult res;
    std::vector<double> cost1(k_ + m_, 0.0);
    for (std::size_t j = k_; j < k_ + m_; ++j) cost1[j] = -1.0;
    if (!iterate(cost1, nullptr))
      throw NumericalBreakdown("phase 1 reported unbounded; artificial objective is bounded");
    double resid = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= k_) resid += rhs(i);
    res.infeasibility = resid;
    if (resid > tc_.feas_tol) {
      res.feasible = false;
      res.farkas = duals(cost1);
      for (double& v : res.farkas) v = -v;
    } else {
      res.feasible = true;
      res.y.assign(k_, 0.0);
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] < k_) res.y[basis_[i]] = rhs(i);
    }
    return res;
  }

private:
  double& at(std::size_t i, std::size_t j) { return tab_[i * ncols_ + j]; }
  double& rhs(std::size_t i) { return tab_[i * ncols_ + k_ + m_]; }

  // pi = c_B B^-1, read off the artificial block, mapped back to original row signs.
  std::vector<double> duals(const std::vector<double>& cost) {
    std::vector<double> pi(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        double c = cost[basis_[r]];
        if (c != 0.0) v += c * at(r, k_ + i);
      }
      pi[i] = sign_[i] * v;
    }
    return pi;
  }

  // Simplex loop for one phase. Artificial columns never enter. Returns false
  // on unbounded (phase 2 only) with *ray_col set to the offending column.
  bool iterate(const std::vector<double>& cost, std::size_t* ray_col) {
    const double enter_tol = tc_.feas_tol;
    const std::size_t cap = std::max<std::size_t>(10000, 25 * (m_ + k_));
    const std::size_t bland_after = 2 * (m_ + k_);
    std::size_t degenerate_streak = 0;

    std::vector<double> cb(m_);
    for (std::size_t iter = 0; iter < cap; ++iter) {
      const bool bland = degenerate_streak > bland_after;

      // Reduced costs r_j = c_j - c_B B^-1 A_j over original columns.
      for (std::size_t r = 0; r < m_; ++r) cb[r] = cost[basis_[r]];
      std::ptrdiff_t enter = -1;
      double best_rc = enter_tol;
      for (std::size_t j = 0; j < k_; ++j) {
        double z = 0.0;
        for (std::size_t r = 0; r < m_; ++r)
          if (cb[r] != 0.0) z += cb[r] * at(r, j);
        double rc = cost[j] - z;
        if (rc > best_rc) {
          enter = static_cast<std::ptrdiff_t>(j);
          if (bland) break;
          best_rc = rc;
        }
      }
      if (enter < 0) return true;  // optimal for this phase

      // Ratio test.
      std::ptrdiff_t leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        double piv = at(i, static_cast<std::size_t>(enter));
        if (piv <= tc_.pivot_tol) continue;
        double ratio = rhs(i) / piv;
        if (ratio < best_ratio) {
          best_ratio = ratio;
          leave = static_cast<std::ptrdiff_t>(i);
        } else if (ratio == best_ratio && leave >= 0) {
          if (bland) {
            if (basis_[i] < basis_[static_cast<std::size_t>(leave)])
              leave = static_cast<std::ptrdiff_t>(i);
          } else {
            // Prefer kicking artificials out, then the fatter pivot.
            bool ia = basis_[i] >= k_;
            bool la = basis_[static_cast<std::size_t>(leave)] >= k_;
            if (ia != la) {
              if (ia) leave = static_cast<std::ptrdiff_t>(i);
            } else if (piv > at(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter))) {
              leave = static_cast<std::ptrdiff_t>(i);
            }
          }
        }
      }
      if (leave < 0) {
        if (!ray_col)
          throw NumericalBreakdown("no admissible pivot above pivot_tol in phase 1");
        *ray_col = static_cast<std::size_t>(enter);
        return false;
      }

      if (best_ratio <= 1e-12)
        ++degenerate_streak;
      else
        degenerate_streak = 0;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
    }
    throw NumericalBreakdown("simplex iteration cap exceeded");
  }

  void pivot(std::size_t prow, std::size_t pcol) {
    double piv = at(prow, pcol);
    double* pr = &tab_[prow * ncols_];
    for (std::size_t j = 0; j < ncols_; ++j) pr[j] /= piv;
    pr[pcol] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == prow) continue;
      double f = at(i, pcol);
      if (f == 0.0) continue;
      double* row = &tab_[i * ncols_];
      for (std::size_t j = 0; j < ncols_; ++j) row[j] -= f * pr[j];
      row[pcol] = 0.0;
    }
    basis_[prow] = pcol;
  }

  // After a feasible phase 1 the residual is within tolerance; snap leftover
  // artificial values to zero and pivot them out where a usable entry exists.
  // A row with no such entry is a dependent constraint: its original entries
  // are cleared and the artificial stays basic at zero for good.
  void purge_artificials() {
    const double drive_tol = std::max(1e3 * tc_.pivot_tol, 1e-8);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < k_) continue;
      rhs(i) = 0.0;
      std::size_t best_j = k_;
      double best_mag = drive_tol;
      for (std::size_t j = 0; j < k_; ++j) {
        double mag = std::fabs(at(i, j));
        if (mag > best_mag) {
          best_mag = mag;
          best_j = j;
        }
      }
      if (best_j < k_) {
        pivot(i, best_j);
        rhs(i) = 0.0;
      } else {
        for (std::size_t j = 0; j < k_; ++j) at(i, j) = 0.0;
      }
    }
  }

  std::size_t m_, k_;
  ToleranceConfig tc_;
  std::size_t ncols_;
  std::vector<double> tab_;
  std::vector<std::size_t> basis_;
  std::vector<double> sign_;
};

void check_shape(const StandardLp& lp) {
  if (lp.E.size() != lp.rows * lp.cols)
    throw DimensionMismatch("E has " + std::to_string(lp.E.size()) + " entries, expected rows*cols");
  if (lp.d.size() != lp.rows) throw DimensionMismatch("d length does not match rows");
}

}  // namespace

LpOutcome solve_standard_lp(const StandardLp& lp, const ToleranceConfig& tolcfg) {
  check_shape(lp);
  if (lp.g.size() != lp.cols) throw DimensionMismatch("g length does not match cols");

  if (lp.rows == 0) {
    LpOutcome out;
    for (std::size_t j = 0; j < lp.cols; ++j) {
      if (lp.g[j] > tolcfg.feas_tol) {
        out.status = LpStatus::Unbounded;
        out.ray.assign(lp.cols, 0.0);
        out.ray[j] = 1.0;
        return out;
      }
    }
    out.status = LpStatus::Optimal;
    out.y.assign(lp.cols, 0.0);
    out.value = 0.0;
    return out;
  }
  return Simplex(lp, tolcfg).run(lp);
}

FeasibilityResult feasibility(const StandardLp& lp, const ToleranceConfig& tolcfg) {
  check_shape(lp);
  if (lp.rows == 0) {
    FeasibilityResult res;
    res.feasible = true;
    res.y.assign(lp.cols, 0.0);
    return res;
  }
  return Simplex(lp, tolcfg).check(lp);
}

}  // namespace hdual
