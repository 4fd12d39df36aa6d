#pragma once

#include <cstddef>
#include <vector>

#include "hdual/errors.hpp"
#include "hdual/tolerances.hpp"

namespace hdual {

// Equality-form linear program
//
//   maximize  g . y   subject to  E y = d,  y >= 0,
//
// with E dense row-major (rows x cols). Free variables and inequality rows are
// the caller's business: split x = u - v, add slacks.
struct StandardLp {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> E;  // row-major, rows * cols
  std::vector<double> d;  // rows
  std::vector<double> g;  // cols

  double& at(std::size_t i, std::size_t j) { return E[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return E[i * cols + j]; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Every status carries a checkable certificate:
//   Optimal    y, value, row_duals pi with pi.d = value and pi^T E >= g - tol
//   Infeasible farkas pi with pi^T E <= tol and pi.d > 0; infeasibility is the
//              phase-1 residual (how far the system is from consistency)
//   Unbounded  ray r >= 0 with E r = 0 and g.r > 0
struct LpOutcome {
  LpStatus status = LpStatus::Optimal;
  std::vector<double> y;
  double value = 0.0;
  std::vector<double> row_duals;
  std::vector<double> farkas;
  double infeasibility = 0.0;
  std::vector<double> ray;
};

// Two-phase dense simplex. Dantzig pricing with Bland's rule after 2(m+k)
// consecutive degenerate pivots; deterministic for fixed input.
LpOutcome solve_standard_lp(const StandardLp& lp, const ToleranceConfig& tolcfg = {});

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> y;       // when feasible
  std::vector<double> farkas;  // when not
  double infeasibility = 0.0;  // phase-1 residual
};

// Phase-1 only: is {E y = d, y >= 0} consistent?
FeasibilityResult feasibility(const StandardLp& lp, const ToleranceConfig& tolcfg = {});

}  // namespace hdual
