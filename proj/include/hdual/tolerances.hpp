#pragma once

namespace hdual {

// Solver-level tolerances. feas_tol bounds acceptable constraint residuals and
// sign violations; pivot_tol is the smallest magnitude accepted as a pivot.
struct ToleranceConfig {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-11;
};

namespace tol {

// Agreement between independently computed optimal values (primal vs dual).
inline constexpr double value_agree = 1e-7;
// Residual allowed in certificate arithmetic re-checks.
inline constexpr double certificate = 1e-7;
// Slack allowed when validating a primal witness on a finer grid.
inline constexpr double validation_margin = 1e-7;
// Width at which golden-section refinement of a 1-D dual value map stops.
inline constexpr double golden_width = 1e-10;
// Quantization of holds/fails decisions in chain reports.
inline constexpr double decision = 1e-5;
// Two dual prefix values closer than this are considered stabilized.
inline constexpr double stabilization = 1e-9;
// Length of the flat window required before stabilization is reported.
inline constexpr int stab_window = 5;

}  // namespace tol

}  // namespace hdual
