#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hdual/exec.hpp"
#include "hdual/model.hpp"
#include "hdual/tolerances.hpp"

namespace hdual {

// Finitely supported multiplier vector: mu[i] belongs to H.values[i].
// Invariants: mu >= 0, value = -sum mu_i b_i, sum mu_i a_i = -c.
struct DualSolution {
  IndexSubset H;
  std::vector<double> mu;
  double value = 0.0;
};

enum class SubStatus { Optimal, Unbounded, Infeasible };

// Joint classification of the pair (P_H) / (D_H) for one finite subset H.
// `status` describes (P_H): minimize <c,x> over the constraints indexed by H.
// Optimal carries the shared optimal value, a minimizer x, and a DualSolution.
// Unbounded carries a descent direction in x. Both problems can be infeasible
// at once; `dual_status` keeps that case distinguishable.
struct SubproblemOutcome {
  SubStatus status = SubStatus::Infeasible;
  SubStatus dual_status = SubStatus::Infeasible;
  double value = 0.0;                // meaningful only when status == Optimal
  std::vector<double> x;             // minimizer (Optimal) or ray (Unbounded)
  std::optional<DualSolution> dual;  // present when (D_H) is Optimal
};

struct GridParams {
  int resolution = 101;          // points per interval factor
  std::int64_t countable_cap = 8;
};

struct SearchParams {
  GridParams grid;
  std::int64_t budget = 100000;  // max subsets enumerated
  bool refine = false;
  ExecMode mode = default_exec_mode();
  ToleranceConfig tol;
};

// Result of the family search for sup over H of max(D_H).
struct BestDual {
  std::optional<DualSolution> best;  // best Optimal dual found, if any
  bool family_exhausted = true;
  bool refined = false;
  std::int64_t subsets_examined = 0;
  // Some (D_H) was unbounded above; its (P_H) is then infeasible and so is
  // the whole instance, making the supremum +inf without a witness.
  bool unbounded_seen = false;
};

// Two-sided bracket on inf(P). lower comes from dual solutions / subproblem
// values (never above inf(P)); upper from a validated feasible witness.
struct GapReport {
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;  // upper - lower
  std::optional<std::vector<double>> witness_x;
  GridParams grid;             // search grid
  GridParams validation_grid;  // witness validation grid (finer)
};

struct StrongDualityReport {
  double conj_estimate = 0.0;     // estimate of (f + indicator(E))*(y)
  double phi_family_value = 0.0;  // min over the family of phi_H(y)
  bool attained = false;          // the two sides agree within 1e-6
};

struct BoundsParams {
  GridParams grid;
  int max_cardinality = 3;            // BoundedSubsets size for the dual search
  std::int64_t family_budget = 512;   // subset budget for the dual search
  ExecMode mode = default_exec_mode();
  ToleranceConfig tol;
};

// Solves (D_H): max -sum mu b s.t. sum mu a = -c, mu >= 0. Optimal row duals
// recover a minimizer of (P_H); an infeasible dual is classified against a
// separate primal feasibility check (unbounded vs. both infeasible).
SubproblemOutcome solve_dual_subproblem(const LipInstance& inst, const IndexSubset& H,
                                        const ToleranceConfig& tol = {});

// Solves (P_H) directly through the free-variable split x = u - v plus slacks.
SubproblemOutcome solve_primal_subproblem(const LipInstance& inst, const IndexSubset& H,
                                          const ToleranceConfig& tol = {});

// Best Optimal dual value over the enumerated family. With params.refine and
// a Singletons family over a plain interval set, a golden-section pass around
// the best grid point recovers off-grid maximizers; candidate points compare
// by (dual feasible, value, -infeasibility residual) so the pass also homes
// in on the feasible locus when no grid singleton admits any multiplier.
BestDual sup_dual_over_family(const LipInstance& inst, const FamilySpec& spec,
                              const SearchParams& params);

// phi_H(y) = min sum mu b s.t. sum mu a = y - c, mu >= 0; +inf when y - c is
// outside cone{a_t : t in H}, -inf when the LP is unbounded below.
double eval_phi_H(const LipInstance& inst, const IndexSubset& H, const std::vector<double>& y,
                  const ToleranceConfig& tol = {});

// Tests whether the family attains the conjugate at y: compares
// min_H phi_H(y) against -inf(P with objective c - y), the latter estimated
// from primal_bounds on a doubled grid so the conjugate side is strictly
// sharper than the family side.
StrongDualityReport strong_duality_at(const LipInstance& inst, const FamilySpec& spec,
                                      const std::vector<double>& y, const SearchParams& params);

// lower = max(family dual search, full-grid subproblem value); upper = <c, x>
// at a witness pushed to feasibility and validated on a doubled grid with a
// slack margin. upper = +inf when no witness validates.
GapReport primal_bounds(const LipInstance& inst, const BoundsParams& params);

}  // namespace hdual
