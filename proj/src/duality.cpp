#include "hdual/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdual/errors.hpp"
#include "hdual/lp_core.hpp"

namespace hdual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Constraint> constraint_rows(const LipInstance& inst, const IndexSubset& H) {
  if (H.values.empty()) throw EmptyFamily("subproblem subset is empty");
  std::vector<Constraint> rows;
  rows.reserve(H.values.size());
  for (const IndexValue& iv : H.values) rows.push_back(evaluate_constraint(inst, iv));
  return rows;
}

// (D_H) in standard form: columns are multipliers, n equality rows pin the
// combination sum mu a_t to `target`, objective maximizes -sum mu b.
StandardLp dual_lp(const LipInstance& inst, const std::vector<Constraint>& rows,
                   const std::vector<double>& target, double rhs_tighten = 0.0) {
  const std::size_t n = static_cast<std::size_t>(inst.n), m = rows.size();
  StandardLp lp;
  lp.rows = n;
  lp.cols = m;
  lp.E.assign(n * m, 0.0);
  lp.d = target;
  lp.g.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) lp.E[i * m + j] = rows[j].a[i];
    lp.g[j] = -(rows[j].b - rhs_tighten);
  }
  return lp;
}

// (P_H) in standard form through x = u - v and one slack per row.
StandardLp primal_lp(const LipInstance& inst, const std::vector<Constraint>& rows) {
  const std::size_t n = static_cast<std::size_t>(inst.n), m = rows.size();
  StandardLp lp;
  lp.rows = m;
  lp.cols = 2 * n + m;
  lp.E.assign(m * (2 * n + m), 0.0);
  lp.d.resize(m);
  lp.g.assign(2 * n + m, 0.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      lp.at(t, i) = rows[t].a[i];
      lp.at(t, n + i) = -rows[t].a[i];
    }
    lp.at(t, 2 * n + t) = 1.0;
    lp.d[t] = rows[t].b;
  }
  for (std::size_t i = 0; i < n; ++i) {
    lp.g[i] = -inst.objective[i];
    lp.g[n + i] = inst.objective[i];
  }
  return lp;
}

std::vector<double> negated_objective(const LipInstance& inst) {
  std::vector<double> t(inst.objective);
  for (double& v : t) v = -v;
  return t;
}

struct RawDual {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> mu;
  std::vector<double> x;       // -row_duals (Optimal only)
  std::vector<double> farkas;  // Infeasible only
  double resid = 0.0;          // phase-1 residual (0 when feasible)
};

RawDual raw_dual_solve(const LipInstance& inst, const std::vector<Constraint>& rows,
                       const ToleranceConfig& tol, double rhs_tighten = 0.0) {
  LpOutcome out = solve_standard_lp(dual_lp(inst, rows, negated_objective(inst), rhs_tighten), tol);
  RawDual r;
  r.status = out.status;
  r.resid = out.infeasibility;
  if (out.status == LpStatus::Optimal) {
    r.value = out.value;
    r.mu = std::move(out.y);
    r.x.resize(static_cast<std::size_t>(inst.n));
    for (std::size_t i = 0; i < r.x.size(); ++i) r.x[i] = -out.row_duals[i];
  } else if (out.status == LpStatus::Infeasible) {
    r.farkas = std::move(out.farkas);
  }
  return r;
}

DualSolution make_dual_solution(IndexSubset H, const RawDual& raw) {
  DualSolution ds;
  ds.H = std::move(H);
  ds.mu = raw.mu;
  for (double& v : ds.mu)
    if (v < 0.0) v = 0.0;  // snap solver noise
  ds.value = raw.value;
  return ds;
}

}  // namespace

SubproblemOutcome solve_dual_subproblem(const LipInstance& inst, const IndexSubset& H,
                                        const ToleranceConfig& tol) {
  auto rows = constraint_rows(inst, H);
  RawDual raw = raw_dual_solve(inst, rows, tol);
  SubproblemOutcome out;
  if (raw.status == LpStatus::Optimal) {
    out.status = SubStatus::Optimal;
    out.dual_status = SubStatus::Optimal;
    out.value = raw.value;
    out.x = raw.x;
    out.dual = make_dual_solution(H, raw);
  } else if (raw.status == LpStatus::Unbounded) {
    // arbitrarily good multipliers exist, so (P_H) has no feasible point
    out.status = SubStatus::Infeasible;
    out.dual_status = SubStatus::Unbounded;
  } else {
    out.dual_status = SubStatus::Infeasible;
    if (feasibility(primal_lp(inst, rows), tol).feasible) {
      // the Farkas vector pi has <a_t, pi> <= 0 and <c, pi> < 0: a descent ray
      out.status = SubStatus::Unbounded;
      out.x = raw.farkas;
    } else {
      out.status = SubStatus::Infeasible;
    }
  }
  return out;
}

SubproblemOutcome solve_primal_subproblem(const LipInstance& inst, const IndexSubset& H,
                                          const ToleranceConfig& tol) {
  auto rows = constraint_rows(inst, H);
  const std::size_t n = static_cast<std::size_t>(inst.n);
  LpOutcome out = solve_standard_lp(primal_lp(inst, rows), tol);
  SubproblemOutcome r;
  if (out.status == LpStatus::Optimal) {
    r.status = SubStatus::Optimal;
    r.dual_status = SubStatus::Optimal;
    r.value = -out.value;
    r.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.x[i] = out.y[i] - out.y[n + i];
    DualSolution ds;
    ds.H = H;
    ds.mu = out.row_duals;
    for (double& v : ds.mu)
      if (v < 0.0) v = 0.0;
    ds.value = 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t) ds.value -= ds.mu[t] * rows[t].b;
    r.dual = std::move(ds);
  } else if (out.status == LpStatus::Unbounded) {
    r.status = SubStatus::Unbounded;
    r.dual_status = SubStatus::Infeasible;
    r.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.x[i] = out.ray[i] - out.ray[n + i];
  } else {
    r.status = SubStatus::Infeasible;
    // a feasible dual plus an infeasible primal makes the dual unbounded
    r.dual_status = feasibility(dual_lp(inst, rows, negated_objective(inst)), tol).feasible
                        ? SubStatus::Unbounded
                        : SubStatus::Infeasible;
  }
  return r;
}

namespace {

// Lexicographic quality of one candidate subset for the dual search:
// any dual-feasible candidate beats every infeasible one; feasible candidates
// compare by value; infeasible ones by how close phase 1 got.
struct RefineKey {
  int rank = 0;  // 1 = dual feasible, 0 = not
  double primary = -kInf;
};

bool key_better(const RefineKey& a, const RefineKey& b) {
  if (a.rank != b.rank) return a.rank > b.rank;
  return a.primary > b.primary;
}

RefineKey key_of(const RawDual& raw) {
  if (raw.status == LpStatus::Optimal) return {1, raw.value};
  if (raw.status == LpStatus::Unbounded) return {1, kInf};
  return {0, -raw.resid};
}

}  // namespace

BestDual sup_dual_over_family(const LipInstance& inst, const FamilySpec& spec,
                              const SearchParams& params) {
  auto sampled =
      sample_index_set(inst.index_set, params.grid.resolution, params.grid.countable_cap);
  auto fam = enumerate_family(spec, inst.index_set, sampled, params.budget);
  if (fam.subsets.empty()) throw EmptyFamily("family enumeration produced no subsets");

  BestDual out;
  out.family_exhausted = fam.exhausted;
  out.subsets_examined = static_cast<std::int64_t>(fam.subsets.size());

  const auto count = static_cast<std::ptrdiff_t>(fam.subsets.size());
  std::vector<double> resid(static_cast<std::size_t>(count), kInf);
  std::vector<char> unbounded(static_cast<std::size_t>(count), 0);
  auto value_key = [&](std::ptrdiff_t j) {
    auto ju = static_cast<std::size_t>(j);
    RawDual raw = raw_dual_solve(inst, constraint_rows(inst, fam.subsets[ju]), params.tol);
    resid[ju] = raw.status == LpStatus::Infeasible ? raw.resid : 0.0;
    unbounded[ju] = raw.status == LpStatus::Unbounded ? 1 : 0;
    return raw.status == LpStatus::Optimal ? raw.value : -kInf;
  };
  ScanBest grid_best = scan_max(count, value_key, params.mode);
  for (char u : unbounded) out.unbounded_seen = out.unbounded_seen || (u != 0);

  RefineKey best_key{0, -kInf};
  IndexSubset best_subset;
  if (grid_best.index >= 0 && grid_best.value > -kInf) {
    best_key = {1, grid_best.value};
    best_subset = fam.subsets[static_cast<std::size_t>(grid_best.index)];
  }

  bool can_refine = params.refine && spec.kind == FamilySpec::Kind::Singletons &&
                    inst.index_set.kind == IndexSet::Kind::Interval && count >= 2;
  if (can_refine) {
    out.refined = true;
    // seed at the best grid candidate, falling back to the singleton whose
    // dual came closest to feasibility when the whole grid is infeasible
    std::ptrdiff_t seed = grid_best.index;
    if (grid_best.value == -kInf) {
      seed = 0;
      for (std::ptrdiff_t j = 1; j < count; ++j)
        if (resid[static_cast<std::size_t>(j)] < resid[static_cast<std::size_t>(seed)]) seed = j;
    }
    double t0 = fam.subsets[static_cast<std::size_t>(seed)].values[0].v1;
    double lo = inst.index_set.f1.lo, hi = inst.index_set.f1.hi;
    double h = (hi - lo) / static_cast<double>(params.grid.resolution - 1);
    double a = std::max(lo, t0 - h), b = std::min(hi, t0 + h);

    double best_t = t0;
    RefineKey best_probe{0, -kInf};
    auto probe = [&](double t) {
      IndexSubset s{{IndexValue{t, 0.0, 1}}};
      RefineKey k = key_of(raw_dual_solve(inst, constraint_rows(inst, s), params.tol));
      if (key_better(k, best_probe)) {
        best_probe = k;
        best_t = t;
      }
      return k;
    };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    RefineKey k1 = probe(x1), k2 = probe(x2);
    while (b - a > tol::golden_width) {
      if (key_better(k2, k1)) {
        a = x1;
        x1 = x2;
        k1 = k2;
        x2 = a + phi * (b - a);
        k2 = probe(x2);
      } else {
        b = x2;
        x2 = x1;
        k2 = k1;
        x1 = b - phi * (b - a);
        k1 = probe(x1);
      }
    }
    if (best_probe.rank == 1 && key_better(best_probe, best_key) &&
        best_probe.primary < kInf) {
      best_key = best_probe;
      best_subset = IndexSubset{{IndexValue{best_t, 0.0, 1}}};
    }
  }

  if (best_key.rank == 1 && best_key.primary > -kInf && best_key.primary < kInf) {
    RawDual raw = raw_dual_solve(inst, constraint_rows(inst, best_subset), params.tol);
    if (raw.status == LpStatus::Optimal) out.best = make_dual_solution(best_subset, raw);
  }
  return out;
}

double eval_phi_H(const LipInstance& inst, const IndexSubset& H, const std::vector<double>& y,
                  const ToleranceConfig& tol) {
  if (y.size() != static_cast<std::size_t>(inst.n))
    throw DimensionMismatch("phi argument has the wrong dimension");
  auto rows = constraint_rows(inst, H);
  std::vector<double> target(y);
  for (std::size_t i = 0; i < target.size(); ++i) target[i] -= inst.objective[i];
  LpOutcome out = solve_standard_lp(dual_lp(inst, rows, target), tol);
  switch (out.status) {
    case LpStatus::Optimal:
      return -out.value;  // the LP maximizes -sum mu b
    case LpStatus::Unbounded:
      return -kInf;
    case LpStatus::Infeasible:
    default:
      return kInf;
  }
}

GapReport primal_bounds(const LipInstance& inst, const BoundsParams& params) {
  GapReport rep;
  rep.grid = params.grid;
  rep.validation_grid = {params.grid.resolution * 2, params.grid.countable_cap * 2};

  auto sampled =
      sample_index_set(inst.index_set, params.grid.resolution, params.grid.countable_cap);
  IndexSubset full{sampled};
  auto rows = constraint_rows(inst, full);

  // value of the full-grid subproblem, solved through its dual so the LP has
  // n rows no matter how dense the grid is
  RawDual grid_solve = raw_dual_solve(inst, rows, params.tol);
  double full_value;
  if (grid_solve.status == LpStatus::Optimal) {
    full_value = grid_solve.value;
  } else if (grid_solve.status == LpStatus::Unbounded) {
    full_value = kInf;  // no feasible point on the grid, hence none at all
  } else if (rows.size() <= 20000) {
    full_value = feasibility(primal_lp(inst, rows), params.tol).feasible ? -kInf : kInf;
  } else {
    full_value = -kInf;  // too large to classify; keep the bound conservative
  }

  FamilySpec bounded;
  bounded.kind = FamilySpec::Kind::BoundedSubsets;
  bounded.max_cardinality = params.max_cardinality;
  SearchParams sp;
  sp.grid = params.grid;
  sp.budget = params.family_budget;
  sp.mode = params.mode;
  sp.tol = params.tol;
  BestDual family = sup_dual_over_family(inst, bounded, sp);
  double family_value = family.best ? family.best->value : -kInf;
  if (family.unbounded_seen) family_value = kInf;

  rep.lower = std::max(full_value, family_value);

  // upper bound: push the grid minimizer into the validated feasible region
  rep.upper = kInf;
  if (grid_solve.status == LpStatus::Optimal) {
    auto validation = sample_index_set(inst.index_set, rep.validation_grid.resolution,
                                       rep.validation_grid.countable_cap);
    std::vector<double> x = grid_solve.x;
    double tighten = 0.0;
    for (int attempt = 0; attempt <= 4; ++attempt) {
      ScanBest worst = scan_max(
          static_cast<std::ptrdiff_t>(validation.size()),
          [&](std::ptrdiff_t j) {
            Constraint c = evaluate_constraint(inst, validation[static_cast<std::size_t>(j)]);
            double lhs = -c.b;
            for (std::size_t i = 0; i < x.size(); ++i) lhs += c.a[i] * x[i];
            return lhs;
          },
          params.mode);
      if (worst.value <= tol::validation_margin) {
        double cx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) cx += inst.objective[i] * x[i];
        rep.upper = cx;
        rep.witness_x = x;
        break;
      }
      if (attempt == 4) break;
      tighten += worst.value + tol::validation_margin;
      RawDual pushed = raw_dual_solve(inst, rows, params.tol, tighten);
      if (pushed.status != LpStatus::Optimal) break;
      x = pushed.x;
    }
  }

  if (rep.lower == rep.upper)
    rep.gap = 0.0;  // covers the two infinite-but-equal corners
  else
    rep.gap = rep.upper - rep.lower;
  return rep;
}

StrongDualityReport strong_duality_at(const LipInstance& inst, const FamilySpec& spec,
                                      const std::vector<double>& y, const SearchParams& params) {
  auto sampled =
      sample_index_set(inst.index_set, params.grid.resolution, params.grid.countable_cap);
  auto fam = enumerate_family(spec, inst.index_set, sampled, params.budget);
  if (fam.subsets.empty()) throw EmptyFamily("family enumeration produced no subsets");

  ScanBest best = scan_max(
      static_cast<std::ptrdiff_t>(fam.subsets.size()),
      [&](std::ptrdiff_t j) {
        return -eval_phi_H(inst, fam.subsets[static_cast<std::size_t>(j)], y, params.tol);
      },
      params.mode);

  StrongDualityReport rep;
  rep.phi_family_value = -best.value;

  LipInstance shifted = inst;
  for (std::size_t i = 0; i < shifted.objective.size(); ++i) shifted.objective[i] -= y[i];
  BoundsParams bp;
  bp.grid = {params.grid.resolution * 2, params.grid.countable_cap * 2};
  bp.family_budget = std::min<std::int64_t>(params.budget, 512);
  bp.mode = params.mode;
  bp.tol = params.tol;
  rep.conj_estimate = -primal_bounds(shifted, bp).lower;

  rep.attained = std::isfinite(rep.conj_estimate) && std::isfinite(rep.phi_family_value) &&
                 std::fabs(rep.conj_estimate - rep.phi_family_value) <= 1e-6;
  return rep;
}

}  // namespace hdual
