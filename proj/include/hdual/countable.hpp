#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hdual/duality.hpp"
#include "hdual/model.hpp"
#include "hdual/tolerances.hpp"

namespace hdual {

// Values of the nested subproblems along H_1 c H_2 c ... where H_m collects
// the first m countable indices. Primal entries are +inf for an infeasible
// subproblem and -inf for an unbounded one; dual entries mirror that.
struct PrefixTrace {
  std::vector<int> m_values;
  std::vector<double> primal_values;
  std::vector<double> dual_values;
  // smallest m whose dual value already agrees with the final one, reported
  // only when the final value is finite and the last stab_window entries are
  // flat to within the stabilization tolerance
  std::optional<int> stabilized_at;
};

struct TraceParams {
  // Product sets freeze their interval factor to this grid and maximize over
  // it inside every H_m, so only the countable factor is walked.
  int interval_resolution = 101;
  ToleranceConfig tol;
};

// Throws NotCountable unless the index set is Countable, or a Product of one
// Interval and one Countable factor.
PrefixTrace prefix_trace(const LipInstance& inst, int m_max, const TraceParams& params = {});

// One row per m: m,primal,dual,gap with gap = primal - dual (0 when both ends
// are the same infinity). LF line endings, header row included.
std::string trace_to_csv(const PrefixTrace& trace);

struct LimitReport {
  double dual_limit_estimate = 0.0;    // last trace entry
  double primal_limit_estimate = 0.0;
  bool dual_still_increasing = false;  // movement inside the tail window
  bool primal_still_increasing = false;
  bool zero_gap_indicator = false;     // tail primal and dual agree
  bool hn_reducible_indicator = false; // stabilized and gap-free
};

// Tail summary of a trace; the window is the last ceil(tail_fraction * m_max)
// entries, at least two. Throws TraceTooShort for traces under five entries.
LimitReport limit_report(const PrefixTrace& trace, double tail_fraction = 0.2);

}  // namespace hdual
