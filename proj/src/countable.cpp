#include "hdual/countable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdual/errors.hpp"

namespace hdual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double primal_entry(const SubproblemOutcome& out) {
  if (out.status == SubStatus::Optimal) return out.value;
  return out.status == SubStatus::Unbounded ? -kInf : kInf;
}

double dual_entry(const SubproblemOutcome& out) {
  if (out.dual_status == SubStatus::Optimal) return out.value;
  return out.dual_status == SubStatus::Unbounded ? kInf : -kInf;
}

std::vector<IndexValue> prefix_values(const IndexSet& set, int m, int resolution) {
  std::vector<IndexValue> vals;
  if (set.kind == IndexSet::Kind::Countable) {
    for (int k = 1; k <= m; ++k) vals.push_back({static_cast<double>(k), 0.0, 1});
    return vals;
  }
  const bool first_countable = set.f1.kind == Factor::Kind::Countable;
  IndexSet line;
  line.kind = IndexSet::Kind::Interval;
  line.f1 = first_countable ? set.f2 : set.f1;
  auto grid = sample_index_set(line, resolution, 1);
  for (int k = 1; k <= m; ++k)
    for (const IndexValue& g : grid)
      vals.push_back(first_countable ? IndexValue{static_cast<double>(k), g.v1, 2}
                                     : IndexValue{g.v1, static_cast<double>(k), 2});
  return vals;
}

}  // namespace

PrefixTrace prefix_trace(const LipInstance& inst, int m_max, const TraceParams& params) {
  const IndexSet& set = inst.index_set;
  const bool walkable =
      set.kind == IndexSet::Kind::Countable ||
      (set.kind == IndexSet::Kind::Product &&
       (set.f1.kind == Factor::Kind::Countable) != (set.f2.kind == Factor::Kind::Countable));
  if (!walkable) throw NotCountable("prefix traces need one countable index dimension");
  if (m_max < 1) throw Error("prefix traces need m_max >= 1");
  if (set.kind == IndexSet::Kind::Product && params.interval_resolution < 2)
    throw InvalidResolution("interval grids need at least two points");

  PrefixTrace trace;
  for (int m = 1; m <= m_max; ++m) {
    IndexSubset H{prefix_values(set, m, params.interval_resolution)};
    trace.m_values.push_back(m);
    trace.dual_values.push_back(dual_entry(solve_dual_subproblem(inst, H, params.tol)));
    trace.primal_values.push_back(primal_entry(solve_primal_subproblem(inst, H, params.tol)));
  }

  const double final_dual = trace.dual_values.back();
  if (std::isfinite(final_dual)) {
    int s = m_max;
    for (int m = m_max - 1; m >= 1; --m) {
      double v = trace.dual_values[static_cast<std::size_t>(m - 1)];
      if (!std::isfinite(v) || std::fabs(v - final_dual) > tol::stabilization) break;
      s = m;
    }
    if (s <= m_max - tol::stab_window + 1) trace.stabilized_at = s;
  }
  return trace;
}

std::string trace_to_csv(const PrefixTrace& trace) {
  std::string out = "m,primal,dual,gap\n";
  for (std::size_t i = 0; i < trace.m_values.size(); ++i) {
    double p = trace.primal_values[i], d = trace.dual_values[i];
    double gap = p == d ? 0.0 : p - d;  // matching infinities count as closed
    out += std::to_string(trace.m_values[i]);
    out += ',';
    out += format_double(p);
    out += ',';
    out += format_double(d);
    out += ',';
    out += format_double(gap);
    out += '\n';
  }
  return out;
}

LimitReport limit_report(const PrefixTrace& trace, double tail_fraction) {
  const std::size_t m = trace.m_values.size();
  if (m < 5) throw TraceTooShort("limit reports need at least five prefix values");
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
    throw Error("tail fraction must be in (0, 1]");
  std::size_t len =
      static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(m)));
  len = std::max<std::size_t>(2, std::min(len, m));
  const std::size_t from = m - len;

  LimitReport rep;
  rep.dual_limit_estimate = trace.dual_values.back();
  rep.primal_limit_estimate = trace.primal_values.back();

  auto moved = [&](const std::vector<double>& vals) {
    for (std::size_t i = from + 1; i < m; ++i) {
      double a = vals[i - 1], b = vals[i];
      if (!std::isfinite(a) || !std::isfinite(b)) {
        if (a != b) return true;
        continue;
      }
      if (b - a > tol::stabilization) return true;
    }
    return false;
  };
  rep.dual_still_increasing = moved(trace.dual_values);
  rep.primal_still_increasing = moved(trace.primal_values);

  bool gap_ok = true;
  for (std::size_t i = from; i < m; ++i) {
    double p = trace.primal_values[i], d = trace.dual_values[i];
    if (p == d) continue;
    gap_ok = gap_ok && std::isfinite(p) && std::isfinite(d) && std::fabs(p - d) <= 1e-6;
  }
  rep.zero_gap_indicator = gap_ok;
  rep.hn_reducible_indicator = trace.stabilized_at.has_value() && gap_ok;
  return rep;
}

}  // namespace hdual
