#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "hdual/countable.hpp"
#include "hdual/duality.hpp"
#include "hdual/errors.hpp"
#include "hdual/model.hpp"

using namespace hdual;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LipInstance random_countable_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 2), coef(-2, 2);
  LipInstance inst;
  inst.n = dim(rng);
  inst.index_set.kind = IndexSet::Kind::Countable;
  inst.index_set.f1.kind = Factor::Kind::Countable;
  inst.family.dimension = inst.n;
  inst.family.coeff.resize(inst.n);
  auto rand_poly = [&](Poly2& p) {
    p.add_term(0, 0, coef(rng));
    p.add_term(1, 0, coef(rng));
    if (coef(rng) > 0) p.add_term(2, 0, coef(rng));
  };
  for (auto& p : inst.family.coeff) rand_poly(p);
  rand_poly(inst.family.rhs);
  inst.objective.resize(inst.n);
  bool all_zero = true;
  for (auto& c : inst.objective) {
    c = coef(rng);
    all_zero = all_zero && c == 0.0;
  }
  if (all_zero) inst.objective[0] = 1.0;
  return inst;
}

}  // namespace

TEST_CASE("the gap sequence follows its closed form and never stabilizes") {
  LipInstance inst = builtin_instance("countable_gap", {});
  PrefixTrace trace = prefix_trace(inst, 10);
  REQUIRE(trace.m_values.size() == 10);
  for (int m = 1; m <= 10; ++m) {
    double expected = 1.0 - 1.0 / static_cast<double>(m);
    CHECK(std::fabs(trace.dual_values[m - 1] - expected) <= 1e-10);
    CHECK(std::fabs(trace.primal_values[m - 1] - expected) <= 1e-10);
  }
  CHECK_FALSE(trace.stabilized_at.has_value());
}

TEST_CASE("the reducible sequence stabilizes at the first prefix") {
  LipInstance inst = builtin_instance("countable_reducible", {});
  PrefixTrace trace = prefix_trace(inst, 8);
  for (double v : trace.dual_values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : trace.primal_values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(trace.stabilized_at.has_value());
  CHECK(*trace.stabilized_at == 1);
}

TEST_CASE("a length-one trace carries a single value and no stabilization claim") {
  LipInstance inst = builtin_instance("countable_gap", {});
  PrefixTrace trace = prefix_trace(inst, 1);
  REQUIRE(trace.m_values == std::vector<int>{1});
  CHECK(trace.dual_values[0] == doctest::Approx(0.0));
  CHECK(trace.primal_values[0] == doctest::Approx(0.0));
  CHECK_FALSE(trace.stabilized_at.has_value());
}

TEST_CASE("product traces freeze the interval factor and walk the countable one") {
  LipInstance inst = builtin_instance("ex42", {1.0, 1.0});
  TraceParams params;
  params.interval_resolution = 101;
  PrefixTrace trace = prefix_trace(inst, 6, params);
  for (int m = 1; m <= 6; ++m) {
    double expected = 0.5 - 2.0 / static_cast<double>(m);
    CHECK(std::fabs(trace.dual_values[m - 1] - expected) <= 1e-9);
    CHECK(std::fabs(trace.primal_values[m - 1] - expected) <= 1e-9);
  }
  CHECK_FALSE(trace.stabilized_at.has_value());
}

TEST_CASE("trace preconditions reject unsuitable sets and arguments") {
  CHECK_THROWS_AS(prefix_trace(builtin_instance("ex41", {1.0, 1.0}), 5), NotCountable);

  LipInstance finite;
  finite.n = 1;
  finite.objective = {1.0};
  finite.index_set.kind = IndexSet::Kind::FiniteList;
  finite.index_set.labels = {0.0, 1.0};
  finite.family.dimension = 1;
  finite.family.coeff.resize(1);
  finite.family.coeff[0].add_term(0, 0, -1.0);
  CHECK_THROWS_AS(prefix_trace(finite, 5), NotCountable);

  LipInstance twice = builtin_instance("ex42", {1.0, 1.0});
  twice.index_set.f1.kind = Factor::Kind::Countable;  // both factors countable
  CHECK_THROWS_AS(prefix_trace(twice, 5), NotCountable);

  CHECK_THROWS_AS(prefix_trace(builtin_instance("countable_gap", {}), 0), Error);

  TraceParams bad;
  bad.interval_resolution = 1;
  CHECK_THROWS_AS(prefix_trace(builtin_instance("ex42", {1.0, 1.0}), 3, bad), InvalidResolution);
}

TEST_CASE("prefix values are monotone and each subproblem pair agrees") {
  std::mt19937_64 rng(555);
  int finite_pairs = 0;
  for (int trial = 0; trial < 40; ++trial) {
    LipInstance inst = random_countable_instance(rng);
    PrefixTrace trace = prefix_trace(inst, 6);
    for (std::size_t i = 0; i < trace.m_values.size(); ++i) {
      double p = trace.primal_values[i], d = trace.dual_values[i];
      // a finite-data LP attains on both sides or on neither
      CHECK(std::isfinite(p) == std::isfinite(d));
      if (std::isfinite(p) && std::isfinite(d)) {
        CHECK(std::fabs(p - d) <= 1e-7 * std::max(1.0, std::fabs(p)));
        ++finite_pairs;
      }
      if (i > 0) {
        // growing the prefix adds constraints and dual columns
        if (std::isfinite(p) && std::isfinite(trace.primal_values[i - 1]))
          CHECK(p >= trace.primal_values[i - 1] - 1e-9);
        if (std::isfinite(d) && std::isfinite(trace.dual_values[i - 1]))
          CHECK(d >= trace.dual_values[i - 1] - 1e-9);
      }
    }
  }
  CHECK(finite_pairs > 30);
}

TEST_CASE("the trace tail matches the prefix family search") {
  LipInstance inst = builtin_instance("countable_gap", {});
  PrefixTrace trace = prefix_trace(inst, 10);
  FamilySpec prefixes;
  prefixes.kind = FamilySpec::Kind::Prefixes;
  SearchParams sp;
  sp.grid = {2, 10};
  BestDual best = sup_dual_over_family(inst, prefixes, sp);
  REQUIRE(best.best.has_value());
  CHECK(best.best->value == doctest::Approx(trace.dual_values.back()).epsilon(1e-12));
}

TEST_CASE("a zero objective is reducible at the first prefix") {
  LipInstance inst = builtin_instance("countable_gap", {0.0});
  PrefixTrace trace = prefix_trace(inst, 8);
  for (double v : trace.dual_values) CHECK(v == 0.0);
  for (double v : trace.primal_values) CHECK(v == 0.0);
  REQUIRE(trace.stabilized_at.has_value());
  CHECK(*trace.stabilized_at == 1);
  LimitReport rep = limit_report(trace);
  CHECK(rep.hn_reducible_indicator);
  CHECK(rep.zero_gap_indicator);
  CHECK_FALSE(rep.dual_still_increasing);
}

TEST_CASE("csv export is stable, headed and line-feed terminated") {
  LipInstance inst = builtin_instance("countable_gap", {});
  PrefixTrace trace = prefix_trace(inst, 5);
  std::string csv = trace_to_csv(trace);
  CHECK(csv.substr(0, 17) == "m,primal,dual,gap");
  CHECK(csv.find("\n1,0,0,0\n") != std::string::npos);
  CHECK(csv.find("\n2,0.5,0.5,0\n") != std::string::npos);
  CHECK(csv.back() == '\n');
  CHECK(csv.find('\r') == std::string::npos);
  int rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 6);  // header plus five entries
  CHECK(trace_to_csv(prefix_trace(inst, 5)) == csv);
}

TEST_CASE("limit reports summarize the tail of a trace") {
  LipInstance gap = builtin_instance("countable_gap", {});
  LimitReport moving = limit_report(prefix_trace(gap, 100));
  CHECK(moving.dual_limit_estimate == doctest::Approx(0.99).epsilon(1e-10));
  CHECK(moving.primal_limit_estimate == doctest::Approx(0.99).epsilon(1e-10));
  CHECK(moving.dual_still_increasing);
  CHECK(moving.primal_still_increasing);
  CHECK(moving.zero_gap_indicator);  // each finite subproblem closes its own gap
  CHECK_FALSE(moving.hn_reducible_indicator);

  LipInstance red = builtin_instance("countable_reducible", {});
  LimitReport settled = limit_report(prefix_trace(red, 10));
  CHECK(settled.dual_limit_estimate == doctest::Approx(1.0));
  CHECK_FALSE(settled.dual_still_increasing);
  CHECK(settled.zero_gap_indicator);
  CHECK(settled.hn_reducible_indicator);

  CHECK_THROWS_AS(limit_report(prefix_trace(gap, 4)), TraceTooShort);
  PrefixTrace t = prefix_trace(gap, 6);
  CHECK_THROWS_AS(limit_report(t, 0.0), Error);
  CHECK_THROWS_AS(limit_report(t, 1.5), Error);
}

TEST_CASE("an inconsistent sequence reports infinite ends and no reduction") {
  LipInstance inst;
  inst.n = 1;
  inst.objective = {1.0};
  inst.index_set.kind = IndexSet::Kind::Countable;
  inst.family.dimension = 1;
  inst.family.coeff.resize(1);       // zero row: 0 * x <= -1 for every k
  inst.family.rhs.add_term(0, 0, -1.0);
  PrefixTrace trace = prefix_trace(inst, 6);
  for (double v : trace.primal_values) CHECK(v == kInf);
  for (double v : trace.dual_values) CHECK(v == -kInf);
  CHECK_FALSE(trace.stabilized_at.has_value());
  LimitReport rep = limit_report(trace);
  CHECK(rep.dual_limit_estimate == -kInf);
  CHECK(rep.primal_limit_estimate == kInf);
  CHECK_FALSE(rep.zero_gap_indicator);
  CHECK_FALSE(rep.hn_reducible_indicator);
  std::string csv = trace_to_csv(trace);
  CHECK(csv.find("1,inf,-inf,inf") != std::string::npos);
}
