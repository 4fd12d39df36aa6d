// Times the serial reference implementation against the OpenMP scans on the
// three hot kernels and verifies both produce identical results.

#include "hdual/certify.hpp"
#include "hdual/duality.hpp"
#include "hdual/exec.hpp"
#include "hdual/model.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double best_of(int repeat, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeat; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

bool same_solution(const std::optional<hdual::DualSolution>& a,
                   const std::optional<hdual::DualSolution>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->value == b->value && a->mu == b->mu && a->H == b->H;
}

bool same_cert(const std::optional<hdual::ReducibilityCertificate>& a,
               const std::optional<hdual::ReducibilityCertificate>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->mu == b->mu && a->s == b->s && a->alpha == b->alpha && a->H == b->H;
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-22s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms, match ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  std::string builtin = "ex41";
  int resolution = 201;
  int cap = 8;
  int kappa = 2;
  int repeat = 3;
  app.add_option("--builtin", builtin, "builtin instance name");
  app.add_option("--grid", resolution, "interval grid resolution");
  app.add_option("--cap", cap, "countable truncation bound");
  app.add_option("--kappa", kappa, "max subset cardinality in the scan family");
  app.add_option("--repeat", repeat, "repetitions per kernel, best time wins");
  CLI11_PARSE(app, argc, argv);

  const auto inst = hdual::builtin_instance(builtin, {});
  const hdual::GridParams grid{resolution, cap};

#ifdef _OPENMP
  std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("openmp: not compiled in, parallel falls back to serial\n");
#endif
  std::printf("instance %s, grid %dx%d, kappa %d, best of %d\n\n", builtin.c_str(),
              resolution, cap, kappa, repeat);

  bool all_match = true;

  {
    hdual::FamilySpec family;
    family.kind = hdual::FamilySpec::Kind::BoundedSubsets;
    family.max_cardinality = kappa;
    hdual::SearchParams params;
    params.grid = grid;
    params.budget = 400000;

    hdual::BestDual serial_out, parallel_out;
    params.mode = hdual::ExecMode::Serial;
    const double s_ms = best_of(repeat, [&] {
      serial_out = hdual::sup_dual_over_family(inst, family, params);
    });
    params.mode = hdual::ExecMode::Parallel;
    const double p_ms = best_of(repeat, [&] {
      parallel_out = hdual::sup_dual_over_family(inst, family, params);
    });
    const bool ok = same_solution(serial_out.best, parallel_out.best) &&
                    serial_out.family_exhausted == parallel_out.family_exhausted;
    all_match = all_match && ok;
    report("dual family scan", s_ms, p_ms, ok);
  }

  {
    hdual::BoundsParams params;
    params.grid = grid;
    params.max_cardinality = 3;

    hdual::GapReport serial_out, parallel_out;
    params.mode = hdual::ExecMode::Serial;
    const double s_ms = best_of(repeat, [&] {
      serial_out = hdual::primal_bounds(inst, params);
    });
    params.mode = hdual::ExecMode::Parallel;
    const double p_ms = best_of(repeat, [&] {
      parallel_out = hdual::primal_bounds(inst, params);
    });
    const bool ok = serial_out.lower == parallel_out.lower &&
                    serial_out.upper == parallel_out.upper &&
                    serial_out.witness_x == parallel_out.witness_x;
    all_match = all_match && ok;
    report("validated bounds", s_ms, p_ms, ok);
  }

  {
    // target just under the family optimum so the scan hits mid-enumeration
    hdual::FamilySpec singles;
    singles.kind = hdual::FamilySpec::Kind::Singletons;
    hdual::SearchParams probe;
    probe.grid = grid;
    const auto best = hdual::sup_dual_over_family(inst, singles, probe);
    if (!best.best) {
      std::printf("certificate scan skipped, no finite dual value on this grid\n");
    } else {
      const double alpha = best.best->value - 1e-7;
      hdual::SearchParams params;
      params.grid = grid;
      params.budget = 400000;

      std::optional<hdual::ReducibilityCertificate> serial_out, parallel_out;
      params.mode = hdual::ExecMode::Serial;
      const double s_ms = best_of(repeat, [&] {
        serial_out = hdual::certify_reducibility(inst, singles, alpha, params);
      });
      params.mode = hdual::ExecMode::Parallel;
      const double p_ms = best_of(repeat, [&] {
        parallel_out = hdual::certify_reducibility(inst, singles, alpha, params);
      });
      const bool ok = same_cert(serial_out, parallel_out);
      all_match = all_match && ok;
      report("certificate scan", s_ms, p_ms, ok);
    }
  }

  if (!all_match) {
    std::printf("\nserial and parallel kernels disagree\n");
    return 1;
  }
  return 0;
}
