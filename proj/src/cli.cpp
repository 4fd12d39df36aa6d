#include "hdual/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdual/certify.hpp"
#include "hdual/countable.hpp"
#include "hdual/duality.hpp"
#include "hdual/errors.hpp"
#include "hdual/model.hpp"

namespace hdual {

namespace {

// Bad flag combinations detected after CLI11 parsing. Distinct from
// hdual::Error so the exit-code mapping stays explicit.
struct UsageFailure {
  std::string msg;
};

struct Common {
  std::string builtin, instance, objective;
  std::string family = "singletons";
  std::string format = "text";
  std::string exec = "parallel";
  std::string out_path;
  int grid = 101;
  std::int64_t cap = 8;
  int kappa = 3;
  std::int64_t budget = 100000;
  bool budget_given = false;
  bool refine = false;
  int prefix_max = 0;
};

double strict_double(const std::string& token, const char* what) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw UsageFailure{std::string("bad ") + what + " '" + token + "'"};
  return v;
}

std::vector<double> parse_objective(const std::string& text) {
  std::vector<double> vals;
  if (text.empty()) return vals;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    std::string tok = text.substr(start, comma == std::string::npos ? comma : comma - start);
    vals.push_back(strict_double(tok, "objective entry"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return vals;
}

LipInstance load_instance(const Common& c) {
  if (c.builtin.empty() == c.instance.empty())
    throw UsageFailure{"pass exactly one of --builtin and --instance"};
  std::vector<double> obj = parse_objective(c.objective);
  if (!c.builtin.empty()) return builtin_instance(c.builtin, obj);
  std::ifstream f(c.instance);
  if (!f) throw ParseError("cannot open instance file '" + c.instance + "'");
  LipInstance inst = parse_instance(f);
  if (!obj.empty()) {
    if (obj.size() != static_cast<std::size_t>(inst.n))
      throw UsageFailure{"--objective length does not match the instance dimension"};
    inst.objective = obj;
  }
  return inst;
}

FamilySpec family_spec(const Common& c) {
  FamilySpec spec;
  if (c.family == "singletons") {
    spec.kind = FamilySpec::Kind::Singletons;
  } else if (c.family == "prefixes") {
    spec.kind = FamilySpec::Kind::Prefixes;
    spec.prefix_max = c.prefix_max;
  } else if (c.family == "bounded") {
    spec.kind = FamilySpec::Kind::BoundedSubsets;
    spec.max_cardinality = c.kappa;
  } else {
    throw UsageFailure{"unknown family '" + c.family + "'"};
  }
  return spec;
}

ExecMode exec_mode(const Common& c) {
  return c.exec == "serial" ? ExecMode::Serial : ExecMode::Parallel;
}

SearchParams search_params(const Common& c) {
  SearchParams sp;
  sp.grid = {c.grid, c.cap};
  sp.budget = c.budget;
  sp.refine = c.refine;
  sp.mode = exec_mode(c);
  return sp;
}

BoundsParams bounds_params(const Common& c) {
  BoundsParams bp;
  bp.grid = {c.grid, c.cap};
  bp.max_cardinality = c.kappa;
  if (c.budget_given) bp.family_budget = c.budget;
  bp.mode = exec_mode(c);
  return bp;
}

std::string yesno(bool v) { return v ? "yes" : "no"; }
std::string bit(bool v) { return v ? "1" : "0"; }

std::string join_values(const std::vector<double>& vals, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += sep;
    out += format_double(vals[i]);
  }
  return out;
}

std::string join_subset(const IndexSubset& H, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < H.values.size(); ++i) {
    if (i) out += sep;
    out += render_index(H.values[i]);
  }
  return out;
}

std::string status_word(ChainStatus s) {
  switch (s) {
    case ChainStatus::HoldsOnGrid:
      return "holds_on_grid";
    case ChainStatus::FailsOnGrid:
      return "fails_on_grid";
    default:
      return "undecided";
  }
}

// Writes the report to --out when given, otherwise to the output stream, and
// passes the command's exit code through.
int finish(const std::string& text, const Common& c, std::ostream& out, std::ostream& err,
           int code) {
  if (c.out_path.empty()) {
    out << text;
    return code;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << c.out_path << "'\n";
    return 1;
  }
  f << text;
  return code;
}

int cmd_solve(const Common& c, std::ostream& out, std::ostream& err) {
  LipInstance inst = load_instance(c);
  GapReport rep = primal_bounds(inst, bounds_params(c));
  std::string text;
  if (c.format == "csv") {
    text = "lower,upper,gap,witness\n";
    text += format_double(rep.lower) + "," + format_double(rep.upper) + "," +
            format_double(rep.gap) + ",";
    if (rep.witness_x) text += join_values(*rep.witness_x, ";");
    text += "\n";
  } else {
    text += "lower: " + format_double(rep.lower) + "\n";
    text += "upper: " + format_double(rep.upper) + "\n";
    text += "gap: " + format_double(rep.gap) + "\n";
    text += "witness: " + (rep.witness_x ? join_values(*rep.witness_x, " ") : "none") + "\n";
    text += "grid: " + std::to_string(rep.grid.resolution) + "x" +
            std::to_string(rep.grid.countable_cap) + "\n";
    text += "validation: " + std::to_string(rep.validation_grid.resolution) + "x" +
            std::to_string(rep.validation_grid.countable_cap) + "\n";
  }
  return finish(text, c, out, err, 0);
}

int cmd_dual(const Common& c, std::ostream& out, std::ostream& err) {
  LipInstance inst = load_instance(c);
  BestDual rep = sup_dual_over_family(inst, family_spec(c), search_params(c));
  std::string text;
  if (c.format == "csv") {
    text = "value,subset,mu,examined,exhausted,refined\n";
    text += rep.best ? format_double(rep.best->value) : "-inf";
    text += ",";
    if (rep.best) text += join_subset(rep.best->H, ";");
    text += ",";
    if (rep.best) text += join_values(rep.best->mu, ";");
    text += "," + std::to_string(rep.subsets_examined) + "," + bit(rep.family_exhausted) + "," +
            bit(rep.refined) + "\n";
  } else {
    text += "value: " + (rep.best ? format_double(rep.best->value) : std::string("-inf")) + "\n";
    text += "subset: " + (rep.best ? join_subset(rep.best->H, " ") : std::string("none")) + "\n";
    text += "mu: " + (rep.best ? join_values(rep.best->mu, " ") : std::string("none")) + "\n";
    text += "examined: " + std::to_string(rep.subsets_examined) + "\n";
    text += "exhausted: " + yesno(rep.family_exhausted) + "\n";
    text += "refined: " + yesno(rep.refined) + "\n";
  }
  return finish(text, c, out, err, 0);
}

int cmd_certify(const Common& c, const std::string& alpha_str, std::ostream& out,
                std::ostream& err) {
  LipInstance inst = load_instance(c);
  double alpha;
  if (alpha_str == "auto") {
    GapReport bounds = primal_bounds(inst, bounds_params(c));
    if (!std::isfinite(bounds.upper)) {
      err << "no certificate: the validated upper bound is not finite\n";
      return 4;
    }
    // back the target off the validated bound so its safety margin does not
    // mask the membership test
    alpha = bounds.upper - tol::decision;
  } else {
    alpha = strict_double(alpha_str, "alpha");
  }
  auto cert = certify_reducibility(inst, family_spec(c), alpha, search_params(c));
  if (!cert) {
    err << "no certificate found at alpha " << format_double(alpha) << "\n";
    return 4;
  }
  std::string text;
  if (c.format == "csv") {
    text = "alpha,s,subset,mu\n";
    text += format_double(cert->alpha) + "," + format_double(cert->s) + "," +
            join_subset(cert->H, ";") + "," + join_values(cert->mu, ";") + "\n";
  } else {
    text = serialize_certificate(*cert) + "\n";
  }
  return finish(text, c, out, err, 0);
}

int cmd_verify(const Common& c, const std::string& cert_path, std::ostream& out,
               std::ostream& err) {
  LipInstance inst = load_instance(c);
  std::ifstream f(cert_path);
  if (!f) throw ParseError("cannot open certificate file '" + cert_path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  ReducibilityCertificate cert = parse_certificate(buf.str());
  VerifyResult res = verify_certificate(inst, cert);
  std::string text;
  if (c.format == "csv") {
    text = "valid,reason\n" + bit(res.valid) + "," + res.reason + "\n";
  } else {
    text = res.valid ? "valid\n" : "invalid: " + res.reason + "\n";
  }
  return finish(text, c, out, err, res.valid ? 0 : 4);
}

int cmd_chain(const Common& c, std::ostream& out, std::ostream& err) {
  LipInstance inst = load_instance(c);
  ChainParams params;
  params.grid = {c.grid, c.cap};
  params.budget = c.budget;
  params.refine = c.refine;
  params.max_cardinality = c.kappa;
  params.mode = exec_mode(c);
  ChainReport rep = theorem_chain_report(inst, family_spec(c), params);
  std::string text;
  if (c.format == "csv") {
    text = "i,ii,iii,iv,alpha_hat,lower,upper,best_dual,zero_gap_trend\n";
    text += status_word(rep.statement_i) + "," + status_word(rep.statement_ii) + "," +
            status_word(rep.statement_iii) + "," + status_word(rep.statement_iv) + "," +
            format_double(rep.alpha_hat) + "," + format_double(rep.bounds.lower) + "," +
            format_double(rep.bounds.upper) + "," + format_double(rep.best_dual_value) + "," +
            bit(rep.zero_gap_trend) + "\n";
  } else {
    text += "statement_i: " + status_word(rep.statement_i) + "\n";
    text += "statement_ii: " + status_word(rep.statement_ii) + "\n";
    text += "statement_iii: " + status_word(rep.statement_iii) + "\n";
    text += "statement_iv: " + status_word(rep.statement_iv) + "\n";
    text += "alpha_hat: " + format_double(rep.alpha_hat) + "\n";
    text += "lower: " + format_double(rep.bounds.lower) + "\n";
    text += "upper: " + format_double(rep.bounds.upper) + "\n";
    text += "best_dual: " + format_double(rep.best_dual_value) + "\n";
    text += "zero_gap_trend: " + yesno(rep.zero_gap_trend) + "\n";
    if (rep.certificate) text += serialize_certificate(*rep.certificate) + "\n";
    if (rep.attaining_subset) text += "attaining: " + join_subset(*rep.attaining_subset, " ") + "\n";
  }
  return finish(text, c, out, err, 0);
}

int cmd_prefix(const Common& c, int mmax, double tail, std::ostream& out, std::ostream& err) {
  LipInstance inst = load_instance(c);
  TraceParams tp;
  tp.interval_resolution = c.grid;
  PrefixTrace trace = prefix_trace(inst, mmax, tp);
  std::string text;
  if (c.format == "csv") {
    text = trace_to_csv(trace);
  } else {
    text += "m primal dual gap\n";
    for (std::size_t i = 0; i < trace.m_values.size(); ++i) {
      double p = trace.primal_values[i], d = trace.dual_values[i];
      double gap = p == d ? 0.0 : p - d;
      text += std::to_string(trace.m_values[i]) + " " + format_double(p) + " " + format_double(d) +
              " " + format_double(gap) + "\n";
    }
    text += "stabilized_at: ";
    text += trace.stabilized_at ? std::to_string(*trace.stabilized_at) : std::string("none");
    text += "\n";
    if (trace.m_values.size() >= 5) {
      LimitReport rep = limit_report(trace, tail);
      text += "dual_limit_estimate: " + format_double(rep.dual_limit_estimate) + "\n";
      text += "primal_limit_estimate: " + format_double(rep.primal_limit_estimate) + "\n";
      text += "dual_still_increasing: " + yesno(rep.dual_still_increasing) + "\n";
      text += "primal_still_increasing: " + yesno(rep.primal_still_increasing) + "\n";
      text += "zero_gap_indicator: " + yesno(rep.zero_gap_indicator) + "\n";
      text += "hn_reducible_indicator: " + yesno(rep.hn_reducible_indicator) + "\n";
    } else {
      text += "limit estimates need at least five prefixes\n";
    }
  }
  return finish(text, c, out, err, 0);
}

std::vector<std::vector<double>> parse_shifts(std::istream& in, int n) {
  std::vector<std::vector<double>> shifts;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line.erase(0, start);
    std::vector<double> y;
    std::size_t from = 0;
    while (true) {
      std::size_t comma = line.find(',', from);
      std::string tok = line.substr(from, comma == std::string::npos ? comma : comma - from);
      const char* begin = tok.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0') throw ParseError(ln, "bad shift entry '" + tok + "'");
      y.push_back(v);
      if (comma == std::string::npos) break;
      from = comma + 1;
    }
    if (y.size() != static_cast<std::size_t>(n))
      throw ParseError(ln, "shift has " + std::to_string(y.size()) + " entries, expected " +
                               std::to_string(n));
    shifts.push_back(std::move(y));
  }
  if (shifts.empty()) throw ParseError("shift file lists no vectors");
  return shifts;
}

int cmd_sweep(const Common& c, const std::string& shifts_path, std::ostream& out,
              std::ostream& err) {
  LipInstance inst = load_instance(c);
  std::ifstream f(shifts_path);
  if (!f) throw ParseError("cannot open shift file '" + shifts_path + "'");
  auto shifts = parse_shifts(f, inst.n);
  FamilySpec spec = family_spec(c);
  SearchParams sp = search_params(c);
  std::string text;
  if (c.format == "csv") text = "y,phi_family,conj_estimate,attained\n";
  for (const auto& y : shifts) {
    StrongDualityReport rep = strong_duality_at(inst, spec, y, sp);
    if (c.format == "csv") {
      text += join_values(y, ";") + "," + format_double(rep.phi_family_value) + "," +
              format_double(rep.conj_estimate) + "," + bit(rep.attained) + "\n";
    } else {
      text += "y: " + join_values(y, ",") + " phi: " + format_double(rep.phi_family_value) +
              " conj: " + format_double(rep.conj_estimate) + " attained: " + yesno(rep.attained) +
              "\n";
    }
  }
  return finish(text, c, out, err, 0);
}

void add_instance_opts(CLI::App* sub, Common& c) {
  sub->add_option("--builtin", c.builtin,
                  "builtin instance: ex41, ex42, countable_gap, countable_reducible");
  sub->add_option("--instance", c.instance, "path to an instance file");
  sub->add_option("--objective", c.objective, "comma separated objective, overrides the default");
}

void add_grid_opts(CLI::App* sub, Common& c) {
  sub->add_option("--grid", c.grid, "points per interval factor (default 101)");
  sub->add_option("--cap", c.cap, "largest countable index sampled (default 8)");
}

void add_family_opts(CLI::App* sub, Common& c) {
  sub->add_option("--family", c.family, "singletons, prefixes or bounded (default singletons)")
      ->check(CLI::IsMember({"singletons", "prefixes", "bounded"}));
  sub->add_option("--kappa", c.kappa, "cardinality cap for bounded families (default 3)");
  sub->add_option("--prefix-max", c.prefix_max, "longest prefix considered, 0 = all sampled");
  sub->add_option("--budget", c.budget, "family enumeration budget (default 100000)")
      ->each([&c](const std::string&) { c.budget_given = true; });
  sub->add_flag("--refine", c.refine, "refine interval singletons past the grid");
}

void add_output_opts(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "text or csv (default text)")
      ->check(CLI::IsMember({"text", "csv"}));
  sub->add_option("--out", c.out_path, "write the report to this file");
  sub->add_option("--exec", c.exec, "serial or parallel scans (default parallel)")
      ->check(CLI::IsMember({"serial", "parallel"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"finite-subset duality toolkit for linear semi-infinite programs"};
  app.name("hdual");
  app.require_subcommand(1);
  app.footer(
      "csv reports use a fixed header row, '.' decimals, LF line endings and ';'\n"
      "between values of a list field\n"
      "exit codes: 0 success, 1 usage error, 2 input parse error,\n"
      "            3 numerical failure, 4 certificate not found or invalid");

  Common c;
  std::string alpha_str, cert_path, shifts_path;
  int mmax = 20;
  double tail = 0.2;

  CLI::App* solve = app.add_subcommand(
      "solve", "validated lower and upper bounds with a feasible witness");
  add_instance_opts(solve, c);
  add_grid_opts(solve, c);
  solve->add_option("--kappa", c.kappa, "cardinality cap of the bound-side family (default 3)");
  solve->add_option("--budget", c.budget, "bound-side family budget (default 512)")
      ->each([&c](const std::string&) { c.budget_given = true; });
  add_output_opts(solve, c);
  solve->footer("csv columns: lower,upper,gap,witness");

  CLI::App* dual = app.add_subcommand(
      "dual", "best dual value over a family of finite index subsets");
  add_instance_opts(dual, c);
  add_grid_opts(dual, c);
  add_family_opts(dual, c);
  add_output_opts(dual, c);
  dual->footer("csv columns: value,subset,mu,examined,exhausted,refined");

  CLI::App* certify = app.add_subcommand(
      "certify", "search the family for a finite reducibility certificate");
  add_instance_opts(certify, c);
  add_grid_opts(certify, c);
  add_family_opts(certify, c);
  certify->add_option("--alpha", alpha_str, "target value, or 'auto' for the validated bound")
      ->required();
  add_output_opts(certify, c);
  certify->footer("csv columns: alpha,s,subset,mu");

  CLI::App* verify = app.add_subcommand(
      "verify", "re-check a certificate file against the instance");
  add_instance_opts(verify, c);
  verify->add_option("--cert", cert_path, "certificate file to verify")->required();
  add_output_opts(verify, c);
  verify->footer("csv columns: valid,reason");

  CLI::App* chain = app.add_subcommand(
      "chain", "grid-scale verdicts on the four equivalent reducibility statements");
  add_instance_opts(chain, c);
  add_grid_opts(chain, c);
  add_family_opts(chain, c);
  add_output_opts(chain, c);
  chain->footer("csv columns: i,ii,iii,iv,alpha_hat,lower,upper,best_dual,zero_gap_trend");

  CLI::App* prefix = app.add_subcommand(
      "prefix", "subproblem values along nested prefixes of a countable set");
  add_instance_opts(prefix, c);
  prefix->add_option("--grid", c.grid, "interval grid frozen inside product sets (default 101)");
  prefix->add_option("--mmax", mmax, "number of prefixes to walk (default 20)");
  prefix->add_option("--tail", tail, "fraction of the trace used for limit estimates");
  add_output_opts(prefix, c);
  prefix->footer("csv columns: m,primal,dual,gap");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "family value function and conjugate estimate at given shifts");
  add_instance_opts(sweep, c);
  add_grid_opts(sweep, c);
  add_family_opts(sweep, c);
  sweep->add_option("--shifts", shifts_path, "file with one comma separated vector per line")
      ->required();
  add_output_opts(sweep, c);
  sweep->footer("csv columns: y,phi_family,conj_estimate,attained");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("hdual");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);  // renders the right (sub)command help, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(c, out, err);
    if (dual->parsed()) return cmd_dual(c, out, err);
    if (certify->parsed()) return cmd_certify(c, alpha_str, out, err);
    if (verify->parsed()) return cmd_verify(c, cert_path, out, err);
    if (chain->parsed()) return cmd_chain(c, out, err);
    if (prefix->parsed()) return cmd_prefix(c, mmax, tail, out, err);
    if (sweep->parsed()) return cmd_sweep(c, shifts_path, out, err);
    err << "error: no command selected\n";
    return 1;
  } catch (const UsageFailure& u) {
    err << "error: " << u.msg << "\n";
    return 1;
  } catch (const ParseError& p) {
    err << "parse error: " << p.what() << "\n";
    return 2;
  } catch (const NumericalBreakdown& n) {
    err << "numerical failure: " << n.what() << "\n";
    return 3;
  } catch (const BoundednessRequired& b) {
    err << "no certificate: " << b.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hdual
