#include "hdual/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>

namespace hdual {

// --- formatting -------------------------------------------------------------

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // a negative zero would round-trip but reads badly
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string render_index(const IndexValue& iv) {
  if (iv.arity == 1) return format_double(iv.v1);
  return "(" + format_double(iv.v1) + "," + format_double(iv.v2) + ")";
}

IndexValue parse_index_token(const std::string& token) {
  auto num = [&](const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
      throw ParseError("bad index token '" + token + "'");
    return v;
  };
  if (!token.empty() && token.front() == '(') {
    if (token.back() != ')') throw ParseError("bad index token '" + token + "'");
    auto comma = token.find(',');
    if (comma == std::string::npos) throw ParseError("bad index token '" + token + "'");
    IndexValue iv;
    iv.arity = 2;
    iv.v1 = num(token.substr(1, comma - 1));
    iv.v2 = num(token.substr(comma + 1, token.size() - comma - 2));
    return iv;
  }
  IndexValue iv;
  iv.v1 = num(token);
  return iv;
}

std::string render_subset(const IndexSubset& subset) {
  std::string out;
  for (std::size_t i = 0; i < subset.values.size(); ++i) {
    if (i) out += ' ';
    out += render_index(subset.values[i]);
  }
  return out;
}

// --- polynomials ------------------------------------------------------------

Poly2::Poly2(std::vector<Term> terms) {
  for (const Term& t : terms) add_term(t.d1, t.d2, t.c);
}

void Poly2::add_term(int d1, int d2, double c) {
  if (d1 < 0 || d1 > kMaxDegree || d2 < 0 || d2 > kMaxDegree)
    throw Error("polynomial degree out of range [0, 6]");
  for (Term& t : terms_) {
    if (t.d1 == d1 && t.d2 == d2) {
      t.c += c;
      if (t.c == 0.0) terms_.erase(terms_.begin() + (&t - terms_.data()));
      return;
    }
  }
  if (c == 0.0) return;
  Term nt{d1, d2, c};
  auto pos = std::lower_bound(terms_.begin(), terms_.end(), nt, [](const Term& x, const Term& y) {
    return x.d1 != y.d1 ? x.d1 < y.d1 : x.d2 < y.d2;
  });
  terms_.insert(pos, nt);
}

double Poly2::eval(double u1, double u2) const {
  double p1[kMaxDegree + 1], p2[kMaxDegree + 1];
  p1[0] = p2[0] = 1.0;
  for (int i = 1; i <= kMaxDegree; ++i) {
    p1[i] = p1[i - 1] * u1;
    p2[i] = p2[i - 1] * u2;
  }
  double acc = 0.0;
  for (const Term& t : terms_) acc += t.c * p1[t.d1] * p2[t.d2];
  return acc;
}

int Poly2::max_degree_u2() const {
  int d = 0;
  for (const Term& t : terms_) d = std::max(d, t.d2);
  return d;
}

// --- constraint evaluation --------------------------------------------------

namespace {

constexpr double kRangeTol = 1e-9;

void check_factor_value(const Factor& f, double v) {
  if (f.kind == Factor::Kind::Interval) {
    if (v < f.lo - kRangeTol || v > f.hi + kRangeTol)
      throw IndexOutOfRange("index " + format_double(v) + " outside [" + format_double(f.lo) +
                            ", " + format_double(f.hi) + "]");
  } else {
    double r = std::round(v);
    if (v < 1.0 - kRangeTol || std::fabs(v - r) > kRangeTol)
      throw IndexOutOfRange("index " + format_double(v) + " is not a positive integer");
  }
}

double factor_to_u(const Factor& f, double v) {
  return f.kind == Factor::Kind::Countable ? 1.0 / std::round(v) : v;
}

}  // namespace

Constraint evaluate_constraint(const LipInstance& inst, const IndexValue& iv) {
  const IndexSet& set = inst.index_set;
  if (iv.arity != set.arity())
    throw IndexOutOfRange("index arity " + std::to_string(iv.arity) + " does not match the set");

  double u1 = 0.0, u2 = 0.0;
  switch (set.kind) {
    case IndexSet::Kind::FiniteList: {
      bool found = false;
      for (double l : set.labels) found = found || (l == iv.v1);
      if (!found) throw IndexOutOfRange("label " + format_double(iv.v1) + " is not in the list");
      u1 = iv.v1;
      break;
    }
    case IndexSet::Kind::Interval:
      check_factor_value(set.f1, iv.v1);
      u1 = iv.v1;
      break;
    case IndexSet::Kind::Countable: {
      check_factor_value(Factor{Factor::Kind::Countable, 0, 0}, iv.v1);
      auto k = static_cast<std::int64_t>(std::llround(iv.v1));
      auto it = inst.family.overrides.find(k);
      if (it != inst.family.overrides.end()) return {it->second.a, it->second.b};
      u1 = 1.0 / static_cast<double>(k);
      break;
    }
    case IndexSet::Kind::Product:
      check_factor_value(set.f1, iv.v1);
      check_factor_value(set.f2, iv.v2);
      u1 = factor_to_u(set.f1, iv.v1);
      u2 = factor_to_u(set.f2, iv.v2);
      break;
  }

  Constraint c;
  c.a.resize(static_cast<std::size_t>(inst.n));
  for (int i = 0; i < inst.n; ++i) c.a[static_cast<std::size_t>(i)] = inst.family.coeff[static_cast<std::size_t>(i)].eval(u1, u2);
  c.b = inst.family.rhs.eval(u1, u2);
  return c;
}

// --- sampling ---------------------------------------------------------------

namespace {

std::vector<double> factor_samples(const Factor& f, int resolution, std::int64_t cap) {
  std::vector<double> out;
  if (f.kind == Factor::Kind::Interval) {
    if (resolution < 2) throw InvalidResolution("interval resolution must be >= 2");
    out.reserve(static_cast<std::size_t>(resolution));
    double h = (f.hi - f.lo) / static_cast<double>(resolution - 1);
    for (int i = 0; i < resolution; ++i)
      out.push_back(i == resolution - 1 ? f.hi : f.lo + h * static_cast<double>(i));
  } else {
    if (cap < 1) throw InvalidResolution("countable cap must be >= 1");
    out.reserve(static_cast<std::size_t>(cap));
    for (std::int64_t k = 1; k <= cap; ++k) out.push_back(static_cast<double>(k));
  }
  return out;
}

}  // namespace

std::vector<IndexValue> sample_index_set(const IndexSet& set, int resolution,
                                         std::int64_t countable_cap) {
  std::vector<IndexValue> out;
  switch (set.kind) {
    case IndexSet::Kind::FiniteList:
      for (double l : set.labels) out.push_back({l, 0.0, 1});
      break;
    case IndexSet::Kind::Interval:
    case IndexSet::Kind::Countable: {
      Factor f = set.kind == IndexSet::Kind::Countable
                     ? Factor{Factor::Kind::Countable, 0, 0}
                     : set.f1;
      for (double v : factor_samples(f, resolution, countable_cap)) out.push_back({v, 0.0, 1});
      break;
    }
    case IndexSet::Kind::Product: {
      auto s1 = factor_samples(set.f1, resolution, countable_cap);
      auto s2 = factor_samples(set.f2, resolution, countable_cap);
      out.reserve(s1.size() * s2.size());
      for (double a : s1)
        for (double b : s2) out.push_back({a, b, 2});
      break;
    }
  }
  return out;
}

// --- family enumeration -----------------------------------------------------

FamilyEnumeration enumerate_family(const FamilySpec& spec, const IndexSet& set,
                                   const std::vector<IndexValue>& sampled, std::int64_t budget) {
  if (budget < 1) throw Error("family budget must be >= 1");
  FamilyEnumeration out;
  auto room = [&] { return static_cast<std::int64_t>(out.subsets.size()) < budget; };

  switch (spec.kind) {
    case FamilySpec::Kind::Singletons:
      for (const IndexValue& iv : sampled) {
        if (!room()) {
          out.exhausted = false;
          break;
        }
        out.subsets.push_back({{iv}});
      }
      break;

    case FamilySpec::Kind::Prefixes: {
      if (set.kind != IndexSet::Kind::Countable)
        throw SpecSetMismatch("prefix families need a countable index set");
      std::size_t maxm = sampled.size();
      if (spec.prefix_max > 0) maxm = std::min(maxm, static_cast<std::size_t>(spec.prefix_max));
      for (std::size_t j = 1; j <= maxm; ++j) {
        if (!room()) {
          out.exhausted = false;
          break;
        }
        IndexSubset s;
        s.values.assign(sampled.begin(), sampled.begin() + static_cast<std::ptrdiff_t>(j));
        out.subsets.push_back(std::move(s));
      }
      break;
    }

    case FamilySpec::Kind::BoundedSubsets: {
      if (spec.max_cardinality < 1) throw Error("BoundedSubsets cardinality must be >= 1");
      const std::size_t s = sampled.size();
      const std::size_t kappa = std::min<std::size_t>(static_cast<std::size_t>(spec.max_cardinality), s);
      for (std::size_t size = 1; size <= kappa && out.exhausted; ++size) {
        std::vector<std::size_t> idx(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        while (true) {
          if (!room()) {
            out.exhausted = false;
            break;
          }
          IndexSubset sub;
          sub.values.reserve(size);
          for (std::size_t i : idx) sub.values.push_back(sampled[i]);
          out.subsets.push_back(std::move(sub));
          // next combination in lexicographic position order
          std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(size) - 1;
          while (pos >= 0 && idx[static_cast<std::size_t>(pos)] ==
                                 s - size + static_cast<std::size_t>(pos))
            --pos;
          if (pos < 0) break;
          ++idx[static_cast<std::size_t>(pos)];
          for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < size; ++i)
            idx[i] = idx[i - 1] + 1;
        }
      }
      break;
    }

    case FamilySpec::Kind::Explicit:
      for (const IndexSubset& s : spec.explicit_subsets) {
        if (!room()) {
          out.exhausted = false;
          break;
        }
        out.subsets.push_back(s);
      }
      break;
  }
  return out;
}

// --- parse / serialize ------------------------------------------------------

namespace {

double parse_num(const std::string& tok, int line) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw ParseError(line, "expected a number, got '" + tok + "'");
  return v;
}

std::int64_t parse_int(const std::string& tok, int line) {
  double v = parse_num(tok, line);
  if (v != std::floor(v)) throw ParseError(line, "expected an integer, got '" + tok + "'");
  return static_cast<std::int64_t>(v);
}

// Consumes one factor spec ("interval lo hi" or "countable") from tokens.
Factor parse_factor(const std::vector<std::string>& toks, std::size_t& pos, int line) {
  if (pos >= toks.size()) throw ParseError(line, "missing factor specification");
  const std::string& kind = toks[pos++];
  if (kind == "countable") return Factor{Factor::Kind::Countable, 0, 0};
  if (kind != "interval") throw ParseError(line, "unknown factor kind '" + kind + "'");
  if (pos + 1 >= toks.size()) throw ParseError(line, "interval needs two bounds");
  Factor f;
  f.kind = Factor::Kind::Interval;
  f.lo = parse_num(toks[pos++], line);
  f.hi = parse_num(toks[pos++], line);
  if (!(f.lo < f.hi)) throw ParseError(line, "degenerate interval: lo must be < hi");
  return f;
}

}  // namespace

LipInstance parse_instance(std::istream& in) {
  LipInstance inst;
  bool have_dim = false, have_obj = false, have_index = false;
  std::string raw;
  int line = 0;

  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    const std::string& key = toks[0];

    if (key == "dim") {
      if (have_dim) throw ParseError(line, "duplicate dim line");
      if (toks.size() != 2) throw ParseError(line, "dim takes one value");
      std::int64_t n = parse_int(toks[1], line);
      if (n < 1 || n > 64) throw ParseError(line, "dim must be in [1, 64]");
      inst.n = static_cast<int>(n);
      inst.family.dimension = inst.n;
      inst.family.coeff.assign(static_cast<std::size_t>(inst.n), Poly2{});
      have_dim = true;
    } else if (key == "objective") {
      if (!have_dim) throw ParseError(line, "objective must come after dim");
      if (have_obj) throw ParseError(line, "duplicate objective line");
      if (toks.size() != static_cast<std::size_t>(inst.n) + 1)
        throw ParseError(line, "objective needs exactly dim values");
      for (std::size_t i = 1; i < toks.size(); ++i)
        inst.objective.push_back(parse_num(toks[i], line));
      have_obj = true;
    } else if (key == "index") {
      if (have_index) throw ParseError(line, "duplicate index line");
      if (toks.size() < 2) throw ParseError(line, "index needs a set kind");
      std::size_t pos = 1;
      if (toks[1] == "finite") {
        inst.index_set.kind = IndexSet::Kind::FiniteList;
        for (pos = 2; pos < toks.size(); ++pos)
          inst.index_set.labels.push_back(parse_num(toks[pos], line));
        if (inst.index_set.labels.empty()) throw ParseError(line, "finite list needs labels");
      } else if (toks[1] == "product") {
        ++pos;
        inst.index_set.kind = IndexSet::Kind::Product;
        inst.index_set.f1 = parse_factor(toks, pos, line);
        inst.index_set.f2 = parse_factor(toks, pos, line);
        if (pos != toks.size()) throw ParseError(line, "trailing tokens after product factors");
      } else {
        Factor f = parse_factor(toks, pos, line);
        if (pos != toks.size()) throw ParseError(line, "trailing tokens after index set");
        inst.index_set.kind = f.kind == Factor::Kind::Countable ? IndexSet::Kind::Countable
                                                                : IndexSet::Kind::Interval;
        inst.index_set.f1 = f;
      }
      have_index = true;
    } else if (key == "coeff") {
      if (!have_dim) throw ParseError(line, "coeff must come after dim");
      if (toks.size() != 5) throw ParseError(line, "coeff takes: coord d1 d2 value");
      Poly2* target = nullptr;
      if (toks[1] == "b") {
        target = &inst.family.rhs;
      } else {
        std::int64_t i = parse_int(toks[1], line);
        if (i < 1 || i > inst.n)
          throw ParseError(line, "coordinate " + toks[1] + " outside [1, " +
                                     std::to_string(inst.n) + "]");
        target = &inst.family.coeff[static_cast<std::size_t>(i - 1)];
      }
      std::int64_t d1 = parse_int(toks[2], line), d2 = parse_int(toks[3], line);
      if (d1 < 0 || d1 > Poly2::kMaxDegree || d2 < 0 || d2 > Poly2::kMaxDegree)
        throw ParseError(line, "degrees must be in [0, 6]");
      target->add_term(static_cast<int>(d1), static_cast<int>(d2), parse_num(toks[4], line));
    } else if (key == "override") {
      if (!have_dim) throw ParseError(line, "override must come after dim");
      if (toks.size() != static_cast<std::size_t>(inst.n) + 5)
        throw ParseError(line, "override takes: k a <dim values> b <value>");
      std::int64_t k = parse_int(toks[1], line);
      if (k < 1) throw ParseError(line, "override index must be >= 1");
      if (toks[2] != "a") throw ParseError(line, "expected 'a' marker");
      ConstraintFamily::OverrideRow row;
      for (int i = 0; i < inst.n; ++i)
        row.a.push_back(parse_num(toks[static_cast<std::size_t>(3 + i)], line));
      if (toks[static_cast<std::size_t>(3 + inst.n)] != "b")
        throw ParseError(line, "expected 'b' marker");
      row.b = parse_num(toks[static_cast<std::size_t>(4 + inst.n)], line);
      inst.family.overrides[k] = std::move(row);
    } else {
      throw ParseError(line, "unknown directive '" + key + "'");
    }
  }

  if (!have_dim) throw ParseError("missing dim line");
  if (!have_obj) throw ParseError("missing objective line");
  if (!have_index) throw ParseError("missing index line");
  if (inst.index_set.arity() == 1) {
    for (const Poly2& p : inst.family.coeff)
      if (p.max_degree_u2() > 0)
        throw ParseError("u2 degrees require a product index set");
    if (inst.family.rhs.max_degree_u2() > 0)
      throw ParseError("u2 degrees require a product index set");
  }
  if (!inst.family.overrides.empty() && inst.index_set.kind != IndexSet::Kind::Countable)
    throw ParseError("overrides are only supported on countable index sets");
  return inst;
}

LipInstance parse_instance_text(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

namespace {

std::string render_factor(const Factor& f) {
  if (f.kind == Factor::Kind::Countable) return "countable";
  return "interval " + format_double(f.lo) + " " + format_double(f.hi);
}

}  // namespace

std::string serialize_instance(const LipInstance& inst) {
  std::string out = "dim " + std::to_string(inst.n) + "\n";
  out += "objective";
  for (double v : inst.objective) out += " " + format_double(v);
  out += "\n";
  switch (inst.index_set.kind) {
    case IndexSet::Kind::FiniteList:
      out += "index finite";
      for (double l : inst.index_set.labels) out += " " + format_double(l);
      out += "\n";
      break;
    case IndexSet::Kind::Interval:
    case IndexSet::Kind::Countable:
      out += "index " + render_factor(inst.index_set.kind == IndexSet::Kind::Countable
                                          ? Factor{Factor::Kind::Countable, 0, 0}
                                          : inst.index_set.f1) +
             "\n";
      break;
    case IndexSet::Kind::Product:
      out += "index product " + render_factor(inst.index_set.f1) + " " +
             render_factor(inst.index_set.f2) + "\n";
      break;
  }
  for (int i = 0; i < inst.n; ++i)
    for (const Poly2::Term& t : inst.family.coeff[static_cast<std::size_t>(i)].terms())
      out += "coeff " + std::to_string(i + 1) + " " + std::to_string(t.d1) + " " +
             std::to_string(t.d2) + " " + format_double(t.c) + "\n";
  for (const Poly2::Term& t : inst.family.rhs.terms())
    out += "coeff b " + std::to_string(t.d1) + " " + std::to_string(t.d2) + " " +
           format_double(t.c) + "\n";
  for (const auto& [k, row] : inst.family.overrides) {
    out += "override " + std::to_string(k) + " a";
    for (double v : row.a) out += " " + format_double(v);
    out += " b " + format_double(row.b) + "\n";
  }
  return out;
}

// --- builtins ---------------------------------------------------------------

LipInstance builtin_instance(const std::string& name, const std::vector<double>& objective) {
  LipInstance inst;
  auto obj_or = [&](std::vector<double> def) {
    if (objective.empty()) return def;
    if (objective.size() != def.size())
      throw DimensionMismatch("objective for " + name + " needs " +
                              std::to_string(def.size()) + " entries");
    return objective;
  };

  if (name == "ex41" || name == "ex42") {
    inst.n = 2;
    inst.objective = obj_or({1.0, 1.0});
    inst.family.dimension = 2;
    inst.family.coeff.resize(2);
    inst.family.coeff[0].add_term(1, 0, -1.0);  // a1(t) = -t
    inst.family.coeff[1].add_term(0, 0, -1.0);  // a2(t) = t - 1
    inst.family.coeff[1].add_term(1, 0, 1.0);
    inst.family.rhs.add_term(2, 0, 1.0);  // b = t^2 - t
    inst.family.rhs.add_term(1, 0, -1.0);
    if (name == "ex41") {
      inst.index_set.kind = IndexSet::Kind::Interval;
      inst.index_set.f1 = {Factor::Kind::Interval, 0.0, 1.0};
    } else {
      inst.family.rhs.add_term(0, 1, 1.0);  // + 1/r through u2
      inst.index_set.kind = IndexSet::Kind::Product;
      inst.index_set.f1 = {Factor::Kind::Interval, 0.0, 1.0};
      inst.index_set.f2 = {Factor::Kind::Countable, 0, 0};
    }
    return inst;
  }

  if (name == "countable_gap" || name == "countable_reducible") {
    inst.n = 1;
    inst.objective = obj_or({1.0});
    inst.family.dimension = 1;
    inst.family.coeff.resize(1);
    inst.family.coeff[0].add_term(0, 0, -1.0);  // a_k = -1
    inst.family.rhs.add_term(0, 0, -1.0);       // b_k = -1 + 1/k
    inst.family.rhs.add_term(1, 0, 1.0);
    inst.index_set.kind = IndexSet::Kind::Countable;
    inst.index_set.f1 = {Factor::Kind::Countable, 0, 0};
    if (name == "countable_reducible")
      inst.family.overrides[1] = {{-1.0}, -1.0};  // x >= 1 already at k = 1
    return inst;
  }

  throw UnknownName("no builtin named '" + name + "'");
}

}  // namespace hdual
