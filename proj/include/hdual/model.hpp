#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdual/errors.hpp"

namespace hdual {

// Bivariate polynomial with per-variable degree at most 6, kept in a canonical
// sorted-and-merged term order so equality is structural.
class Poly2 {
public:
  struct Term {
    int d1 = 0;
    int d2 = 0;
    double c = 0.0;
    friend bool operator==(const Term&, const Term&) = default;
  };

  static constexpr int kMaxDegree = 6;

  Poly2() = default;
  explicit Poly2(std::vector<Term> terms);

  void add_term(int d1, int d2, double c);
  double eval(double u1, double u2) const;
  const std::vector<Term>& terms() const { return terms_; }
  int max_degree_u2() const;

  friend bool operator==(const Poly2&, const Poly2&) = default;

private:
  std::vector<Term> terms_;
};

// One point of an index set. v2 is meaningful only when arity == 2.
struct IndexValue {
  double v1 = 0.0;
  double v2 = 0.0;
  int arity = 1;
  friend bool operator==(const IndexValue&, const IndexValue&) = default;
};

std::string render_index(const IndexValue& iv);
IndexValue parse_index_token(const std::string& token);  // throws ParseError

// Ordered list of distinct index values.
struct IndexSubset {
  std::vector<IndexValue> values;
  friend bool operator==(const IndexSubset&, const IndexSubset&) = default;
};

std::string render_subset(const IndexSubset& subset);

struct Factor {
  enum class Kind { Interval, Countable };
  Kind kind = Kind::Interval;
  double lo = 0.0;  // Interval only
  double hi = 1.0;
  friend bool operator==(const Factor&, const Factor&) = default;
};

struct IndexSet {
  enum class Kind { FiniteList, Interval, Countable, Product };
  Kind kind = Kind::Interval;
  std::vector<double> labels;  // FiniteList
  Factor f1;                   // Interval / Countable / first product factor
  Factor f2;                   // second product factor
  int arity() const { return kind == Kind::Product ? 2 : 1; }
  friend bool operator==(const IndexSet&, const IndexSet&) = default;
};

// Coefficient functions t -> (a_t, b_t). Each coordinate of a_t and the rhs
// b_t is a polynomial in (u1, u2), where an interval or finite factor feeds
// its value into u directly and a countable factor k feeds u = 1/k. Rows of
// `overrides` replace the polynomial value at single countable indices; this
// covers families whose exceptional first constraints are not polynomial in
// 1/k.
struct ConstraintFamily {
  struct OverrideRow {
    std::vector<double> a;
    double b = 0.0;
    friend bool operator==(const OverrideRow&, const OverrideRow&) = default;
  };

  int dimension = 0;
  std::vector<Poly2> coeff;  // size == dimension
  Poly2 rhs;
  std::map<std::int64_t, OverrideRow> overrides;
  friend bool operator==(const ConstraintFamily&, const ConstraintFamily&) = default;
};

// minimize <c, x> subject to <a_t, x> <= b_t for every t in the index set.
struct LipInstance {
  int n = 0;
  std::vector<double> objective;
  IndexSet index_set;
  ConstraintFamily family;
  friend bool operator==(const LipInstance&, const LipInstance&) = default;
};

struct Constraint {
  std::vector<double> a;
  double b = 0.0;
};

// Coefficients at one concrete index. Throws IndexOutOfRange when the value
// does not belong to the instance's index set.
Constraint evaluate_constraint(const LipInstance& inst, const IndexValue& iv);

// Uniform grids over interval factors (both endpoints included), {1..cap} for
// countable factors, label lists verbatim, cross products in declaration
// order (first factor outermost).
std::vector<IndexValue> sample_index_set(const IndexSet& set, int resolution,
                                         std::int64_t countable_cap);

struct FamilySpec {
  enum class Kind { Singletons, Prefixes, BoundedSubsets, Explicit };
  Kind kind = Kind::Singletons;
  int prefix_max = 0;                         // Prefixes; 0 = unlimited
  int max_cardinality = 0;                    // BoundedSubsets
  std::vector<IndexSubset> explicit_subsets;  // Explicit
};

struct FamilyEnumeration {
  std::vector<IndexSubset> subsets;
  bool exhausted = true;  // false when the budget cut enumeration short
};

// Subsets in deterministic order: Singletons sample-by-sample, Prefixes over
// leading segments of the sample (countable sets only), BoundedSubsets in
// size-then-lexicographic position order, Explicit verbatim. At most `budget`
// subsets are produced.
FamilyEnumeration enumerate_family(const FamilySpec& spec, const IndexSet& set,
                                   const std::vector<IndexValue>& sampled,
                                   std::int64_t budget);

LipInstance parse_instance(std::istream& in);
LipInstance parse_instance_text(const std::string& text);
std::string serialize_instance(const LipInstance& inst);

// Known names: ex41, ex42, countable_gap, countable_reducible. An empty
// objective picks the builtin's default.
LipInstance builtin_instance(const std::string& name, const std::vector<double>& objective);

// Shared formatting for reports and certificates: shortest round-trippable
// decimal form.
std::string format_double(double v);

}  // namespace hdual
