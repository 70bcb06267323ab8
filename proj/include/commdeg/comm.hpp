#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commdeg/group.hpp"
#include "commdeg/rational.hpp"

namespace commdeg {

enum class Method { Brute, ClassFormula, Distribution, Character };
std::string_view method_name(Method m);

/// Which solvability test the class formula uses for a value w:
/// Derived: w*g in Cl_K(w). Literal: g^-1*w in Cl_K(w), spelled "paper" on
/// the command line and in reports.
enum class Predicate { Derived, Literal };
std::string_view predicate_name(Predicate p);

inline constexpr std::uint64_t kDefaultBruteCap = 100'000'000;

struct EngineOptions {
  std::uint64_t brute_cap = kDefaultBruteCap;
  unsigned threads = 1;
  Predicate predicate = Predicate::Derived;
};

/// Data of one probability query: x-block from H (n slots), y-block from K
/// (m slots), target element g.
struct CommParams {
  SubgroupRef H;
  SubgroupRef K;
  unsigned n = 1;
  unsigned m = 1;
  ElementId g = kIdentity;

  const GroupTable& group() const { return H.parent(); }
  const GroupPtr& group_ptr() const { return H.parent_ptr(); }
  /// Throws ForeignSubgroup / InvalidArgument on broken invariants.
  void validate() const;
};

/// Exact histogram of left-normed commutator values over a tuple space.
struct CommDistribution {
  std::vector<BigInt> counts;  // dense, indexed by element id
  unsigned x_slots = 0;
  unsigned y_slots = 0;
  std::string source;

  BigInt total() const;
  std::vector<ElementId> support() const;
};

struct ExactProb {
  Rational value;
  Method method = Method::Distribution;
  CommParams params;

  BigInt numerator() const { return boost::multiprecision::numerator(value); }
  BigInt denominator() const { return boost::multiprecision::denominator(value); }
};

/// [x,y] = x^-1 y^-1 x y.
inline ElementId commutator(const GroupTable& g, ElementId x, ElementId y) {
  return g.mul(g.mul(g.inv(x), g.inv(y)), g.mul(x, y));
}

/// [x1,...,xk] = [[x1,...,x(k-1)],xk]; throws EmptyTuple on an empty list.
ElementId left_normed_commutator(const GroupTable& g, std::span<const ElementId> xs);

/// |H|^n * |K|^m.
BigInt tuple_count(const SubgroupRef& h, const SubgroupRef& k, unsigned n, unsigned m);

/// Histogram by direct enumeration of H^n x K^m. Throws BruteCapExceeded.
CommDistribution brute_distribution(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                    unsigned m, const EngineOptions& opts = {});

ExactProb prob_brute(const CommParams& params, const EngineOptions& opts = {});

/// counts[w] = #{x in H^n : [x1..xn] = w}, by the O(n|G||H|) recurrence.
CommDistribution comm_distribution(const SubgroupRef& h, unsigned n,
                                   const EngineOptions& opts = {});

/// m further commutation steps with entries drawn from K.
CommDistribution extend_by_conjugators(const CommDistribution& dist, const SubgroupRef& k,
                                       unsigned m, const EngineOptions& opts = {});

ExactProb prob_fast(const CommParams& params, const EngineOptions& opts = {});

/// prob_fast with a caller-supplied x-block distribution (fixtures, caching).
ExactProb prob_fast_from(const CommDistribution& x_block, const CommParams& params,
                         const EngineOptions& opts = {});

/// Class-formula evaluation: sum over x-block values w satisfying the
/// predicate of N_n(w) |C_K(w)|^m, over |H|^n |K|^m.
ExactProb prob_class_formula(const CommParams& params, const EngineOptions& opts = {});

/// Numerator of the class formula: sum of N_n(w) |C_K(w)|^m over w passing
/// the predicate. `conj_k` must be conjugacy(G, K).
BigInt class_formula_count(const GroupTable& g, const CommDistribution& x_block,
                           const ConjugacyInfo& conj_k, unsigned m, ElementId target,
                           Predicate predicate);
ExactProb prob_class_formula_from(const CommDistribution& x_block, const CommParams& params,
                                  const EngineOptions& opts = {});

/// #{(x,y) in H x G : [x,y] = g}, via the m = 1 class formula.
BigInt zeta(const GroupTable& g, const SubgroupRef& h, ElementId target);

/// #{(x,y) in H^n x G^m : [x...,y...] = g}; requires params.K to be all of G.
BigInt zeta_nm(const CommParams& params, const EngineOptions& opts = {});

std::vector<ElementId> commutator_value_set(const SubgroupRef& h, const SubgroupRef& k,
                                            unsigned n, unsigned m,
                                            const EngineOptions& opts = {});

/// Subgroup generated by commutator_value_set.
SubgroupRef nested_commutator_subgroup(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                       unsigned m, const EngineOptions& opts = {});

/// d^(n)(H,G) = p_1^(n,1)(H,G).
ExactProb nilpotency_degree(const SubgroupRef& h, unsigned n, const EngineOptions& opts = {});
/// d(G) = p_1^(1,1)(G,G).
ExactProb commutativity_degree(const GroupPtr& g, const EngineOptions& opts = {});

/// p_g for every g from one distribution pass, indexed by element id.
std::vector<ExactProb> prob_profile(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                    unsigned m, const EngineOptions& opts = {});

/// Number of x-block tuples whose commutator value has trivial centralizer in K.
BigInt y_set_size(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                  const EngineOptions& opts = {});

}  // namespace commdeg
