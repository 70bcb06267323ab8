#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "commdeg/audit.hpp"
#include "commdeg/character.hpp"
#include "commdeg/comm.hpp"
#include "commdeg/group_spec.hpp"
#include "commdeg/serialize.hpp"
#include "oracle.hpp"

using namespace commdeg;

namespace {

constexpr int kCases = 40;

// A random permutation group of degree at most 5 together with the raw
// permutations behind each element id.
struct RandomGroup {
  GroupPtr group;
  std::vector<oracle::Perm> perms;
  std::string description;
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  oracle::Perm perm(std::size_t degree) {
    oracle::Perm p = oracle::identity(degree);
    std::shuffle(p.begin(), p.end(), rng_);
    return p;
  }

  RandomGroup group(std::size_t max_degree = 5) {
    const std::size_t degree = 1 + below(max_degree);
    PermList gens;
    gens.degree = degree;
    const std::size_t k = 1 + below(3);
    for (std::size_t i = 0; i < k; ++i) gens.perms.push_back(perm(degree));
    RandomGroup out;
    out.group = close_group(gens);
    out.perms = oracle::perms_by_id(*out.group, oracle::closure(degree, gens.perms));
    out.description = "degree " + std::to_string(degree);
    for (const auto& p : gens.perms) out.description += " " + oracle::cycles(p);
    return out;
  }

  ElementId element(const GroupPtr& g) { return static_cast<ElementId>(below(g->order())); }

  SubgroupRef subgroup(const GroupPtr& g) {
    std::vector<ElementId> seed;
    const std::size_t k = below(3);
    for (std::size_t i = 0; i < k; ++i) seed.push_back(element(g));
    return subgroup_closure(g, seed);
  }

  SubgroupRef normal_subgroup(const GroupPtr& g) {
    std::vector<SubgroupRef> normal;
    for (const auto& s : all_subgroups(g)) {
      if (is_normal(*g, s)) normal.push_back(s);
    }
    return normal[below(normal.size())];
  }

 private:
  std::mt19937_64 rng_;
};

const std::vector<GroupPtr>& battery() {
  static const std::vector<GroupPtr> groups = [] {
    std::vector<GroupPtr> out;
    for (const auto& spec : default_battery_groups()) out.push_back(parse_group_spec(spec));
    return out;
  }();
  return groups;
}

std::vector<oracle::Perm> perms_of(const RandomGroup& rg, const SubgroupRef& s) {
  std::vector<oracle::Perm> out;
  for (auto x : s.members()) out.push_back(rg.perms[x]);
  return out;
}

std::vector<ElementId> ids(const SubgroupRef& s) {
  return {s.members().begin(), s.members().end()};
}

BigInt commuting_with(const GroupTable& g, ElementId x) {
  BigInt c = 0;
  for (ElementId y = 0; y < g.order(); ++y) c += g.mul(x, y) == g.mul(y, x);
  return c;
}

}  // namespace

// -- group structure ----------------------------------------------------------

TEST(GroupProperties, RandomGroupsSatisfyAxiomsAndMatchTheOracle) {
  Gen gen(101);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    SCOPED_TRACE(rg.description);
    EXPECT_EQ(check_group_axioms(*rg.group), std::nullopt);
    ASSERT_EQ(rg.perms.size(), rg.group->order());
    for (ElementId x = 0; x < rg.group->order(); ++x) {
      for (ElementId y = 0; y < rg.group->order(); ++y) {
        ASSERT_EQ(rg.perms[rg.group->mul(x, y)], oracle::compose(rg.perms[x], rg.perms[y]));
      }
    }
  }
}

TEST(GroupProperties, BatteryAxioms) {
  for (const auto& g : battery()) {
    EXPECT_EQ(check_group_axioms(*g), std::nullopt) << g->name();
  }
}

TEST(GroupProperties, LagrangeAndClosureIdempotence) {
  Gen gen(202);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    SCOPED_TRACE(rg.description);
    for (int j = 0; j < 5; ++j) {
      auto s = gen.subgroup(rg.group);
      EXPECT_EQ(rg.group->order() % s.order(), 0u);
      auto again = subgroup_closure(rg.group, s.members());
      EXPECT_TRUE(again.same_members(s));
    }
  }
}

TEST(GroupProperties, ConjugacyClassesPartitionAndOrbitStabilizer) {
  Gen gen(303);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    SCOPED_TRACE(rg.description);
    const auto& g = *rg.group;
    auto info = conjugacy(rg.group);
    std::size_t total = 0;
    for (const auto& c : info.classes) total += c.size();
    EXPECT_EQ(total, g.order());
    EXPECT_EQ(info.classes[info.class_of[0]], (std::vector<ElementId>{0}));
    for (ElementId x = 0; x < g.order(); ++x) {
      EXPECT_EQ(info.classes[info.class_of[x]].size() * info.centralizer_order[x], g.order());
      EXPECT_EQ(BigInt(info.centralizer_order[x]), commuting_with(g, x));
    }
  }
}

TEST(GroupProperties, QuotientProjectionIsAHomomorphism) {
  Gen gen(404);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    SCOPED_TRACE(rg.description);
    auto n = gen.normal_subgroup(rg.group);
    auto q = quotient_group(rg.group, n);
    const auto& g = *rg.group;
    EXPECT_EQ(q.group->order() * n.order(), g.order());
    for (ElementId x = 0; x < g.order(); ++x) {
      for (ElementId y = 0; y < g.order(); ++y) {
        ASSERT_EQ(q.projection[g.mul(x, y)], q.group->mul(q.projection[x], q.projection[y]));
      }
    }
  }
}

TEST(GroupProperties, ProductProjectionsAreHomomorphisms) {
  Gen gen(505);
  for (int i = 0; i < kCases; ++i) {
    auto a = gen.group(4);
    auto b = gen.group(4);
    if (a.group->order() * b.group->order() > 200) continue;
    SCOPED_TRACE(a.description + " x " + b.description);
    auto p = direct_product(a.group, b.group);
    const auto& g = *p.group;
    ASSERT_EQ(g.order(), a.group->order() * b.group->order());
    for (ElementId x = 0; x < g.order(); ++x) {
      for (ElementId y = 0; y < g.order(); ++y) {
        ASSERT_EQ(p.proj1[g.mul(x, y)], a.group->mul(p.proj1[x], p.proj1[y]));
        ASSERT_EQ(p.proj2[g.mul(x, y)], b.group->mul(p.proj2[x], p.proj2[y]));
      }
    }
  }
}

// -- commutator engine --------------------------------------------------------

TEST(EngineProperties, FastMatchesIndependentOracle) {
  Gen gen(606);
  int compared = 0;
  for (int i = 0; i < 3 * kCases; ++i) {
    auto rg = gen.group(4);
    auto h = gen.subgroup(rg.group);
    auto k = gen.subgroup(rg.group);
    const unsigned n = 1 + gen.below(2);
    const unsigned m = 1 + gen.below(2);
    if (tuple_count(h, k, n, m) > 50000) continue;
    SCOPED_TRACE(rg.description + " H=" + h.label() + " K=" + k.label() + " n=" +
                 std::to_string(n) + " m=" + std::to_string(m));
    auto hist = oracle::brute_histogram(perms_of(rg, h), perms_of(rg, k), n, m);
    const BigInt total = tuple_count(h, k, n, m);
    for (ElementId x = 0; x < rg.group->order(); ++x) {
      auto it = hist.find(rg.perms[x]);
      const BigInt expected = it == hist.end() ? 0 : it->second;
      ASSERT_EQ(prob_fast({h, k, n, m, x}).value, Rational(expected, total));
    }
    ++compared;
  }
  EXPECT_GT(compared, kCases);
}

TEST(EngineProperties, FastMatchesBrute) {
  Gen gen(707);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    auto h = gen.subgroup(rg.group);
    auto k = gen.subgroup(rg.group);
    for (unsigned n : {1u, 2u}) {
      for (unsigned m : {1u, 2u}) {
        if (tuple_count(h, k, n, m) > 300000) continue;
        auto brute = brute_distribution(h, k, n, m);
        auto fast = extend_by_conjugators(comm_distribution(h, n), k, m);
        EXPECT_EQ(brute.counts, fast.counts) << rg.description << " H=" << h.label()
                                             << " K=" << k.label() << " n=" << n << " m=" << m;
      }
    }
  }
}

TEST(EngineProperties, DistributionMass) {
  for (const auto& g : battery()) {
    for (const auto& h : {full_subgroup(g), center(g)}) {
      for (unsigned n : {1u, 2u, 3u}) {
        auto d = comm_distribution(h, n);
        BigInt expected = 1;
        for (unsigned i = 0; i < n; ++i) expected *= h.order();
        EXPECT_EQ(d.total(), expected) << g->name() << " n=" << n;
      }
    }
  }
}

TEST(EngineProperties, ProfileNormalization) {
  Gen gen(808);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    auto h = gen.subgroup(rg.group);
    auto k = gen.subgroup(rg.group);
    const unsigned n = 1 + gen.below(3);
    const unsigned m = 1 + gen.below(3);
    auto profile = prob_profile(h, k, n, m);
    Rational sum = 0;
    for (const auto& p : profile) {
      EXPECT_GE(p.value, 0);
      EXPECT_LE(p.value, 1);
      sum += p.value;
    }
    EXPECT_EQ(sum, 1) << rg.description;
  }
}

TEST(EngineProperties, RemarkR1BothDirections) {
  Gen gen(909);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    auto h = gen.subgroup(rg.group);
    auto k = gen.subgroup(rg.group);
    const unsigned n = 1 + gen.below(2);
    const unsigned m = 1 + gen.below(2);
    SCOPED_TRACE(rg.description + " H=" + h.label() + " K=" + k.label());
    auto values = commutator_value_set(h, k, n, m);
    for (ElementId x = 0; x < rg.group->order(); ++x) {
      const bool in_set = std::binary_search(values.begin(), values.end(), x);
      EXPECT_EQ(prob_fast({h, k, n, m, x}).value == 0, !in_set);
    }
    const bool trivial = nested_commutator_subgroup(h, k, n, m).is_trivial();
    EXPECT_EQ(prob_fast({h, k, n, m, kIdentity}).value == 1, trivial);
  }
}

TEST(EngineProperties, ClassFormulaAtMOneMatchesBrute) {
  Gen gen(1010);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    auto h = gen.subgroup(rg.group);
    auto k = gen.subgroup(rg.group);
    for (unsigned n : {1u, 2u}) {
      if (tuple_count(h, k, n, 1) > 300000) continue;
      for (ElementId x = 0; x < rg.group->order(); ++x) {
        ASSERT_EQ(prob_class_formula({h, k, n, 1, x}).value, prob_brute({h, k, n, 1, x}).value)
            << rg.description << " H=" << h.label() << " K=" << k.label() << " n=" << n;
      }
    }
  }
}

TEST(EngineProperties, ZetaMatchesScaledProbability) {
  Gen gen(1111);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    auto h = gen.subgroup(rg.group);
    auto full = full_subgroup(rg.group);
    const Rational scale = Rational(BigInt(h.order()) * rg.group->order());
    for (ElementId x = 0; x < rg.group->order(); ++x) {
      EXPECT_EQ(Rational(zeta(*rg.group, h, x)), prob_fast({h, full, 1, 1, x}).value * scale);
    }
  }
}

TEST(EngineProperties, CommutativityDegreeIsClassCountOverOrder) {
  for (const auto& g : battery()) {
    const auto classes = conjugacy(g).classes.size();
    EXPECT_EQ(nilpotency_degree(full_subgroup(g), 1).value, Rational(classes, g->order()))
        << g->name();
  }
  Gen gen(1212);
  for (int i = 0; i < kCases; ++i) {
    auto rg = gen.group();
    EXPECT_EQ(commutativity_degree(rg.group).value,
              Rational(oracle::commuting_pairs(rg.perms), rg.group->order() * rg.group->order()));
  }
}

TEST(EngineProperties, ExactProbJsonRoundTrip) {
  Gen gen(1313);
  for (int i = 0; i < kCases; ++i) {
    const auto& g = battery()[gen.below(battery().size())];
    auto h = gen.subgroup(g);
    auto k = gen.subgroup(g);
    const unsigned n = 1 + unsigned(gen.below(2));
    const unsigned m = 1 + unsigned(gen.below(2));
    auto p = prob_fast({h, k, n, m, gen.element(g)});
    const Json j = to_json(p);
    auto back = exact_prob_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.value, p.value);
    EXPECT_EQ(ids(back.params.H), ids(h)) << g->name() << " " << h.label();
    EXPECT_EQ(ids(back.params.K), ids(k));
    EXPECT_EQ(to_json(back).dump(), j.dump());
  }
}

// -- characters ---------------------------------------------------------------

TEST(CharacterProperties, DegreesAndOrthogonality) {
  for (const auto& g : battery()) {
    auto t = character_table(g);
    EXPECT_EQ(t.irreducibles.size(), t.num_classes()) << g->name();
    std::size_t sum = 0;
    for (auto d : t.degrees) sum += std::size_t(d) * d;
    EXPECT_EQ(sum, g->order()) << g->name();
    auto r = verify_orthogonality(t);
    EXPECT_LT(r.row_deviation, 1e-6) << g->name();
    EXPECT_LT(r.column_deviation, 1e-6) << g->name();
  }
}

TEST(CharacterProperties, CharacterSumMatchesExactEngine) {
  for (const auto& g : battery()) {
    auto t = character_table(g);
    auto full = full_subgroup(g);
    for (ElementId x = 0; x < g->order(); ++x) {
      EXPECT_LT(std::abs(prob_char_pg(t, x) - to_double(prob_fast({full, full, 1, 1, x}).value)),
                1e-8)
          << g->name() << " g=" << x;
    }
  }
}

TEST(CharacterProperties, PsiMultiplicities) {
  for (const auto& g : battery()) {
    auto t = character_table(g);
    auto psi = psi_class_function(t);
    for (std::size_t i = 0; i < t.degrees.size(); ++i) {
      EXPECT_LT(std::abs(psi.multiplicities[i] - Complex(double(g->order()) / t.degrees[i], 0)),
                1e-6)
          << g->name();
    }
  }
}

TEST(CharacterProperties, RelativeSumMatchesZetaForNormalSubgroups) {
  for (const auto& g : battery()) {
    auto t = character_table(g);
    for (const auto& h : all_subgroups(g)) {
      if (!is_normal(*g, h)) continue;
      const double scale = double(h.order()) * double(g->order());
      for (ElementId x = 0; x < g->order(); ++x) {
        EXPECT_LT(std::abs(prob_char_relative(t, h, x) - to_double(Rational(zeta(*g, h, x))) / scale),
                  1e-8)
            << g->name() << " H=" << h.label() << " g=" << x;
      }
    }
  }
}

TEST(CharacterProperties, RestrictionNormBoundWithVanishingEquality) {
  for (const auto& g : battery()) {
    if (g->order() > 16) continue;
    auto t = character_table(g);
    for (const auto& h : all_subgroups(g)) {
      const double index = double(g->order()) / double(h.order());
      for (std::size_t i = 0; i < t.irreducibles.size(); ++i) {
        const double norm = restriction_norm(t, i, h);
        EXPECT_LE(norm, index + 1e-6);
        EXPECT_EQ(std::abs(norm - index) < 1e-6, vanishes_outside(t, i, h))
            << g->name() << " H=" << h.label() << " chi=" << i;
      }
    }
  }
}

TEST(CharacterProperties, ZetaIsACharacterWhenClassConstant) {
  std::size_t checked = 0;
  for (const auto& g : battery()) {
    auto t = character_table(g);
    for (const auto& h : all_subgroups(g)) {
      std::vector<BigInt> counts;
      for (ElementId x = 0; x < g->order(); ++x) counts.push_back(zeta(*g, h, x));
      if (!is_class_constant(t, counts)) {
        EXPECT_FALSE(is_normal(*g, h)) << g->name() << " H=" << h.label();
        continue;
      }
      EXPECT_TRUE(is_character(class_function_from_counts(t, counts), t).is_character)
          << g->name() << " H=" << h.label();
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}
