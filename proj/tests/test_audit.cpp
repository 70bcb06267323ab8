#include <gtest/gtest.h>

#include "commdeg/audit.hpp"
#include "commdeg/error.hpp"
#include "commdeg/group_spec.hpp"

using namespace commdeg;

namespace {

ElementId find_label(const GroupTable& g, const std::string& label) {
  for (ElementId x = 0; x < g.order(); ++x) {
    if (g.label(x) == label) return x;
  }
  ADD_FAILURE() << "no element labelled " << label;
  return 0;
}

const Finding& pick(const std::vector<Finding>& fs, ClaimId claim, const std::string& variant = "") {
  for (const auto& f : fs) {
    if (f.claim == claim && f.variant == variant) return f;
  }
  static const Finding none{};
  ADD_FAILURE() << "no finding for " << claim_name(claim) << "/" << variant;
  return none;
}

std::size_t count(const std::vector<Finding>& fs, ClaimId claim, Verdict v) {
  std::size_t c = 0;
  for (const auto& f : fs) c += (f.claim == claim && f.verdict == v);
  return c;
}

bool config_rejected(const std::string& text) {
  try {
    audit_config_from_json(Json::parse(text));
  } catch (const Error& e) {
    return e.code() == ErrorCode::ConfigInvalid;
  }
  return false;
}

struct S3Audit : ::testing::Test {
  GroupPtr g = named_group('S', 3);
  AuditWorkspace ws{g};
  SubgroupRef full = full_subgroup(g);
  SubgroupRef triv = trivial_subgroup(g);
  ElementId cyc = find_label(*g, "(1,2,3)");
  ElementId tr = find_label(*g, "(1,2)");
  SubgroupRef a3 = subgroup_closure(g, std::vector<ElementId>{cyc});
  SubgroupRef t12 = subgroup_closure(g, std::vector<ElementId>{tr});
  std::vector<ElementId> all_g{0, 1, 2, 3, 4, 5};
};

}  // namespace

TEST(ClaimCatalog, NamesRoundTrip) {
  EXPECT_EQ(all_claims().size(), 21u);
  for (auto c : all_claims()) EXPECT_EQ(parse_claim(claim_name(c)), c);
  EXPECT_FALSE(parse_claim("P9").has_value());
  for (auto c : {ClaimId::EQ3, ClaimId::EQ4, ClaimId::EQ7, ClaimId::PSI, ClaimId::P3_m1}) {
    EXPECT_TRUE(is_hard_guarantee(c));
  }
  EXPECT_FALSE(is_hard_guarantee(ClaimId::P3_mgt1));
  EXPECT_FALSE(is_hard_guarantee(ClaimId::C5));
}

TEST_F(S3Audit, RemarkR1HoldsOnS3) {
  auto fs = check_remark_r1(ws, a3, t12, 1, 1, all_g);
  EXPECT_FALSE(fs.empty());
  for (const auto& f : fs) EXPECT_EQ(f.verdict, Verdict::Holds) << to_json(f).dump();
}

TEST(Multiplicativity, CyclicFactorsHold) {
  auto c2 = named_group('C', 2);
  auto f = full_subgroup(c2);
  auto fs = check_multiplicativity(f, f, f, f, 1, 1, 0, 0);
  ASSERT_FALSE(fs.empty());
  EXPECT_EQ(pick(fs, ClaimId::P1).verdict, Verdict::Holds);
}

TEST(Multiplicativity, S3TimesQ8) {
  auto s3 = named_group('S', 3);
  auto q8 = named_group('Q', 8);
  auto fs = check_multiplicativity(full_subgroup(s3), full_subgroup(s3), full_subgroup(q8),
                                   full_subgroup(q8), 1, 1, 0, 0);
  const auto& f = pick(fs, ClaimId::P1);
  EXPECT_EQ(f.verdict, Verdict::Holds);
  EXPECT_EQ(f.witness.lhs, "5/16");
  EXPECT_EQ(f.witness.rhs, "5/16");
  // 3 classes times 5 classes over 48 elements.
  auto prod = direct_product(s3, q8);
  EXPECT_EQ(commutativity_degree(prod.group).value, Rational(15, 48));
}

TEST(Multiplicativity, ThreeCycleComponent) {
  auto s3 = named_group('S', 3);
  auto q8 = named_group('Q', 8);
  const ElementId cyc = find_label(*s3, "(1,2,3)");
  auto fs = check_multiplicativity(full_subgroup(s3), full_subgroup(s3), full_subgroup(q8),
                                   full_subgroup(q8), 1, 1, cyc, 0);
  const auto& f = pick(fs, ClaimId::P1);
  EXPECT_EQ(f.verdict, Verdict::Holds);
  EXPECT_EQ(f.witness.lhs, "5/32");
}

TEST_F(S3Audit, SymmetryWithEqualSubgroups) {
  for (auto x : all_g) {
    auto fs = check_symmetry(ws, a3, a3, 1, 1, x);
    EXPECT_EQ(pick(fs, ClaimId::P2a).verdict, Verdict::Holds);
    EXPECT_EQ(pick(fs, ClaimId::P2a, "index_swapped").verdict, Verdict::Holds);
  }
}

TEST_F(S3Audit, SymmetryRecordsBothReadings) {
  auto fs = check_symmetry(ws, full, t12, 2, 1, 0);
  const auto& as_written = pick(fs, ClaimId::P2a);
  const auto& swapped = pick(fs, ClaimId::P2a, "index_swapped");
  EXPECT_EQ(as_written.instance.n, 2u);
  EXPECT_NE(as_written.witness.rhs, swapped.witness.rhs);
}

TEST_F(S3Audit, ClassFormulaAtMOneHolds) {
  for (const auto& h : all_subgroups(g)) {
    for (const auto& k : all_subgroups(g)) {
      for (unsigned n : {1u, 2u}) {
        auto fs = check_class_formula(ws, h, k, n, 1, all_g);
        EXPECT_EQ(count(fs, ClaimId::P3_m1, Verdict::Violated), 0u);
        EXPECT_EQ(count(fs, ClaimId::P3_m1, Verdict::Holds), 12u);
      }
    }
  }
}

TEST_F(S3Audit, ClassFormulaAtMTwoViolatedWithWitness) {
  std::vector<ElementId> gs{0};
  auto fs = check_class_formula(ws, full, full, 1, 2, gs);
  const auto& f = pick(fs, ClaimId::P3_mgt1);
  EXPECT_EQ(f.verdict, Verdict::Violated);
  EXPECT_EQ(f.witness.lhs, "11/36");
  EXPECT_EQ(f.witness.rhs, "3/4");
  EXPECT_NE(f.witness.note.find("66 of 216"), std::string::npos);
  EXPECT_NE(f.witness.note.find("162 of 216"), std::string::npos);
  EXPECT_EQ(f.instance.g, ElementId{0});
}

TEST(ClassFormula, AbelianIdentityHolds) {
  auto g = named_group('C', 4);
  AuditWorkspace ws(g);
  std::vector<ElementId> gs{0};
  for (unsigned m : {1u, 2u, 3u}) {
    auto fs = check_class_formula(ws, full_subgroup(g), full_subgroup(g), 2, m, gs);
    for (const auto& f : fs) EXPECT_EQ(f.verdict, Verdict::Holds);
  }
}

TEST_F(S3Audit, CorollaryC4) {
  auto fs = check_c4(ws, a3, t12, 1, 1);
  const auto& f = pick(fs, ClaimId::C4);
  EXPECT_EQ(f.verdict, Verdict::Holds);
  EXPECT_EQ(f.witness.lhs, "2/3");
  EXPECT_EQ(f.witness.rhs, "2/3");
  EXPECT_EQ(pick(check_c4(ws, full, full, 1, 1), ClaimId::C4).verdict, Verdict::Vacuous);
}

TEST(CorollaryC4, CentralElementsMakeItVacuous) {
  auto g = named_group('Q', 8);
  AuditWorkspace ws(g);
  auto fs = check_c4(ws, full_subgroup(g), full_subgroup(g), 1, 1);
  EXPECT_EQ(pick(fs, ClaimId::C4).verdict, Verdict::Vacuous);
}

TEST_F(S3Audit, MonotonicityExamples) {
  for (auto x : all_g) {
    auto fs = check_monotonicity(ws, a3, a3, 1, 1, x);
    EXPECT_EQ(pick(fs, ClaimId::P4).verdict, Verdict::Holds);
  }
  auto fs = check_monotonicity(ws, triv, full, 1, 1, 0);
  EXPECT_EQ(pick(fs, ClaimId::P4).verdict, Verdict::Holds);
  EXPECT_EQ(pick(fs, ClaimId::P4).witness.lhs, "1");
}

TEST_F(S3Audit, QuotientExamples) {
  for (auto x : all_g) {
    auto fs = check_quotient(ws, a3, triv, 1, 1, x);
    for (const auto& f : fs) EXPECT_NE(f.verdict, Verdict::Violated) << to_json(f).dump();
  }
  auto fs = check_quotient(ws, a3, a3, 1, 1, 0);
  const auto& f = pick(fs, ClaimId::P5);
  EXPECT_EQ(f.verdict, Verdict::Holds);
  EXPECT_EQ(f.witness.rhs, "1");
  EXPECT_EQ(pick(check_quotient(ws, a3, t12, 1, 1, 0), ClaimId::P5).verdict,
            Verdict::PreconditionFailed);
}

TEST_F(S3Audit, ChainAtIdentity) {
  auto fs = check_chain(ws, full, full, 1, 1, 0);
  for (const auto& f : fs) EXPECT_EQ(f.verdict, Verdict::Holds);
  auto mid = check_chain(ws, a3, a3, 1, 1, 0);
  EXPECT_EQ(pick(mid, ClaimId::T2_CHAIN, "link1").witness.lhs, "1/2");
  EXPECT_EQ(pick(mid, ClaimId::T2_CHAIN, "link1").verdict, Verdict::Holds);
  EXPECT_EQ(pick(mid, ClaimId::T2_CHAIN, "link2").verdict, Verdict::Holds);
  EXPECT_EQ(pick(mid, ClaimId::T2_CHAIN, "link4").verdict, Verdict::Holds);
  // p_1(A3, A3) = 1 but p_1(A3, S3) = 12/18.
  const auto& link3 = pick(mid, ClaimId::T2_CHAIN, "link3");
  EXPECT_EQ(link3.verdict, Verdict::Violated);
  EXPECT_EQ(link3.witness.lhs, "1");
  EXPECT_EQ(link3.witness.rhs, "2/3");
}

TEST_F(S3Audit, CorollaryC5) {
  auto holds = check_c5(ws, full, full, 1, 0);
  EXPECT_EQ(pick(holds, ClaimId::C5).verdict, Verdict::Holds);
  EXPECT_EQ(pick(holds, ClaimId::C5).witness.lhs, "1/2");
  auto broken = check_c5(ws, a3, a3, 1, 0);
  const auto& f = pick(broken, ClaimId::C5);
  EXPECT_EQ(f.verdict, Verdict::Violated);
  EXPECT_EQ(f.witness.lhs, "1");
  EXPECT_EQ(f.witness.rhs, "1/2");
  EXPECT_EQ(pick(broken, ClaimId::C5, "Z(H)=1").verdict, Verdict::Vacuous);
}

TEST(CorollaryC5, NontrivialCenterIsVacuous) {
  auto g = named_group('Q', 8);
  AuditWorkspace ws(g);
  auto fs = check_c5(ws, full_subgroup(g), full_subgroup(g), 1, 0);
  EXPECT_EQ(pick(fs, ClaimId::C5).verdict, Verdict::Vacuous);
}

TEST_F(S3Audit, T3AtPrimeTwo) {
  for (auto x : all_g) {
    auto fs = check_t3(ws, full, full, 1, 1, x);
    EXPECT_EQ(pick(fs, ClaimId::T3i).verdict, Verdict::Holds);
    EXPECT_EQ(pick(fs, ClaimId::T3i).witness.rhs, "1");
  }
}

TEST(T3Claim, OrderNineBound) {
  auto g = parse_group_spec("C3xC3");
  AuditWorkspace ws(g);
  auto fs = check_t3(ws, full_subgroup(g), full_subgroup(g), 1, 1, 0);
  EXPECT_EQ(pick(fs, ClaimId::T3i).witness.rhs, "7/9");
  EXPECT_EQ(pick(fs, ClaimId::T3i).verdict, Verdict::Violated);
}

TEST_F(S3Audit, CorollaryC6VacuousWithoutEquality) {
  auto fs = check_c6(ws, a3, a3, 1, 1);
  for (const auto& f : fs) EXPECT_NE(f.verdict, Verdict::Holds);
}

TEST_F(S3Audit, FrobeniusBound) {
  auto fs = check_frob_bound(ws, a3, cyc);
  EXPECT_EQ(pick(fs, ClaimId::FROB_BOUND).verdict, Verdict::Holds);
  EXPECT_EQ(pick(fs, ClaimId::FROB_BOUND).witness.lhs, "1/6");
  for (auto x : all_g) {
    for (const auto& f : check_frob_bound(ws, full, x)) EXPECT_EQ(f.verdict, Verdict::Holds);
  }
}

TEST_F(S3Audit, ZetaCharacter) {
  EXPECT_EQ(pick(check_zeta_character(ws, full, 1, 1), ClaimId::ZETA_CHAR).verdict, Verdict::Holds);
  EXPECT_EQ(pick(check_zeta_character(ws, a3, 1, 1), ClaimId::ZETA_CHAR).verdict, Verdict::Holds);
}

TEST(ZetaCharacter, NonClassConstantIsPreconditionFailure) {
  auto g = named_group('S', 4);
  AuditWorkspace ws(g);
  auto h = subgroup_closure(g, std::vector<ElementId>{find_label(*g, "(1,2)")});
  auto fs = check_zeta_character(ws, h, 1, 1);
  EXPECT_EQ(pick(fs, ClaimId::ZETA_CHAR).verdict, Verdict::PreconditionFailed);
}

TEST_F(S3Audit, HardGuaranteesHold) {
  for (const auto& f : check_eq3(ws)) EXPECT_EQ(f.verdict, Verdict::Holds);
  for (const auto& f : check_eq4(ws)) EXPECT_EQ(f.verdict, Verdict::Holds);
  for (const auto& f : check_psi(ws)) EXPECT_EQ(f.verdict, Verdict::Holds);
  for (const auto& h : {triv, a3, full}) {
    for (const auto& f : check_eq7(ws, h)) EXPECT_EQ(f.verdict, Verdict::Holds);
  }
  EXPECT_EQ(pick(check_eq7(ws, t12), ClaimId::EQ7).verdict, Verdict::PreconditionFailed);
}

TEST_F(S3Audit, SeededFaultIsCaughtByP3) {
  auto clean = ws.x_block(full, 1);
  auto corrupted = clean;
  corrupted.counts[cyc] += 1;
  ws.set_x_block_fixture(full, 1, corrupted);
  auto fs = check_class_formula(ws, full, full, 1, 1, all_g);
  EXPECT_GE(count(fs, ClaimId::P3_m1, Verdict::Violated), 1u);
  ws.set_x_block_fixture(full, 1, clean);
  fs = check_class_formula(ws, full, full, 1, 1, all_g);
  EXPECT_EQ(count(fs, ClaimId::P3_m1, Verdict::Violated), 0u);
}

TEST_F(S3Audit, ViolationsReproduceOnRecheck) {
  std::vector<ElementId> gs{0, cyc};
  auto first = check_class_formula(ws, full, full, 1, 2, gs);
  AuditWorkspace fresh(g);
  auto second = check_class_formula(fresh, full, full, 1, 2, gs);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(to_json(first[i]).dump(), to_json(second[i]).dump());
  }
}

TEST(AuditConfig, Parsing) {
  auto c = audit_config_from_json(Json::parse(
      R"({"groups":["S3","Q8"],"n":[1],"m":[2],"claims":["P3_mgt1"],"seed":7,"emit":"all"})"));
  EXPECT_EQ(c.groups, (std::vector<std::string>{"S3", "Q8"}));
  EXPECT_EQ(c.ns, (std::vector<unsigned>{1}));
  EXPECT_EQ(c.ms, (std::vector<unsigned>{2}));
  EXPECT_EQ(c.claims, (std::vector<ClaimId>{ClaimId::P3_mgt1}));
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.emit, EmitPolicy::All);
  EXPECT_FALSE(audit_config_from_json(Json::parse(R"({"battery":"default"})")).groups.empty());
}

TEST(AuditConfig, RejectsMalformedInput) {
  EXPECT_TRUE(config_rejected("[]"));
  EXPECT_TRUE(config_rejected(R"({"bogus":1})"));
  EXPECT_TRUE(config_rejected(R"({"n":[0]})"));
  EXPECT_TRUE(config_rejected(R"({"claims":["P9"]})"));
  EXPECT_TRUE(config_rejected(R"({"claims":"P3_m1"})"));
  EXPECT_TRUE(config_rejected(R"({"emit":"some"})"));
  EXPECT_TRUE(config_rejected(R"({"g_policy":"none"})"));
  EXPECT_TRUE(config_rejected(R"({"threads":0})"));
  EXPECT_TRUE(config_rejected(R"({"battery":"large"})"));
}

TEST(RunBattery, EmptyClaimFilterGivesEmptyReport) {
  auto c = default_audit_config();
  c.groups = {"S3"};
  c.claims = {};
  auto r = run_battery(c);
  EXPECT_TRUE(r.findings.empty());
  EXPECT_TRUE(r.summary.empty());
  EXPECT_FALSE(r.hard_guarantee_violated());
}

TEST(RunBattery, DeterministicAcrossRunsAndThreads) {
  auto c = audit_config_from_json(
      Json::parse(R"({"groups":["S3","Q8","C2xC2"],"emit":"all","seed":11})"));
  const std::string a = to_json(run_battery(c)).dump();
  const std::string b = to_json(run_battery(c)).dump();
  EXPECT_EQ(a, b);
  c.threads = 4;
  EXPECT_EQ(to_json(run_battery(c)).dump(), a);
  EXPECT_EQ(to_csv(run_battery(c)), to_csv(run_battery(c)));
}

TEST(RunBattery, ReportShape) {
  auto c = audit_config_from_json(Json::parse(R"({"groups":["S3"],"claims":["C5"],"seed":3})"));
  const Json j = to_json(run_battery(c));
  EXPECT_EQ(j["seed"], 3);
  EXPECT_TRUE(j.contains("config_echo"));
  EXPECT_TRUE(j["summary"].contains("C5"));
  EXPECT_EQ(j["legend"].size(), 1u);
  EXPECT_NE(j["legend"]["C5"].get<std::string>().find("Z(H)=1"), std::string::npos);
  for (const auto& f : j["findings"]) {
    EXPECT_EQ(f["verdict"], "violated");
    EXPECT_FALSE(f.contains("runtime_ms"));
  }
  c.timings = true;
  c.emit = EmitPolicy::All;
  for (const auto& f : to_json(run_battery(c))["findings"]) EXPECT_TRUE(f.contains("runtime_ms"));
}

TEST(RunBattery, HardGuaranteesOnDefaultBattery) {
  auto c = default_audit_config();
  c.claims = {ClaimId::EQ3, ClaimId::EQ4, ClaimId::EQ7, ClaimId::PSI, ClaimId::P3_m1};
  auto r = run_battery(c);
  EXPECT_FALSE(r.hard_guarantee_violated());
  EXPECT_TRUE(r.findings.empty());
  for (const auto& [key, counts] : r.summary) {
    EXPECT_EQ(counts.violated, 0u) << key;
    EXPECT_GT(counts.holds, 0u) << key;
  }
}

TEST(RunBattery, DefaultBatteryExposesP3AboveMOne) {
  auto c = default_audit_config();
  c.claims = {ClaimId::P3_mgt1};
  auto r = run_battery(c);
  bool s3_witness = false;
  for (const auto& f : r.findings) {
    s3_witness = s3_witness || (f.instance.group == "S3" && f.instance.H == "full" &&
                                f.instance.K == "full" && f.instance.n == 1 &&
                                f.instance.m == 2 && f.instance.g == ElementId{0} &&
                                f.variant.empty() && f.verdict == Verdict::Violated &&
                                f.witness.lhs == "11/36" && f.witness.rhs == "3/4");
  }
  EXPECT_TRUE(s3_witness);
  EXPECT_FALSE(r.hard_guarantee_violated());
}

TEST(RunBattery, LegendStatesTheCosetMapping) {
  auto c = audit_config_from_json(
      Json::parse(R"({"groups":["S3"],"claims":["P5"],"n":[1],"m":[1]})"));
  const Json j = to_json(run_battery(c));
  EXPECT_NE(j["legend"]["P5"].get<std::string>().find("coset gN"), std::string::npos);
}
