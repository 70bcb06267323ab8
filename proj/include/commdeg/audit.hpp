#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commdeg/character.hpp"
#include "commdeg/comm.hpp"
#include "commdeg/serialize.hpp"

namespace commdeg {

enum class ClaimId {
  R1a, R1b, P1, P2a, P2b, P3_m1, P3_mgt1, C4, FROB_BOUND, ZETA_CHAR,
  P4, P5, T2_CHAIN, C5, T3i, T3ii, C6, EQ3, EQ4, EQ7, PSI,
};

std::string_view claim_name(ClaimId c);
std::optional<ClaimId> parse_claim(std::string_view name);
const std::vector<ClaimId>& all_claims();
/// EQ3, EQ4, EQ7, PSI and P3_m1 (derived predicate) must never be violated.
bool is_hard_guarantee(ClaimId c);

enum class Verdict { Holds, Violated, Vacuous, PreconditionFailed };
std::string_view verdict_name(Verdict v);

struct Instance {
  std::string group;
  std::string H;
  std::string K;
  unsigned n = 0;
  unsigned m = 0;
  std::optional<ElementId> g;
  std::string extra;
};

struct Witness {
  std::string lhs;
  std::string relation;
  std::string rhs;
  std::string note;
};

struct Finding {
  ClaimId claim = ClaimId::R1a;
  std::string variant;  // empty for the statement as written
  Instance instance;
  Verdict verdict = Verdict::Holds;
  Witness witness;
  std::optional<double> runtime_ms;

  /// Summary key: claim name, plus "/variant" for variants.
  std::string key() const;
};

/// Per-group cache of distributions, conjugacy data and the character table
/// shared by the checks. Not thread-safe; use one per worker.
class AuditWorkspace {
 public:
  explicit AuditWorkspace(GroupPtr g, EngineOptions opts = {}, std::uint64_t seed = 0x5eed);
  ~AuditWorkspace();
  AuditWorkspace(const AuditWorkspace&) = delete;
  AuditWorkspace& operator=(const AuditWorkspace&) = delete;

  const GroupPtr& group() const { return group_; }
  const EngineOptions& options() const { return opts_; }
  const SubgroupRef& full() const { return full_; }

  const CommDistribution& x_block(const SubgroupRef& h, unsigned n);
  const CommDistribution& final_dist(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                     unsigned m);
  /// Brute-force histogram, or nullptr when the brute cap is exceeded.
  const CommDistribution* brute(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                unsigned m);
  Rational prob(const SubgroupRef& h, const SubgroupRef& k, unsigned n, unsigned m, ElementId g);
  const ConjugacyInfo& conj(const SubgroupRef& k);
  const CharacterTable& table();
  const SubgroupRef& center();
  const QuotientGroup& quotient(const SubgroupRef& n);

  /// Replaces the x-block distribution for (h, n); used to seed faults.
  void set_x_block_fixture(const SubgroupRef& h, unsigned n, CommDistribution dist);

 private:
  struct Caches;
  GroupPtr group_;
  EngineOptions opts_;
  std::uint64_t seed_;
  SubgroupRef full_;
  std::unique_ptr<Caches> caches_;
};

// Individual checks. Each returns every finding it produces; variants of a
// claim are separate findings.

std::vector<Finding> check_remark_r1(AuditWorkspace& ws, const SubgroupRef& h,
                                     const SubgroupRef& k, unsigned n, unsigned m,
                                     std::span<const ElementId> gs);
/// A, B <= E and C, D <= F; compares p_(e,f)(A x C, B x D) with
/// p_e(A, B) * p_f(C, D).
std::vector<Finding> check_multiplicativity(const SubgroupRef& a, const SubgroupRef& b,
                                            const SubgroupRef& c, const SubgroupRef& d,
                                            unsigned n, unsigned m, ElementId e, ElementId f,
                                            const EngineOptions& opts = {});
std::vector<Finding> check_symmetry(AuditWorkspace& ws, const SubgroupRef& h,
                                    const SubgroupRef& k, unsigned n, unsigned m, ElementId g);
std::vector<Finding> check_class_formula(AuditWorkspace& ws, const SubgroupRef& h,
                                         const SubgroupRef& k, unsigned n, unsigned m,
                                         std::span<const ElementId> gs);
std::vector<Finding> check_c4(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, unsigned m);
/// Requires h <= k.
std::vector<Finding> check_monotonicity(AuditWorkspace& ws, const SubgroupRef& h,
                                        const SubgroupRef& k, unsigned n, unsigned m,
                                        ElementId g);
/// Requires `normal` normal in G and h <= normal (or normal <= h, recorded as
/// a variant).
std::vector<Finding> check_quotient(AuditWorkspace& ws, const SubgroupRef& h,
                                    const SubgroupRef& normal, unsigned n, unsigned m,
                                    ElementId g);
std::vector<Finding> check_chain(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                                 unsigned n, unsigned m, ElementId g);
std::vector<Finding> check_c5(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, ElementId g);
std::vector<Finding> check_t3(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, unsigned m, ElementId g);
std::vector<Finding> check_c6(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, unsigned m);
std::vector<Finding> check_frob_bound(AuditWorkspace& ws, const SubgroupRef& h, ElementId g);
std::vector<Finding> check_zeta_character(AuditWorkspace& ws, const SubgroupRef& h, unsigned n,
                                          unsigned m);
std::vector<Finding> check_eq3(AuditWorkspace& ws);
std::vector<Finding> check_eq4(AuditWorkspace& ws);
std::vector<Finding> check_eq7(AuditWorkspace& ws, const SubgroupRef& h);
std::vector<Finding> check_psi(AuditWorkspace& ws);

enum class GPolicy { Support, All };
enum class EmitPolicy { Violations, All };

struct AuditConfig {
  std::vector<std::string> groups;
  /// Explicit subgroup specs per group spec; groups without an entry use the
  /// full lattice when small enough, else {triv, center, full}.
  std::map<std::string, std::vector<std::string>> subgroups;
  std::vector<unsigned> ns{1, 2};
  std::vector<unsigned> ms{1, 2};
  GPolicy g_policy = GPolicy::Support;
  std::vector<ClaimId> claims;
  std::uint64_t seed = 0x5eed;
  std::size_t lattice_max_order = 24;
  std::vector<std::string> product_factors;
  EmitPolicy emit = EmitPolicy::Violations;
  bool timings = false;
  unsigned threads = 1;
  std::uint64_t brute_cap = kDefaultBruteCap;
  std::size_t max_order = kDefaultMaxOrder;
  Json echo;  // the config as supplied
};

/// Named groups of order at most 24 plus small direct products.
std::vector<std::string> default_battery_groups();
std::vector<std::string> default_product_factors();
AuditConfig default_audit_config();
/// Throws ConfigInvalid.
AuditConfig audit_config_from_json(const Json& j);

struct VerdictCounts {
  std::size_t holds = 0;
  std::size_t violated = 0;
  std::size_t vacuous = 0;
  std::size_t precondition_failed = 0;
};

struct AuditReport {
  Json config_echo;
  std::uint64_t seed = 0;
  std::map<std::string, VerdictCounts> summary;
  std::vector<Finding> findings;

  bool hard_guarantee_violated() const;
};

AuditReport run_battery(const AuditConfig& config);

Json to_json(const Finding& f);
Json to_json(const AuditReport& r);
std::string to_csv(const AuditReport& r);

}  // namespace commdeg
