#include "commdeg/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>
#include <tuple>

#include "commdeg/error.hpp"
#include "commdeg/group_spec.hpp"

namespace commdeg {

// ---------------------------------------------------------------------------
// Catalog

namespace {

struct ClaimEntry {
  ClaimId id;
  std::string_view name;
  std::string_view reading;
};

constexpr ClaimEntry kCatalog[] = {
    {ClaimId::R1a, "R1a", "p_g = 0 exactly when g is not a value of [x1..xn, y1..ym]"},
    {ClaimId::R1b, "R1b", "p_1 = 1 exactly when the nested commutator subgroup is trivial"},
    {ClaimId::P1, "P1",
     "A, B <= E and C, D <= F; p_(e,f)(A x C, B x D) = p_e(A, B) p_f(C, D)"},
    {ClaimId::P2a, "P2a",
     "p^(n,m)_g(H,K) = p^(n,m)_{g^-1}(K,H); variant index_swapped uses p^(m,n)_{g^-1}(K,H)"},
    {ClaimId::P2b, "P2b", "extra equalities when H or K is normal; vacuous otherwise"},
    {ClaimId::P3_m1, "P3_m1",
     "class formula with m = 1; derived predicate w g in Cl_K(w), variant literal_predicate uses "
     "g^-1 w in Cl_K(w)"},
    {ClaimId::P3_mgt1, "P3_mgt1", "class formula with |C_K(w)|^m weights for m > 1"},
    {ClaimId::C4, "C4",
     "applies when |C_K(w)| = 1 for every non-identity value w in the x-block support"},
    {ClaimId::FROB_BOUND, "FROB_BOUND",
     "p^(1,1)_g(H,G) <= |G:H| d(G); on equality every irreducible vanishes off H"},
    {ClaimId::ZETA_CHAR, "ZETA_CHAR",
     "zeta^(n,m) is a character; precondition_failed when it is not a class function"},
    {ClaimId::P4, "P4",
     "H <= K gives p_g(H,G) >= p_g(K,G); variant equality_iff checks the class condition"},
    {ClaimId::P5, "P5",
     "N normal with H <= N gives p_g(H,G) <= p_gN(H/N, G/N), where g is mapped to its coset gN; "
     "variant N_le_H takes N <= H"},
    {ClaimId::T2_CHAIN, "T2_CHAIN",
     "p_g(G,G) <= p_g(H,K) <= p_1(H,K) <= p_1(H,G) <= p_1(H,H), one finding per link"},
    {ClaimId::C5, "C5",
     "Z(G) = 1 gives p^(n,1)_g(H,K) <= (2^n-1)/2^n; variant Z(H)=1 swaps the hypothesis"},
    {ClaimId::T3i, "T3i", "p_g <= (2p^n+p-2)/p^(m+n) for p the smallest prime dividing |G|"},
    {ClaimId::T3ii, "T3ii", "lower bound through the tuple set Y and |H:C_H(K)|"},
    {ClaimId::C6, "C6", "when some g attains the T3i bound, checks the index bound on |H:C_H(K)|"},
    {ClaimId::EQ3, "EQ3", "character sum for p_g(G) agrees with the exact value within 1e-8"},
    {ClaimId::EQ4, "EQ4", "d(G) = k(G)/|G| and G has k(G) irreducibles"},
    {ClaimId::EQ7, "EQ7",
     "for normal H the restriction-weighted character sum equals zeta/(|H||G|) within 1e-8"},
    {ClaimId::PSI, "PSI", "psi decomposes with multiplicities |G|/chi(1) within 1e-6"},
};

}  // namespace

std::string_view claim_name(ClaimId c) {
  for (const auto& e : kCatalog) {
    if (e.id == c) return e.name;
  }
  return "?";
}

std::optional<ClaimId> parse_claim(std::string_view name) {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

const std::vector<ClaimId>& all_claims() {
  static const std::vector<ClaimId> claims = [] {
    std::vector<ClaimId> out;
    for (const auto& e : kCatalog) out.push_back(e.id);
    return out;
  }();
  return claims;
}

bool is_hard_guarantee(ClaimId c) {
  return c == ClaimId::EQ3 || c == ClaimId::EQ4 || c == ClaimId::EQ7 || c == ClaimId::PSI ||
         c == ClaimId::P3_m1;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Vacuous: return "vacuous";
    case Verdict::PreconditionFailed: return "precondition_failed";
  }
  return "?";
}

std::string Finding::key() const {
  std::string k(claim_name(claim));
  if (!variant.empty()) k += "/" + variant;
  return k;
}

bool AuditReport::hard_guarantee_violated() const {
  for (const auto& e : kCatalog) {
    if (!is_hard_guarantee(e.id)) continue;
    auto it = summary.find(std::string(e.name));
    if (it != summary.end() && it->second.violated > 0) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Workspace

namespace {

using Key = std::vector<ElementId>;

Key key_of(const SubgroupRef& s) { return {s.members().begin(), s.members().end()}; }

}  // namespace

struct AuditWorkspace::Caches {
  std::map<std::pair<Key, unsigned>, CommDistribution> x_block;
  std::map<std::tuple<Key, Key, unsigned, unsigned>, CommDistribution> final_dist;
  std::map<std::tuple<Key, Key, unsigned, unsigned>, std::optional<CommDistribution>> brute;
  std::map<Key, ConjugacyInfo> conj;
  std::map<Key, QuotientGroup> quotient;
  std::optional<CharacterTable> table;
  std::optional<SubgroupRef> center;
};

AuditWorkspace::AuditWorkspace(GroupPtr g, EngineOptions opts, std::uint64_t seed)
    : group_(std::move(g)),
      opts_(opts),
      seed_(seed),
      full_(full_subgroup(group_)),
      caches_(std::make_unique<Caches>()) {}

AuditWorkspace::~AuditWorkspace() = default;

const CommDistribution& AuditWorkspace::x_block(const SubgroupRef& h, unsigned n) {
  require_parent(*group_, h);
  auto key = std::make_pair(key_of(h), n);
  auto it = caches_->x_block.find(key);
  if (it == caches_->x_block.end()) {
    it = caches_->x_block.emplace(std::move(key), comm_distribution(h, n, opts_)).first;
  }
  return it->second;
}

const CommDistribution& AuditWorkspace::final_dist(const SubgroupRef& h, const SubgroupRef& k,
                                                   unsigned n, unsigned m) {
  require_parent(*group_, k);
  auto key = std::make_tuple(key_of(h), key_of(k), n, m);
  auto it = caches_->final_dist.find(key);
  if (it == caches_->final_dist.end()) {
    auto dist = extend_by_conjugators(x_block(h, n), k, m, opts_);
    it = caches_->final_dist.emplace(std::move(key), std::move(dist)).first;
  }
  return it->second;
}

const CommDistribution* AuditWorkspace::brute(const SubgroupRef& h, const SubgroupRef& k,
                                              unsigned n, unsigned m) {
  auto key = std::make_tuple(key_of(h), key_of(k), n, m);
  auto it = caches_->brute.find(key);
  if (it == caches_->brute.end()) {
    std::optional<CommDistribution> dist;
    if (tuple_count(h, k, n, m) <= BigInt(opts_.brute_cap)) {
      dist = brute_distribution(h, k, n, m, opts_);
    }
    it = caches_->brute.emplace(std::move(key), std::move(dist)).first;
  }
  return it->second ? &*it->second : nullptr;
}

Rational AuditWorkspace::prob(const SubgroupRef& h, const SubgroupRef& k, unsigned n, unsigned m,
                              ElementId g) {
  return Rational(final_dist(h, k, n, m).counts[g], tuple_count(h, k, n, m));
}

const ConjugacyInfo& AuditWorkspace::conj(const SubgroupRef& k) {
  auto key = key_of(k);
  auto it = caches_->conj.find(key);
  if (it == caches_->conj.end()) it = caches_->conj.emplace(std::move(key), conjugacy(*group_, k)).first;
  return it->second;
}

const CharacterTable& AuditWorkspace::table() {
  if (!caches_->table) {
    CharTableOptions opts;
    opts.seed = seed_;
    caches_->table = character_table(group_, opts);
  }
  return *caches_->table;
}

const SubgroupRef& AuditWorkspace::center() {
  if (!caches_->center) caches_->center = commdeg::center(group_);
  return *caches_->center;
}

const QuotientGroup& AuditWorkspace::quotient(const SubgroupRef& n) {
  auto key = key_of(n);
  auto it = caches_->quotient.find(key);
  if (it == caches_->quotient.end()) {
    it = caches_->quotient.emplace(std::move(key), quotient_group(group_, n)).first;
  }
  return it->second;
}

void AuditWorkspace::set_x_block_fixture(const SubgroupRef& h, unsigned n, CommDistribution dist) {
  require_parent(*group_, h);
  if (dist.counts.size() != group_->order()) {
    throw Error(ErrorCode::InvalidArgument, "fixture distribution has the wrong length");
  }
  caches_->x_block[std::make_pair(key_of(h), n)] = std::move(dist);
  caches_->final_dist.clear();
}

// ---------------------------------------------------------------------------
// Recording

namespace {

class Collector {
 public:
  Collector(EmitPolicy emit, bool timings) : emit_(emit), timings_(timings) {}

  template <class InstanceFn, class WitnessFn>
  void record(ClaimId claim, std::string_view variant, Verdict verdict, InstanceFn&& instance,
              WitnessFn&& witness) {
    std::string key(claim_name(claim));
    if (!variant.empty()) {
      key += '/';
      key += variant;
    }
    auto& counts = summary_[key];
    switch (verdict) {
      case Verdict::Holds: ++counts.holds; break;
      case Verdict::Violated: ++counts.violated; break;
      case Verdict::Vacuous: ++counts.vacuous; break;
      case Verdict::PreconditionFailed: ++counts.precondition_failed; break;
    }
    if (emit_ == EmitPolicy::All || verdict == Verdict::Violated ||
        verdict == Verdict::PreconditionFailed) {
      findings_.push_back(Finding{claim, std::string(variant), instance(), verdict, witness(), {}});
    }
  }

  // Stamps findings recorded since the matching begin() with the elapsed time.
  void begin() {
    if (!timings_) return;
    mark_ = findings_.size();
    start_ = std::chrono::steady_clock::now();
  }
  void end() {
    if (!timings_) return;
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    for (std::size_t i = mark_; i < findings_.size(); ++i) findings_[i].runtime_ms = ms;
  }

  std::map<std::string, VerdictCounts>& summary() { return summary_; }
  std::vector<Finding>& findings() { return findings_; }

 private:
  EmitPolicy emit_;
  bool timings_;
  std::map<std::string, VerdictCounts> summary_;
  std::vector<Finding> findings_;
  std::size_t mark_ = 0;
  std::chrono::steady_clock::time_point start_;
};

std::string str(const Rational& q) { return to_string(q); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Verdict holds_if(bool ok) { return ok ? Verdict::Holds : Verdict::Violated; }

Instance make_instance(const AuditWorkspace& ws, const SubgroupRef* h, const SubgroupRef* k,
                       unsigned n, unsigned m, std::optional<ElementId> g) {
  Instance inst;
  inst.group = ws.group()->name();
  if (h) inst.H = h->label();
  if (k) inst.K = k->label();
  inst.n = n;
  inst.m = m;
  inst.g = g;
  return inst;
}

std::string counts_note(const BigInt& num_count, const BigInt& total, std::string_view what) {
  return std::string(what) + " count " + num_count.str() + " of " + total.str();
}

// -- R1a, R1b -----------------------------------------------------------------

void run_r1(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m, std::span<const ElementId> gs, bool want_a, bool want_b) {
  const auto& fin = ws.final_dist(h, k, n, m);
  const CommDistribution* brute = ws.brute(h, k, n, m);
  const auto& values = brute ? *brute : fin;
  const char* source = brute ? "value set by enumeration" : "value set by distribution";
  if (want_a) {
    for (auto g : gs) {
      const Rational p = ws.prob(h, k, n, m, g);
      const bool in_set = values.counts[g] != 0;
      out.record(
          ClaimId::R1a, "", holds_if((p == 0) == !in_set),
          [&] { return make_instance(ws, &h, &k, n, m, g); },
          [&] {
            return Witness{str(p), "p == 0 iff g not in S", in_set ? "g in S" : "g not in S",
                           source};
          });
    }
  }
  if (want_b) {
    const Rational p1 = ws.prob(h, k, n, m, kIdentity);
    auto nested = subgroup_closure(ws.group(), values.support());
    out.record(
        ClaimId::R1b, "", holds_if((p1 == 1) == nested.is_trivial()),
        [&] { return make_instance(ws, &h, &k, n, m, kIdentity); },
        [&] {
          return Witness{str(p1), "p_1 == 1 iff [nH,mK] = 1",
                         "|[nH,mK]| = " + std::to_string(nested.order()), source};
        });
  }
}

// -- P2a, P2b -----------------------------------------------------------------

void run_p2(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m, ElementId g, bool want_a, bool want_b) {
  const auto& G = *ws.group();
  const ElementId gi = G.inv(g);
  const Rational p = ws.prob(h, k, n, m, g);
  auto inst = [&] { return make_instance(ws, &h, &k, n, m, g); };
  if (want_a) {
    const Rational as_written = ws.prob(k, h, n, m, gi);
    out.record(ClaimId::P2a, "", holds_if(p == as_written), inst, [&] {
      return Witness{str(p), "==", str(as_written), "p^(n,m)_g(H,K) vs p^(n,m)_{g^-1}(K,H)"};
    });
    const Rational swapped = ws.prob(k, h, m, n, gi);
    out.record(ClaimId::P2a, "index_swapped", holds_if(p == swapped), inst, [&] {
      return Witness{str(p), "==", str(swapped), "p^(n,m)_g(H,K) vs p^(m,n)_{g^-1}(K,H)"};
    });
  }
  if (want_b) {
    const bool normal = is_normal(G, h) || is_normal(G, k);
    if (!normal) {
      out.record(ClaimId::P2b, "", Verdict::Vacuous, inst,
                 [] { return Witness{"", "", "", "neither H nor K is normal"}; });
    } else {
      const Rational swapped = ws.prob(k, h, n, m, g);
      const Rational inverse = ws.prob(h, k, n, m, gi);
      out.record(ClaimId::P2b, "", holds_if(p == swapped && swapped == inverse), inst, [&] {
        return Witness{str(p), "== p_g(K,H) == p_{g^-1}(H,K)", str(swapped) + ", " + str(inverse),
                       ""};
      });
    }
  }
}

// -- P3_m1, P3_mgt1 -----------------------------------------------------------

void run_p3(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m, std::span<const ElementId> gs) {
  const auto& G = *ws.group();
  const ClaimId claim = m == 1 ? ClaimId::P3_m1 : ClaimId::P3_mgt1;
  const auto& xb = ws.x_block(h, n);
  const auto& conj_k = ws.conj(k);
  const CommDistribution* brute = ws.brute(h, k, n, m);
  const auto& exact = brute ? *brute : ws.final_dist(h, k, n, m);
  const BigInt total = tuple_count(h, k, n, m);
  for (auto g : gs) {
    for (auto pred : {Predicate::Derived, Predicate::Literal}) {
      const BigInt formula = class_formula_count(G, xb, conj_k, m, g, pred);
      const BigInt& truth = exact.counts[g];
      out.record(
          claim, pred == Predicate::Derived ? "" : "literal_predicate", holds_if(formula == truth),
          [&] { return make_instance(ws, &h, &k, n, m, g); },
          [&] {
            return Witness{str(Rational(formula, total)), "==", str(Rational(truth, total)),
                           counts_note(formula, total, "class formula") + "; " +
                               counts_note(truth, total, brute ? "brute" : "distribution")};
          });
    }
  }
}

// -- C4 -----------------------------------------------------------------------

void run_c4(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m) {
  const auto& xb = ws.x_block(h, n);
  const auto& conj_k = ws.conj(k);
  bool any = false;
  std::optional<ElementId> blocker;
  for (auto w : xb.support()) {
    if (w == kIdentity) continue;
    any = true;
    if (conj_k.centralizer_order[w] != 1 && !blocker) blocker = w;
  }
  auto inst = [&] { return make_instance(ws, &h, &k, n, m, kIdentity); };
  if (!any || blocker) {
    out.record(ClaimId::C4, "", Verdict::Vacuous, inst, [&] {
      return Witness{"", "", "",
                     !any ? "no non-identity commutator values"
                          : "C_K(w) nontrivial for w = " + std::to_string(*blocker)};
    });
    return;
  }
  const BigInt hn = ipow(BigInt(h.order()), n), km = ipow(BigInt(k.order()), m);
  const Rational p1 = ws.prob(h, k, n, m, kIdentity);
  const Rational rhs = Rational(1, hn) + Rational(1, km) - Rational(1, hn * km);
  out.record(ClaimId::C4, "", holds_if(p1 == rhs), inst,
             [&] { return Witness{str(p1), "==", str(rhs), "1/|H|^n + 1/|K|^m - 1/(|H|^n|K|^m)"}; });
}

// -- P4 -----------------------------------------------------------------------

void run_p4(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m, ElementId g) {
  auto inst = [&] { return make_instance(ws, &h, &k, n, m, g); };
  if (!h.is_subset_of(k)) {
    out.record(ClaimId::P4, "", Verdict::PreconditionFailed, inst,
               [] { return Witness{"", "", "", "H is not contained in K"}; });
    return;
  }
  const auto& full = ws.full();
  const Rational ph = ws.prob(h, full, n, m, g);
  const Rational pk = ws.prob(k, full, n, m, g);
  out.record(ClaimId::P4, "", holds_if(ph >= pk), inst,
             [&] { return Witness{str(ph), ">=", str(pk), "p_g(H,G) vs p_g(K,G)"}; });
  const bool classes_agree = ws.conj(h).class_of == ws.conj(k).class_of;
  out.record(ClaimId::P4, "equality_iff", holds_if((ph == pk) == classes_agree), inst, [&] {
    return Witness{ph == pk ? "equal" : "not equal", "iff",
                   classes_agree ? "Cl_H(x) = Cl_K(x) for all x" : "some Cl_H(x) != Cl_K(x)", ""};
  });
}

// -- P5 -----------------------------------------------------------------------

void run_p5(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& normal,
            unsigned n, unsigned m, std::span<const ElementId> gs) {
  const auto& G = *ws.group();
  auto inst = [&](ElementId g) {
    auto i = make_instance(ws, &h, &ws.full(), n, m, g);
    i.extra = "N=" + normal.label();
    return i;
  };
  std::string variant;
  if (!is_normal(G, normal)) {
    variant = "";
  } else if (h.is_subset_of(normal)) {
    variant = "";
  } else if (normal.is_subset_of(h)) {
    variant = "N_le_H";
  } else {
    for (auto g : gs) {
      out.record(ClaimId::P5, "", Verdict::PreconditionFailed, [&] { return inst(g); },
                 [] { return Witness{"", "", "", "H and N are not nested"}; });
    }
    return;
  }
  if (!is_normal(G, normal)) {
    for (auto g : gs) {
      out.record(ClaimId::P5, "", Verdict::PreconditionFailed, [&] { return inst(g); },
                 [] { return Witness{"", "", "", "N is not normal"}; });
    }
    return;
  }
  const auto& q = ws.quotient(normal);
  const auto hq = image_subgroup(h, q);
  const auto gq = full_subgroup(q.group);
  const auto qdist = extend_by_conjugators(comm_distribution(hq, n, ws.options()), gq, m,
                                           ws.options());
  const BigInt qtotal = tuple_count(hq, gq, n, m);
  const auto& fin = ws.final_dist(h, ws.full(), n, m);
  auto nested = subgroup_closure(ws.group(), fin.support());
  bool meets_trivially = true;
  for (auto x : nested.members()) {
    if (x != kIdentity && normal.contains(x)) meets_trivially = false;
  }
  const std::string eq_variant = variant.empty() ? "equality" : variant + "/equality";
  for (auto g : gs) {
    const Rational lhs = ws.prob(h, ws.full(), n, m, g);
    const Rational rhs(qdist.counts[q.projection[g]], qtotal);
    out.record(ClaimId::P5, variant, holds_if(lhs <= rhs), [&] { return inst(g); }, [&] {
      return Witness{str(lhs), "<=", str(rhs), "quotient side evaluated at gN"};
    });
    if (!meets_trivially) {
      out.record(ClaimId::P5, eq_variant, Verdict::Vacuous, [&] { return inst(g); },
                 [] { return Witness{"", "", "", "N meets [nH,mG] nontrivially"}; });
    } else {
      out.record(ClaimId::P5, eq_variant, holds_if(lhs == rhs), [&] { return inst(g); },
                 [&] { return Witness{str(lhs), "==", str(rhs), "N meets [nH,mG] trivially"}; });
    }
  }
}

// -- T2_CHAIN -----------------------------------------------------------------

void run_t2(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m, ElementId g) {
  const auto& full = ws.full();
  const Rational chain[] = {
      ws.prob(full, full, n, m, g),      ws.prob(h, k, n, m, g),
      ws.prob(h, k, n, m, kIdentity),    ws.prob(h, full, n, m, kIdentity),
      ws.prob(h, h, n, m, kIdentity),
  };
  static constexpr const char* kLinks[] = {
      "p_g(G,G) <= p_g(H,K)", "p_g(H,K) <= p_1(H,K)", "p_1(H,K) <= p_1(H,G)",
      "p_1(H,G) <= p_1(H,H)"};
  for (int i = 0; i < 4; ++i) {
    out.record(ClaimId::T2_CHAIN, "link" + std::to_string(i + 1),
               holds_if(chain[i] <= chain[i + 1]),
               [&] { return make_instance(ws, &h, &k, n, m, g); },
               [&] { return Witness{str(chain[i]), "<=", str(chain[i + 1]), kLinks[i]}; });
  }
}

// -- C5 -----------------------------------------------------------------------

void run_c5(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, ElementId g) {
  const Rational p = ws.prob(h, k, n, 1, g);
  const BigInt two_n = ipow(BigInt(2), n);
  const Rational bound(two_n - 1, two_n);
  auto inst = [&] { return make_instance(ws, &h, &k, n, 1, g); };
  const bool zg_trivial = ws.center().is_trivial();
  if (!zg_trivial) {
    out.record(ClaimId::C5, "", Verdict::Vacuous, inst,
               [] { return Witness{"", "", "", "Z(G) is nontrivial"}; });
  } else {
    out.record(ClaimId::C5, "", holds_if(p <= bound), inst,
               [&] { return Witness{str(p), "<=", str(bound), "(2^n-1)/2^n with Z(G) = 1"}; });
  }
  const bool zh_trivial = centralizer_of_subgroup(h, h).is_trivial();
  if (!zh_trivial) {
    out.record(ClaimId::C5, "Z(H)=1", Verdict::Vacuous, inst,
               [] { return Witness{"", "", "", "Z(H) is nontrivial"}; });
  } else {
    out.record(ClaimId::C5, "Z(H)=1", holds_if(p <= bound), inst,
               [&] { return Witness{str(p), "<=", str(bound), "(2^n-1)/2^n with Z(H) = 1"}; });
  }
}

// -- T3i, T3ii, C6 ------------------------------------------------------------

Rational t3_upper(unsigned p, unsigned n, unsigned m) {
  const BigInt pn = ipow(BigInt(p), n);
  return Rational(2 * pn + p - 2, ipow(BigInt(p), m + n));
}

void run_t3(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m, ElementId g, bool want_i, bool want_ii) {
  auto inst = [&] { return make_instance(ws, &h, &k, n, m, g); };
  if (ws.group()->order() < 2) {
    if (want_i) {
      out.record(ClaimId::T3i, "", Verdict::PreconditionFailed, inst,
                 [] { return Witness{"", "", "", "|G| = 1"}; });
    }
    if (want_ii) {
      out.record(ClaimId::T3ii, "", Verdict::PreconditionFailed, inst,
                 [] { return Witness{"", "", "", "|G| = 1"}; });
    }
    return;
  }
  const unsigned p = smallest_prime_divisor(*ws.group());
  const Rational prob = ws.prob(h, k, n, m, g);
  if (want_i) {
    const Rational bound = t3_upper(p, n, m);
    out.record(ClaimId::T3i, "", holds_if(prob <= bound), inst, [&] {
      return Witness{str(prob), "<=", str(bound), "(2p^n+p-2)/p^(m+n), p = " + std::to_string(p)};
    });
  }
  if (want_ii) {
    const auto& xb = ws.x_block(h, n);
    const auto& conj_k = ws.conj(k);
    BigInt y = 0;
    for (std::size_t w = 0; w < xb.counts.size(); ++w) {
      if (conj_k.centralizer_order[w] == 1) y += xb.counts[w];
    }
    const BigInt hn = ipow(BigInt(h.order()), n), km = ipow(BigInt(k.order()), m);
    const BigInt chk = ipow(BigInt(centralizer_of_subgroup(h, k).order()), n);
    const BigInt bp(p);
    const Rational lower = Rational((1 - bp) * y + bp * hn, hn * km) -
                           Rational((BigInt(k.order()) + bp) * chk, hn * km);
    out.record(ClaimId::T3ii, "", holds_if(prob >= lower), inst, [&] {
      return Witness{str(prob), ">=", str(lower),
                     "|Y| = " + y.str() + ", |C_H(K)|^n = " + chk.str() + ", p = " +
                         std::to_string(p)};
    });
  }
}

void run_c6(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
            unsigned n, unsigned m) {
  if (ws.group()->order() < 2) {
    out.record(ClaimId::C6, "", Verdict::PreconditionFailed,
               [&] { return make_instance(ws, &h, &k, n, m, std::nullopt); },
               [] { return Witness{"", "", "", "|G| = 1"}; });
    return;
  }
  const unsigned p = smallest_prime_divisor(*ws.group());
  const Rational bound = t3_upper(p, n, m);
  std::optional<ElementId> attained;
  for (ElementId g = 0; g < ws.group()->order() && !attained; ++g) {
    if (ws.prob(h, k, n, m, g) == bound) attained = g;
  }
  if (!attained) {
    out.record(ClaimId::C6, "", Verdict::Vacuous,
               [&] { return make_instance(ws, &h, &k, n, m, std::nullopt); },
               [] { return Witness{"", "", "", "no g attains the upper bound"}; });
    return;
  }
  const BigInt bp(p);
  const BigInt index(h.order() / centralizer_of_subgroup(h, k).order());
  const Rational rhs = Rational(ipow(bp, n + 1) - ipow(bp, 3) + bp, 1) - Rational(bp * bp, 2);
  const Rational rhs_scaled = rhs / Rational(2 * bp * bp + bp - 2);
  const Rational lhs(ipow(index, n));
  out.record(ClaimId::C6, "", holds_if(lhs <= rhs_scaled),
             [&] { return make_instance(ws, &h, &k, n, m, attained); },
             [&] {
               return Witness{str(lhs), "<=", str(rhs_scaled),
                              "|H:C_H(K)|^n against the n-th power of the bound; p = " +
                                  std::to_string(p)};
             });
}

// -- Character claims ----------------------------------------------------------

template <class Body>
bool with_table(Collector& out, AuditWorkspace& ws, ClaimId claim, const SubgroupRef* h,
                Body body) {
  try {
    body(ws.table());
    return true;
  } catch (const Error& e) {
    out.record(claim, "", Verdict::PreconditionFailed,
               [&] { return make_instance(ws, h, nullptr, 0, 0, std::nullopt); },
               [&] { return Witness{"", "", "", e.what()}; });
    return false;
  }
}

void run_frob(Collector& out, AuditWorkspace& ws, const SubgroupRef& h,
              std::span<const ElementId> gs) {
  with_table(out, ws, ClaimId::FROB_BOUND, &h, [&](const CharacterTable& table) {
    const auto& full = ws.full();
    const Rational d = ws.prob(full, full, 1, 1, kIdentity);
    const Rational rhs = Rational(ws.group()->order() / h.order()) * d;
    bool all_vanish = true;
    for (std::size_t i = 0; i < table.irreducibles.size(); ++i) {
      all_vanish = all_vanish && vanishes_outside(table, i, h);
    }
    for (auto g : gs) {
      const Rational lhs = ws.prob(h, full, 1, 1, g);
      const bool ok = lhs <= rhs && (lhs != rhs || all_vanish);
      out.record(ClaimId::FROB_BOUND, "", holds_if(ok),
                 [&] { return make_instance(ws, &h, &full, 1, 1, g); },
                 [&] {
                   return Witness{str(lhs), "<=", str(rhs),
                                  std::string(lhs == rhs ? "equality; " : "") +
                                      (all_vanish ? "all irreducibles vanish on G-H"
                                                  : "some irreducible is nonzero on G-H")};
                 });
    }
  });
}

void run_zeta_char(Collector& out, AuditWorkspace& ws, const SubgroupRef& h, unsigned n,
                   unsigned m) {
  with_table(out, ws, ClaimId::ZETA_CHAR, &h, [&](const CharacterTable& table) {
    const auto& counts = ws.final_dist(h, ws.full(), n, m).counts;
    auto inst = [&] { return make_instance(ws, &h, &ws.full(), n, m, std::nullopt); };
    if (!is_class_constant(table, counts)) {
      out.record(ClaimId::ZETA_CHAR, "", Verdict::PreconditionFailed, inst,
                 [] { return Witness{"", "", "", "zeta is not constant on conjugacy classes"}; });
      return;
    }
    const auto report = is_character(class_function_from_counts(table, counts), table);
    out.record(ClaimId::ZETA_CHAR, "", holds_if(report.is_character), inst, [&] {
      std::ostringstream mult;
      mult << '[';
      for (std::size_t i = 0; i < report.rounded.size(); ++i) {
        if (i) mult << ',';
        mult << report.rounded[i];
      }
      mult << ']';
      return Witness{mult.str(), "non-negative integer multiplicities", "",
                     "rounding deviation " + num(report.rounding_deviation) +
                         ", reconstruction deviation " + num(report.reconstruction_deviation)};
    });
  });
}

void run_eq3(Collector& out, AuditWorkspace& ws) {
  with_table(out, ws, ClaimId::EQ3, nullptr, [&](const CharacterTable& table) {
    const auto& full = ws.full();
    double worst = 0;
    ElementId worst_g = 0;
    bool residue = false;
    for (ElementId g = 0; g < ws.group()->order(); ++g) {
      try {
        const double dev =
            std::abs(prob_char_pg(table, g) - to_double(ws.prob(full, full, 1, 1, g)));
        if (dev > worst) {
          worst = dev;
          worst_g = g;
        }
      } catch (const Error&) {
        residue = true;
        worst_g = g;
        break;
      }
    }
    out.record(ClaimId::EQ3, "", holds_if(!residue && worst < kComparisonTol),
               [&] { return make_instance(ws, &full, &full, 1, 1, worst_g); },
               [&] {
                 return Witness{num(worst), "<", num(kComparisonTol),
                                residue ? "imaginary residue" : "max |char sum - exact| over g"};
               });
  });
}

void run_eq4(Collector& out, AuditWorkspace& ws) {
  with_table(out, ws, ClaimId::EQ4, nullptr, [&](const CharacterTable& table) {
    const auto& full = ws.full();
    const Rational d = ws.prob(full, full, 1, 1, kIdentity);
    const Rational kg(table.num_classes(), ws.group()->order());
    const bool ok = table.irreducibles.size() == table.num_classes() && d == kg;
    out.record(ClaimId::EQ4, "", holds_if(ok),
               [&] { return make_instance(ws, &full, &full, 1, 1, kIdentity); },
               [&] {
                 return Witness{str(d), "==", str(kg),
                                std::to_string(table.irreducibles.size()) + " irreducibles, " +
                                    std::to_string(table.num_classes()) + " classes"};
               });
  });
}

void run_eq7(Collector& out, AuditWorkspace& ws, const SubgroupRef& h) {
  with_table(out, ws, ClaimId::EQ7, &h, [&](const CharacterTable& table) {
    const auto& G = *ws.group();
    auto inst = [&](std::optional<ElementId> g) {
      return make_instance(ws, &h, &ws.full(), 1, 1, g);
    };
    if (!is_normal(G, h)) {
      out.record(ClaimId::EQ7, "", Verdict::PreconditionFailed, [&] { return inst(std::nullopt); },
                 [] { return Witness{"", "", "", "H is not normal"}; });
      return;
    }
    const double denom = static_cast<double>(h.order()) * static_cast<double>(G.order());
    double worst = 0;
    ElementId worst_g = 0;
    for (ElementId g = 0; g < G.order(); ++g) {
      const double exact = zeta(G, h, g).convert_to<double>() / denom;
      const double dev = std::abs(prob_char_relative(table, h, g) - exact);
      if (dev > worst) {
        worst = dev;
        worst_g = g;
      }
    }
    out.record(ClaimId::EQ7, "", holds_if(worst < kComparisonTol), [&] { return inst(worst_g); },
               [&] {
                 return Witness{num(worst), "<", num(kComparisonTol),
                                "max |character sum - zeta/(|H||G|)| over g"};
               });
  });
}

void run_psi(Collector& out, AuditWorkspace& ws) {
  with_table(out, ws, ClaimId::PSI, nullptr, [&](const CharacterTable& table) {
    const auto psi = psi_class_function(table);
    out.record(ClaimId::PSI, "", holds_if(psi.max_deviation < kRoundingTol),
               [&] { return make_instance(ws, &ws.full(), &ws.full(), 1, 1, std::nullopt); },
               [&] {
                 return Witness{num(psi.max_deviation), "<", num(kRoundingTol),
                                "max |<psi,chi> - |G|/chi(1)|"};
               });
  });
}

// -- P1 -----------------------------------------------------------------------

void run_p1(Collector& out, const SubgroupRef& a, const SubgroupRef& b, const SubgroupRef& c,
            const SubgroupRef& d, unsigned n, unsigned m, std::span<const ElementId> es,
            std::span<const ElementId> fs, const EngineOptions& opts) {
  if (!same_parent(a, b) || !same_parent(c, d)) {
    throw Error(ErrorCode::ForeignSubgroup, "A, B must share E and C, D must share F");
  }
  const auto product = direct_product(a.parent_ptr(), c.parent_ptr());
  const auto h = product_subgroup(product, a, c);
  const auto k = product_subgroup(product, b, d);
  const auto left =
      extend_by_conjugators(comm_distribution(a, n, opts), b, m, opts);
  const auto right =
      extend_by_conjugators(comm_distribution(c, n, opts), d, m, opts);
  const auto both =
      extend_by_conjugators(comm_distribution(h, n, opts), k, m, opts);
  const BigInt tl = tuple_count(a, b, n, m), tr = tuple_count(c, d, n, m),
               tb = tuple_count(h, k, n, m);
  const std::size_t nf = c.parent().order();
  for (auto e : es) {
    for (auto f : fs) {
      const auto target = static_cast<ElementId>(e * nf + f);
      const Rational lhs(both.counts[target], tb);
      const Rational rhs = Rational(left.counts[e], tl) * Rational(right.counts[f], tr);
      out.record(
          ClaimId::P1, "", holds_if(lhs == rhs),
          [&] {
            Instance inst;
            inst.group = product.group->name();
            inst.H = a.label() + " x " + c.label();
            inst.K = b.label() + " x " + d.label();
            inst.n = n;
            inst.m = m;
            inst.g = target;
            inst.extra = "e=" + std::to_string(e) + ",f=" + std::to_string(f);
            return inst;
          },
          [&] { return Witness{str(lhs), "==", str(rhs), "p_e(A,B) * p_f(C,D)"}; });
    }
  }
}

// Support of the given distributions plus the identity and the least element
// outside the support.
std::vector<ElementId> policy_elements(GPolicy policy, std::size_t order,
                                       std::initializer_list<const CommDistribution*> dists) {
  std::vector<ElementId> out;
  if (policy == GPolicy::All) {
    for (ElementId g = 0; g < order; ++g) out.push_back(g);
    return out;
  }
  std::vector<bool> in(order, false);
  in[kIdentity] = true;
  for (const auto* d : dists) {
    for (std::size_t g = 0; g < order; ++g) {
      if (d->counts[g] != 0) in[g] = true;
    }
  }
  bool outside_added = false;
  for (ElementId g = 0; g < order; ++g) {
    if (in[g]) {
      out.push_back(g);
    } else if (!outside_added) {
      out.push_back(g);
      outside_added = true;
    }
  }
  return out;
}

std::vector<Finding> take(Collector& c) { return std::move(c.findings()); }

Collector collect_all() { return Collector(EmitPolicy::All, false); }

}  // namespace

// ---------------------------------------------------------------------------
// Public checks

std::vector<Finding> check_remark_r1(AuditWorkspace& ws, const SubgroupRef& h,
                                     const SubgroupRef& k, unsigned n, unsigned m,
                                     std::span<const ElementId> gs) {
  auto c = collect_all();
  run_r1(c, ws, h, k, n, m, gs, true, true);
  return take(c);
}

std::vector<Finding> check_multiplicativity(const SubgroupRef& a, const SubgroupRef& b,
                                            const SubgroupRef& c, const SubgroupRef& d,
                                            unsigned n, unsigned m, ElementId e, ElementId f,
                                            const EngineOptions& opts) {
  auto col = collect_all();
  const ElementId es[] = {e};
  const ElementId fs[] = {f};
  run_p1(col, a, b, c, d, n, m, es, fs, opts);
  return take(col);
}

std::vector<Finding> check_symmetry(AuditWorkspace& ws, const SubgroupRef& h,
                                    const SubgroupRef& k, unsigned n, unsigned m, ElementId g) {
  auto c = collect_all();
  run_p2(c, ws, h, k, n, m, g, true, true);
  return take(c);
}

std::vector<Finding> check_class_formula(AuditWorkspace& ws, const SubgroupRef& h,
                                         const SubgroupRef& k, unsigned n, unsigned m,
                                         std::span<const ElementId> gs) {
  auto c = collect_all();
  run_p3(c, ws, h, k, n, m, gs);
  return take(c);
}

std::vector<Finding> check_c4(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, unsigned m) {
  auto c = collect_all();
  run_c4(c, ws, h, k, n, m);
  return take(c);
}

std::vector<Finding> check_monotonicity(AuditWorkspace& ws, const SubgroupRef& h,
                                        const SubgroupRef& k, unsigned n, unsigned m,
                                        ElementId g) {
  auto c = collect_all();
  run_p4(c, ws, h, k, n, m, g);
  return take(c);
}

std::vector<Finding> check_quotient(AuditWorkspace& ws, const SubgroupRef& h,
                                    const SubgroupRef& normal, unsigned n, unsigned m,
                                    ElementId g) {
  auto c = collect_all();
  const ElementId gs[] = {g};
  run_p5(c, ws, h, normal, n, m, gs);
  return take(c);
}

std::vector<Finding> check_chain(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                                 unsigned n, unsigned m, ElementId g) {
  auto c = collect_all();
  run_t2(c, ws, h, k, n, m, g);
  return take(c);
}

std::vector<Finding> check_c5(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, ElementId g) {
  auto c = collect_all();
  run_c5(c, ws, h, k, n, g);
  return take(c);
}

std::vector<Finding> check_t3(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, unsigned m, ElementId g) {
  auto c = collect_all();
  run_t3(c, ws, h, k, n, m, g, true, true);
  return take(c);
}

std::vector<Finding> check_c6(AuditWorkspace& ws, const SubgroupRef& h, const SubgroupRef& k,
                              unsigned n, unsigned m) {
  auto c = collect_all();
  run_c6(c, ws, h, k, n, m);
  return take(c);
}

std::vector<Finding> check_frob_bound(AuditWorkspace& ws, const SubgroupRef& h, ElementId g) {
  auto c = collect_all();
  const ElementId gs[] = {g};
  run_frob(c, ws, h, gs);
  return take(c);
}

std::vector<Finding> check_zeta_character(AuditWorkspace& ws, const SubgroupRef& h, unsigned n,
                                          unsigned m) {
  auto c = collect_all();
  run_zeta_char(c, ws, h, n, m);
  return take(c);
}

std::vector<Finding> check_eq3(AuditWorkspace& ws) {
  auto c = collect_all();
  run_eq3(c, ws);
  return take(c);
}

std::vector<Finding> check_eq4(AuditWorkspace& ws) {
  auto c = collect_all();
  run_eq4(c, ws);
  return take(c);
}

std::vector<Finding> check_eq7(AuditWorkspace& ws, const SubgroupRef& h) {
  auto c = collect_all();
  run_eq7(c, ws, h);
  return take(c);
}

std::vector<Finding> check_psi(AuditWorkspace& ws) {
  auto c = collect_all();
  run_psi(c, ws);
  return take(c);
}

// ---------------------------------------------------------------------------
// Configuration

std::vector<std::string> default_battery_groups() {
  std::vector<std::string> out;
  for (int n = 1; n <= 24; ++n) out.push_back("C" + std::to_string(n));
  for (int n = 2; n <= 12; ++n) out.push_back("D" + std::to_string(n));
  for (const char* s : {"S3", "S4", "A4", "Q8", "C2xC2", "C2xC4", "C2xC2xC2", "C3xC3", "C2xC6",
                        "S3xC2", "S3xC3", "D4xC2", "Q8xC2", "Q8xC3", "A4xC2"}) {
    out.emplace_back(s);
  }
  return out;
}

std::vector<std::string> default_product_factors() {
  return {"C2", "C3", "C4", "C2xC2", "S3", "Q8", "D4"};
}

namespace {

Json config_to_json(const AuditConfig& c) {
  Json j;
  j["groups"] = c.groups;
  Json subs = Json::object();
  for (const auto& [g, specs] : c.subgroups) subs[g] = specs;
  j["subgroups"] = subs;
  j["n"] = c.ns;
  j["m"] = c.ms;
  j["g_policy"] = c.g_policy == GPolicy::Support ? "support" : "all";
  Json claims = Json::array();
  for (auto id : c.claims) claims.push_back(std::string(claim_name(id)));
  j["claims"] = claims;
  j["seed"] = c.seed;
  j["lattice_max_order"] = c.lattice_max_order;
  j["product_factors"] = c.product_factors;
  j["emit"] = c.emit == EmitPolicy::All ? "all" : "violations";
  j["timings"] = c.timings;
  j["brute_cap"] = c.brute_cap;
  j["max_order"] = c.max_order;
  return j;
}

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::ConfigInvalid, why); }

std::vector<unsigned> positive_list(const Json& j, const char* name) {
  if (!j.is_array() || j.empty()) invalid(std::string(name) + " must be a non-empty array");
  std::vector<unsigned> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      invalid(std::string(name) + " entries must be integers >= 1");
    }
    out.push_back(v.get<unsigned>());
  }
  return out;
}

std::vector<std::string> string_list(const Json& j, const char* name,
                                     std::vector<std::string> (*defaults)()) {
  if (j.is_string() && j.get<std::string>() == "default") return defaults();
  if (!j.is_array()) invalid(std::string(name) + " must be an array or \"default\"");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) invalid(std::string(name) + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

AuditConfig default_audit_config() {
  AuditConfig c;
  c.groups = default_battery_groups();
  c.product_factors = default_product_factors();
  c.claims = all_claims();
  c.echo = config_to_json(c);
  return c;
}

AuditConfig audit_config_from_json(const Json& j) {
  if (!j.is_object()) invalid("config must be a JSON object");
  AuditConfig c = default_audit_config();
  for (const auto& [key, value] : j.items()) {
    if (key == "groups") {
      c.groups = string_list(value, "groups", default_battery_groups);
    } else if (key == "battery") {
      if (!(value.is_string() && value.get<std::string>() == "default")) {
        invalid("battery must be \"default\"");
      }
    } else if (key == "subgroups") {
      if (value.is_string() && value.get<std::string>() == "all") continue;
      if (!value.is_object()) invalid("subgroups must be \"all\" or an object");
      for (const auto& [g, specs] : value.items()) {
        c.subgroups[g] = string_list(specs, "subgroups entry", nullptr);
      }
    } else if (key == "n") {
      c.ns = positive_list(value, "n");
    } else if (key == "m") {
      c.ms = positive_list(value, "m");
    } else if (key == "g_policy") {
      const auto v = value.is_string() ? value.get<std::string>() : "";
      if (v == "support") c.g_policy = GPolicy::Support;
      else if (v == "all") c.g_policy = GPolicy::All;
      else invalid("g_policy must be \"support\" or \"all\"");
    } else if (key == "claims") {
      if (!value.is_array()) invalid("claims must be an array");
      c.claims.clear();
      for (const auto& v : value) {
        auto id = v.is_string() ? parse_claim(v.get<std::string>()) : std::nullopt;
        if (!id) invalid("unknown claim " + v.dump());
        if (std::find(c.claims.begin(), c.claims.end(), *id) == c.claims.end()) {
          c.claims.push_back(*id);
        }
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) invalid("seed must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "lattice_max_order") {
      if (!value.is_number_unsigned()) invalid("lattice_max_order must be a non-negative integer");
      c.lattice_max_order = value.get<std::size_t>();
    } else if (key == "product_factors") {
      c.product_factors = string_list(value, "product_factors", default_product_factors);
    } else if (key == "emit") {
      const auto v = value.is_string() ? value.get<std::string>() : "";
      if (v == "all") c.emit = EmitPolicy::All;
      else if (v == "violations") c.emit = EmitPolicy::Violations;
      else invalid("emit must be \"all\" or \"violations\"");
    } else if (key == "timings") {
      if (!value.is_boolean()) invalid("timings must be a boolean");
      c.timings = value.get<bool>();
    } else if (key == "threads") {
      if (!value.is_number_unsigned() || value.get<unsigned>() < 1) invalid("threads must be >= 1");
      c.threads = value.get<unsigned>();
    } else if (key == "brute_cap") {
      if (!value.is_number_unsigned()) invalid("brute_cap must be a non-negative integer");
      c.brute_cap = value.get<std::uint64_t>();
    } else if (key == "max_order") {
      if (!value.is_number_unsigned()) invalid("max_order must be a non-negative integer");
      c.max_order = value.get<std::size_t>();
    } else {
      invalid("unknown config key '" + key + "'");
    }
  }
  c.echo = config_to_json(c);
  return c;
}

// ---------------------------------------------------------------------------
// Battery

namespace {

bool wants(const AuditConfig& c, ClaimId id) {
  return std::find(c.claims.begin(), c.claims.end(), id) != c.claims.end();
}

bool wants_any(const AuditConfig& c, std::initializer_list<ClaimId> ids) {
  for (auto id : ids) {
    if (wants(c, id)) return true;
  }
  return false;
}

std::vector<SubgroupRef> battery_subgroups(const AuditConfig& config, const std::string& spec,
                                           const GroupPtr& g) {
  std::vector<SubgroupRef> subs;
  if (auto it = config.subgroups.find(spec); it != config.subgroups.end()) {
    for (const auto& s : it->second) subs.push_back(parse_subgroup_spec(g, s));
  } else if (g->order() <= config.lattice_max_order) {
    return all_subgroups(g);
  } else {
    subs = {trivial_subgroup(g), center(g), full_subgroup(g)};
  }
  std::vector<SubgroupRef> unique;
  for (auto& s : subs) {
    bool dup = std::any_of(unique.begin(), unique.end(),
                           [&](const SubgroupRef& u) { return u.same_members(s); });
    if (!dup) unique.push_back(std::move(s));
  }
  return unique;
}

void audit_group(const AuditConfig& config, const std::string& spec, Collector& out) {
  EngineOptions opts;
  opts.brute_cap = config.brute_cap;
  GroupPtr g;
  try {
    g = parse_group_spec(spec, config.max_order);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, "group '" + spec + "': " + e.what());
  }
  AuditWorkspace ws(g, opts, config.seed);
  const auto subs = battery_subgroups(config, spec, g);
  const auto& full = ws.full();
  const std::size_t order = g->order();
  auto timed = [&](auto&& body) {
    out.begin();
    body();
    out.end();
  };

  for (auto n : config.ns) {
    for (auto m : config.ms) {
      for (const auto& h : subs) {
        for (const auto& k : subs) {
          const auto gs =
              policy_elements(config.g_policy, order, {&ws.final_dist(h, k, n, m)});
          if (wants_any(config, {ClaimId::R1a, ClaimId::R1b})) {
            timed([&] {
              run_r1(out, ws, h, k, n, m, gs, wants(config, ClaimId::R1a),
                     wants(config, ClaimId::R1b));
            });
          }
          if (wants_any(config, {ClaimId::P2a, ClaimId::P2b})) {
            timed([&] {
              for (auto x : gs) {
                run_p2(out, ws, h, k, n, m, x, wants(config, ClaimId::P2a),
                       wants(config, ClaimId::P2b));
              }
            });
          }
          if (wants(config, m == 1 ? ClaimId::P3_m1 : ClaimId::P3_mgt1)) {
            timed([&] { run_p3(out, ws, h, k, n, m, gs); });
          }
          if (wants(config, ClaimId::C4)) timed([&] { run_c4(out, ws, h, k, n, m); });
          if (wants(config, ClaimId::T2_CHAIN)) {
            timed([&] {
              for (auto x : gs) run_t2(out, ws, h, k, n, m, x);
            });
          }
          if (m == 1 && wants(config, ClaimId::C5)) {
            timed([&] {
              for (auto x : gs) run_c5(out, ws, h, k, n, x);
            });
          }
          if (wants_any(config, {ClaimId::T3i, ClaimId::T3ii})) {
            timed([&] {
              for (auto x : gs) {
                run_t3(out, ws, h, k, n, m, x, wants(config, ClaimId::T3i),
                       wants(config, ClaimId::T3ii));
              }
            });
          }
          if (wants(config, ClaimId::C6)) timed([&] { run_c6(out, ws, h, k, n, m); });
        }
      }

      for (const auto& h : subs) {
        if (wants(config, ClaimId::ZETA_CHAR)) timed([&] { run_zeta_char(out, ws, h, n, m); });
        if (wants(config, ClaimId::P4)) {
          for (const auto& k : subs) {
            if (!h.is_subset_of(k)) continue;
            const auto gs = policy_elements(config.g_policy, order,
                                            {&ws.final_dist(h, full, n, m),
                                             &ws.final_dist(k, full, n, m)});
            timed([&] {
              for (auto x : gs) run_p4(out, ws, h, k, n, m, x);
            });
          }
        }
        if (wants(config, ClaimId::P5)) {
          for (const auto& normal : subs) {
            if (!is_normal(*g, normal)) continue;
            if (!h.is_subset_of(normal) && !normal.is_subset_of(h)) continue;
            const auto gs =
                policy_elements(config.g_policy, order, {&ws.final_dist(h, full, n, m)});
            timed([&] { run_p5(out, ws, h, normal, n, m, gs); });
          }
        }
      }
    }
  }

  for (const auto& h : subs) {
    if (wants(config, ClaimId::FROB_BOUND)) {
      const auto gs = policy_elements(config.g_policy, order, {&ws.final_dist(h, full, 1, 1)});
      timed([&] { run_frob(out, ws, h, gs); });
    }
    if (wants(config, ClaimId::EQ7) && is_normal(*g, h)) timed([&] { run_eq7(out, ws, h); });
  }
  if (wants(config, ClaimId::EQ3)) timed([&] { run_eq3(out, ws); });
  if (wants(config, ClaimId::EQ4)) timed([&] { run_eq4(out, ws); });
  if (wants(config, ClaimId::PSI)) timed([&] { run_psi(out, ws); });
}

// Factor subgroups for the multiplicativity sweep: the whole group plus the
// first proper nontrivial subgroup of the lattice, when one exists.
std::vector<SubgroupRef> factor_subgroups(const GroupPtr& g) {
  std::vector<SubgroupRef> out{full_subgroup(g)};
  for (const auto& s : all_subgroups(g)) {
    if (!s.is_trivial() && !s.is_full()) {
      out.push_back(s);
      break;
    }
  }
  return out;
}

void audit_products(const AuditConfig& config, Collector& out) {
  EngineOptions opts;
  opts.brute_cap = config.brute_cap;
  std::vector<GroupPtr> factors;
  for (const auto& spec : config.product_factors) {
    try {
      factors.push_back(parse_group_spec(spec, config.max_order));
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigInvalid, "product factor '" + spec + "': " + e.what());
    }
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (std::size_t j = i; j < factors.size(); ++j) {
      const auto& e = factors[i];
      const auto& f = factors[j];
      if (e->order() * f->order() > config.max_order) continue;
      const auto es = factor_subgroups(e);
      const auto fs = factor_subgroups(f);
      for (auto n : config.ns) {
        for (auto m : config.ms) {
          for (const auto& a : es) {
            for (const auto& b : es) {
              for (const auto& c : fs) {
                for (const auto& d : fs) {
                  const auto e_elems = policy_elements(
                      config.g_policy, e->order(),
                      {&static_cast<const CommDistribution&>(
                          extend_by_conjugators(comm_distribution(a, n, opts), b, m, opts))});
                  const auto f_elems = policy_elements(
                      config.g_policy, f->order(),
                      {&static_cast<const CommDistribution&>(
                          extend_by_conjugators(comm_distribution(c, n, opts), d, m, opts))});
                  out.begin();
                  run_p1(out, a, b, c, d, n, m, e_elems, f_elems, opts);
                  out.end();
                }
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

AuditReport run_battery(const AuditConfig& config) {
  AuditReport report;
  report.config_echo = config.echo.is_null() ? config_to_json(config) : config.echo;
  report.seed = config.seed;
  if (config.claims.empty()) return report;

  std::vector<Collector> per_group;
  per_group.reserve(config.groups.size());
  for (std::size_t i = 0; i < config.groups.size(); ++i) per_group.emplace_back(config.emit, config.timings);

  const unsigned workers = std::max(1u, config.threads);
  std::vector<std::exception_ptr> errors(config.groups.size());
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < config.groups.size(); i += workers) {
      try {
        audit_group(config, config.groups[i], per_group[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Collector products(config.emit, config.timings);
  if (wants(config, ClaimId::P1)) audit_products(config, products);
  per_group.push_back(std::move(products));

  for (auto& c : per_group) {
    for (const auto& [key, counts] : c.summary()) {
      auto& total = report.summary[key];
      total.holds += counts.holds;
      total.violated += counts.violated;
      total.vacuous += counts.vacuous;
      total.precondition_failed += counts.precondition_failed;
    }
    auto& f = c.findings();
    report.findings.insert(report.findings.end(), std::make_move_iterator(f.begin()),
                           std::make_move_iterator(f.end()));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

Json to_json(const Finding& f) {
  Json j;
  j["claim"] = std::string(claim_name(f.claim));
  if (!f.variant.empty()) j["variant"] = f.variant;
  Json inst;
  inst["group"] = f.instance.group;
  inst["H"] = f.instance.H;
  inst["K"] = f.instance.K;
  inst["n"] = f.instance.n;
  inst["m"] = f.instance.m;
  inst["g"] = f.instance.g ? Json(*f.instance.g) : Json(nullptr);
  if (!f.instance.extra.empty()) inst["extra"] = f.instance.extra;
  j["instance"] = std::move(inst);
  j["verdict"] = std::string(verdict_name(f.verdict));
  j["witness"] = {{"lhs", f.witness.lhs},
                  {"relation", f.witness.relation},
                  {"rhs", f.witness.rhs},
                  {"note", f.witness.note}};
  if (f.runtime_ms) j["runtime_ms"] = *f.runtime_ms;
  return j;
}

Json to_json(const AuditReport& r) {
  Json j;
  j["config_echo"] = r.config_echo;
  j["seed"] = r.seed;
  Json summary = Json::object();
  for (const auto& [key, c] : r.summary) {
    summary[key] = {{"holds", c.holds},
                    {"violated", c.violated},
                    {"vacuous", c.vacuous},
                    {"precondition_failed", c.precondition_failed}};
  }
  j["summary"] = std::move(summary);
  Json legend = Json::object();
  for (const auto& e : kCatalog) {
    for (const auto& [key, c] : r.summary) {
      if (key == e.name || key.rfind(std::string(e.name) + "/", 0) == 0) {
        legend[std::string(e.name)] = std::string(e.reading);
        break;
      }
    }
  }
  j["legend"] = std::move(legend);
  Json findings = Json::array();
  for (const auto& f : r.findings) findings.push_back(to_json(f));
  j["findings"] = std::move(findings);
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const AuditReport& r) {
  std::ostringstream out;
  out << "claim,variant,group,H,K,n,m,g,extra,verdict,lhs,relation,rhs,note\n";
  for (const auto& f : r.findings) {
    out << claim_name(f.claim) << ',' << csv_field(f.variant) << ','
        << csv_field(f.instance.group) << ',' << csv_field(f.instance.H) << ','
        << csv_field(f.instance.K) << ',' << f.instance.n << ',' << f.instance.m << ','
        << (f.instance.g ? std::to_string(*f.instance.g) : "") << ','
        << csv_field(f.instance.extra) << ',' << verdict_name(f.verdict) << ','
        << csv_field(f.witness.lhs) << ',' << csv_field(f.witness.relation) << ','
        << csv_field(f.witness.rhs) << ',' << csv_field(f.witness.note) << '\n';
  }
  return out.str();
}

}  // namespace commdeg
